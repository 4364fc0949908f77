pub mod error;
pub mod generate;
pub mod io;
pub mod parametric;
pub mod polygon;
pub mod poset;
pub mod semiorder;
pub mod series_parallel;
pub mod splay;
pub mod treewidth;
pub mod width;
pub mod witness;

pub use error::{Error, Result};
pub use polygon::{ConvexPolygon, Point, PolygonFormula};
pub use poset::{LowerSet, ParamWeight, WeightedPoset};
pub use witness::Witness;
pub use parametric::{parametric_profile, Objective, ParametricProfile, Rational};
pub use semiorder::{solve_semiorder, Semiorder};
pub use series_parallel::{solve_sp, RootedTree, SPTree};
pub use splay::SplayPolygon;
pub use treewidth::{solve_treewidth, TreeDecomposition};
pub use width::solve_width2;
