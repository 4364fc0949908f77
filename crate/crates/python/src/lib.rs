//! Python bindings: posets, solvers, polygons and parametric profiles.

use std::sync::Arc;

use paraclose::generate;
use paraclose::io;
use paraclose::parametric::{
    format_rational, maximize_quasiconvex, minimize_quasiconcave, parametric_profile, parse_rational, Objective, ParametricProfile, Rational,
};
use paraclose::polygon::{hull_of_plain_points, hull_union, minkowski_sum, translate};
use paraclose::semiorder::{solve_semiorder_with, SemiItem};
use paraclose::series_parallel::{solve_sp_with, sp_from_value, RootedTree};
use paraclose::treewidth::{greedy_tree_decomposition, solve_treewidth_with, TreeDecomposition, TreewidthLimits};
use paraclose::width::{chain_partition_width2, solve_width2_with};
use paraclose::{ConvexPolygon, ParamWeight, Point, SPTree as CoreSp, Semiorder as CoreSemi, SplayPolygon as CoreSplay, WeightedPoset, Witness};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;

fn err(e: paraclose::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((*r.numer(), *r.denom()))
}

/// Accepts an int, a `Fraction`, or a string such as `"3/2"` or `"-0.25"`.
fn rational(v: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = v.cast::<PyString>() {
        return parse_rational(&s.to_cow()?).map_err(err);
    }
    if let Ok(k) = v.extract::<i128>() {
        return Ok(Rational::from_integer(k));
    }
    let num: i128 = v.getattr("numerator")?.extract()?;
    let den: i128 = v.getattr("denominator")?.extract()?;
    if den == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Vertex with the ids of its lower set.
type Located = ((i64, i64), Option<Vec<String>>);
/// Vertex, lower set ids, objective value.
type Optimum<'py> = ((i64, i64), Option<Vec<String>>, Bound<'py, PyAny>);

fn names(w: Option<&Witness>, ids: &[String]) -> Option<Vec<String>> {
    w.map(|w| io::witness_names(w, ids))
}

/// Convex polygon with optional witnesses naming the lower set behind each vertex.
#[pyclass(frozen, skip_from_py_object, module = "pyparaclose")]
#[derive(Clone)]
struct Polygon {
    poly: ConvexPolygon,
    ids: Arc<Vec<String>>,
}

impl Polygon {
    fn wrap(poly: ConvexPolygon, ids: &[String]) -> Self {
        Polygon { poly, ids: Arc::new(ids.to_vec()) }
    }

    fn plain(poly: ConvexPolygon) -> Self {
        Polygon { poly, ids: Arc::new(Vec::new()) }
    }
}

#[pymethods]
impl Polygon {
    /// Convex hull of the given integer points.
    #[new]
    fn new(points: Vec<(i64, i64)>) -> Self {
        let pts: Vec<Point> = points.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        Polygon::plain(hull_of_plain_points(&pts))
    }

    /// Parses polygon JSON; witness names are kept as given.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let mut ids: Vec<String> = Vec::new();
        for w in v.get("witnesses").and_then(|w| w.as_array()).into_iter().flatten() {
            for s in w.as_array().into_iter().flatten().filter_map(|s| s.as_str()) {
                if !ids.iter().any(|x| x == s) {
                    ids.push(s.to_string());
                }
            }
        }
        Ok(Polygon::wrap(io::parse_polygon(text, &ids).map_err(err)?, &ids))
    }

    #[getter]
    fn vertices(&self) -> Vec<(i64, i64)> {
        self.poly.vertices().iter().map(|p| (p.x, p.y)).collect()
    }

    /// Member ids of each vertex's lower set, or `None` without witnesses.
    #[getter]
    fn witnesses(&self) -> Option<Vec<Vec<String>>> {
        self.poly.witnesses().map(|ws| ws.iter().map(|w| io::witness_names(w, &self.ids)).collect())
    }

    fn upper_chain(&self) -> Vec<(i64, i64)> {
        self.poly.upper_chain().iter().map(|p| (p.x, p.y)).collect()
    }

    fn __len__(&self) -> usize {
        self.poly.len()
    }

    fn __eq__(&self, other: &Polygon) -> bool {
        self.poly == other.poly
    }

    fn __repr__(&self) -> String {
        format!("Polygon({:?})", self.vertices())
    }

    fn minkowski(&self, other: &Polygon) -> Polygon {
        Polygon::plain(minkowski_sum(&self.poly.clone().without_witnesses(), &other.poly.clone().without_witnesses()))
    }

    fn union(&self, other: &Polygon) -> Polygon {
        Polygon::plain(hull_union(&self.poly.clone().without_witnesses(), &other.poly.clone().without_witnesses()))
    }

    fn translate(&self, dx: i64, dy: i64) -> Polygon {
        Polygon { poly: translate(&self.poly, Point::new(dx, dy), Some(&Witness::empty())), ids: self.ids.clone() }
    }

    fn to_json(&self) -> String {
        io::polygon_to_json(&self.poly, &self.ids).to_string()
    }

    fn profile(&self) -> PyResult<Profile> {
        Ok(Profile { prof: parametric_profile(&self.poly).map_err(err)?, ids: self.ids.clone() })
    }

    /// `(vertex, witness, value)` maximizing a built-in objective
    /// (`"ratio"`, `"dist2"` or `"linear:a,b"`).
    fn maximize<'py>(&self, py: Python<'py>, objective: &str) -> PyResult<Optimum<'py>> {
        let obj = Objective::parse(objective).map_err(err)?;
        let o = maximize_quasiconvex(&self.poly, |v| obj.eval(v)).map_err(err)?;
        Ok(((o.vertex.x, o.vertex.y), names(o.witness.as_ref(), &self.ids), fraction(py, o.value)?))
    }

    fn minimize<'py>(&self, py: Python<'py>, objective: &str) -> PyResult<Optimum<'py>> {
        let obj = Objective::parse(objective).map_err(err)?;
        let o = minimize_quasiconcave(&self.poly, |v| obj.eval(v)).map_err(err)?;
        Ok(((o.vertex.x, o.vertex.y), names(o.witness.as_ref(), &self.ids), fraction(py, o.value)?))
    }
}

/// Upper-hull vertices in order of increasing lambda.
#[pyclass(frozen, module = "pyparaclose")]
struct Profile {
    prof: ParametricProfile,
    ids: Arc<Vec<String>>,
}

#[pymethods]
impl Profile {
    #[getter]
    fn pieces(&self) -> Vec<Located> {
        self.prof.pieces.iter().map(|p| ((p.vertex.x, p.vertex.y), names(p.witness.as_ref(), &self.ids))).collect()
    }

    #[getter]
    fn breakpoints<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.prof.breakpoints.iter().map(|&b| fraction(py, b)).collect()
    }

    /// Optimal vertex and witness at `lam`; the left piece wins at a breakpoint.
    fn optimum_at(&self, lam: &Bound<'_, PyAny>) -> PyResult<Located> {
        let p = self.prof.optimum_at(rational(lam)?);
        Ok(((p.vertex.x, p.vertex.y), names(p.witness.as_ref(), &self.ids)))
    }

    fn value_at<'py>(&self, py: Python<'py>, lam: &Bound<'_, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.prof.value_at(rational(lam)?))
    }

    fn __len__(&self) -> usize {
        self.prof.pieces.len()
    }

    fn to_json(&self) -> String {
        io::profile_to_json(&self.prof, &self.ids).to_string()
    }
}

/// Finite poset with weights `a * lambda + b`.
#[pyclass(frozen, module = "pyparaclose")]
struct Poset {
    p: WeightedPoset,
}

#[pymethods]
impl Poset {
    #[new]
    #[pyo3(signature = (elements, relations=Vec::new()))]
    fn new(elements: Vec<(String, (i64, i64))>, relations: Vec<(String, String)>) -> PyResult<Self> {
        let els = elements.into_iter().map(|(id, (a, b))| (id, ParamWeight::new(a, b))).collect();
        Ok(Poset { p: WeightedPoset::new(els, &relations).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Poset { p: io::parse_poset(text).map_err(err)? })
    }

    /// Incidence poset of a graph given as graph JSON.
    #[staticmethod]
    fn incidence(graph_json: &str) -> PyResult<Self> {
        let g = io::parse_graph(graph_json).map_err(err)?;
        Ok(Poset { p: paraclose::poset::incidence_poset(&g).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::poset_to_json(&self.p).to_string()
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.p.ids().to_vec()
    }

    fn __len__(&self) -> usize {
        self.p.len()
    }

    fn is_below(&self, x: &str, y: &str) -> PyResult<bool> {
        self.p.is_below(x, y).map_err(err)
    }

    #[pyo3(signature = (limit=20))]
    fn lower_sets(&self, limit: usize) -> PyResult<Vec<Vec<String>>> {
        let sets = self.p.enumerate_lower_sets(limit).map_err(err)?;
        Ok(sets.iter().map(|s| s.members.iter().map(|&i| self.p.id(i).to_string()).collect()).collect())
    }

    /// Hull of every lower set by enumeration.
    #[pyo3(signature = (limit=20))]
    fn oracle(&self, limit: usize) -> PyResult<Polygon> {
        Ok(Polygon::wrap(self.p.oracle_polygon(limit).map_err(err)?, self.p.ids()))
    }

    #[pyo3(signature = (with_witness=true))]
    fn solve_width2(&self, with_witness: bool) -> PyResult<Polygon> {
        let chains = chain_partition_width2(&self.p).map_err(err)?;
        Ok(Polygon::wrap(solve_width2_with(&self.p, &chains, with_witness).map_err(err)?.0, self.p.ids()))
    }

    /// Treewidth solver; `decomposition` is decomposition JSON, a heuristic
    /// one is used when omitted.
    #[pyo3(signature = (decomposition=None, with_witness=true))]
    fn solve_treewidth(&self, decomposition: Option<&str>, with_witness: bool) -> PyResult<Polygon> {
        let td = match decomposition {
            Some(text) => {
                let v = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
                TreeDecomposition::from_json(&v, &self.p).map_err(err)?
            }
            None => greedy_tree_decomposition(&self.p),
        };
        let poly = solve_treewidth_with(&self.p, &td, TreewidthLimits::default(), with_witness).map_err(err)?;
        Ok(Polygon::wrap(poly, self.p.ids()))
    }
}

/// Semiorder from `(id, utility, (a, b))` items; utilities are ints or
/// rational strings.
#[pyclass(frozen, module = "pyparaclose")]
struct Semiorder {
    s: CoreSemi,
}

#[pymethods]
impl Semiorder {
    #[new]
    fn new(items: Vec<(String, Bound<'_, PyAny>, (i64, i64))>) -> PyResult<Self> {
        let items = items
            .into_iter()
            .map(|(id, u, (a, b))| {
                let r = rational(&u)?;
                let conv = |x: i128| i64::try_from(x).map_err(|_| PyValueError::new_err("utility out of range"));
                Ok(SemiItem { id, utility: paraclose::semiorder::Utility::new(conv(*r.numer())?, conv(*r.denom())?), weight: ParamWeight::new(a, b) })
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Semiorder { s: CoreSemi::new(items).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Semiorder { s: io::parse_semiorder(text).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.s.len()
    }

    fn to_poset(&self) -> PyResult<Poset> {
        Ok(Poset { p: self.s.to_poset().map_err(err)? })
    }

    #[pyo3(signature = (with_witness=true))]
    fn solve(&self, with_witness: bool) -> Polygon {
        let ids: Vec<String> = self.s.items().iter().map(|it| it.id.clone()).collect();
        Polygon::wrap(solve_semiorder_with(&self.s, with_witness).0, &ids)
    }
}

/// Series-parallel order from nested SP JSON or a rooted tree edge list.
#[pyclass(frozen, module = "pyparaclose")]
struct SPTree {
    t: CoreSp,
}

#[pymethods]
impl SPTree {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let t = if v.get("root").is_some() { RootedTree::parse(text).and_then(|t| t.to_sp()) } else { sp_from_value(&v) };
        Ok(SPTree { t: t.map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.t.to_json().to_string()
    }

    fn __len__(&self) -> usize {
        self.t.len()
    }

    fn to_poset(&self) -> PyResult<Poset> {
        Ok(Poset { p: self.t.to_poset().map_err(err)? })
    }

    #[pyo3(signature = (with_witness=true))]
    fn solve(&self, with_witness: bool) -> PyResult<Polygon> {
        Ok(Polygon::wrap(solve_sp_with(&self.t, with_witness).map_err(err)?.0, self.t.ids()))
    }
}

/// Mergeable polygon; a merge consumes its argument, which can no longer be used.
#[pyclass(module = "pyparaclose")]
struct SplayPolygon {
    inner: Option<CoreSplay>,
}

impl SplayPolygon {
    fn get(&self) -> PyResult<&CoreSplay> {
        self.inner.as_ref().ok_or_else(|| PyValueError::new_err("SplayPolygon was consumed by a merge"))
    }

    fn take(&mut self) -> PyResult<CoreSplay> {
        self.inner.take().ok_or_else(|| PyValueError::new_err("SplayPolygon was consumed by a merge"))
    }
}

#[pymethods]
impl SplayPolygon {
    #[new]
    fn new(p: &Polygon) -> Self {
        SplayPolygon { inner: Some(CoreSplay::from_polygon(&p.poly.clone().without_witnesses())) }
    }

    fn to_polygon(&self) -> PyResult<Polygon> {
        Ok(Polygon::plain(self.get()?.to_polygon()))
    }

    fn __len__(&self) -> PyResult<usize> {
        Ok(self.get()?.len())
    }

    fn translate(&mut self, dx: i64, dy: i64) -> PyResult<()> {
        self.inner.as_mut().ok_or_else(|| PyValueError::new_err("SplayPolygon was consumed by a merge"))?.translate(Point::new(dx, dy), None);
        Ok(())
    }

    /// Replaces `self` with the hull of both; `other` is consumed.
    fn merge_union(&mut self, other: &mut SplayPolygon) -> PyResult<()> {
        let b = other.take()?;
        let a = self.take()?;
        self.inner = Some(a.merge_union(b));
        Ok(())
    }

    /// Replaces `self` with the Minkowski sum of both; `other` is consumed.
    fn merge_minkowski(&mut self, other: &mut SplayPolygon) -> PyResult<()> {
        let b = other.take()?;
        let a = self.take()?;
        self.inner = Some(a.merge_minkowski(b));
        Ok(())
    }

    /// Splay rotations performed so far.
    #[getter]
    fn rotations(&self) -> PyResult<u64> {
        Ok(self.get()?.stats().rotations)
    }
}

/// JSON text of a seeded random instance: `semiorder`, `sp`, `tree`,
/// `width2`, `treewidth`, `poset` or `graph`.
#[pyfunction]
#[pyo3(signature = (class_name, n, seed=0, weight=9))]
fn generate_instance(class_name: &str, n: usize, seed: u64, weight: i64) -> PyResult<String> {
    let mut r = generate::rng(seed);
    let v = match class_name {
        "semiorder" => io::semiorder_to_json(&generate::semiorder(&mut r, n, weight, 3)),
        "sp" => generate::sp_tree(&mut r, n, weight).to_json(),
        "tree" => generate::rooted_tree(&mut r, n, weight).to_json(),
        "width2" => io::poset_to_json(&generate::width2_poset(&mut r, n, weight, 0.3)),
        "treewidth" => io::poset_to_json(&generate::partial_ktree_dag(&mut r, n, 2, weight, 0.7)),
        "poset" => io::poset_to_json(&generate::random_poset(&mut r, n, weight, 0.3)),
        "graph" => io::graph_to_json(&generate::random_graph(&mut r, n, n * 3 / 2, weight)),
        other => return Err(PyValueError::new_err(format!("unknown class `{other}`"))),
    };
    Ok(v.to_string())
}

/// Formats a rational the way profile files do.
#[pyfunction]
fn format_fraction(value: &Bound<'_, PyAny>) -> PyResult<String> {
    Ok(format_rational(Some(rational(value)?), false))
}

#[pymodule]
fn pyparaclose(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Polygon>()?;
    m.add_class::<Profile>()?;
    m.add_class::<Poset>()?;
    m.add_class::<Semiorder>()?;
    m.add_class::<SPTree>()?;
    m.add_class::<SplayPolygon>()?;
    m.add_function(wrap_pyfunction!(generate_instance, m)?)?;
    m.add_function(wrap_pyfunction!(format_fraction, m)?)?;
    Ok(())
}
