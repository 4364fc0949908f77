//! Semiorders: elements compared by utility with a unit margin.
//!
//! Sorting by utility gives `x_0..x_{n-1}`. A nonempty lower set `L` maps to
//! the grid point `(r, j)` where `j` is the largest index in `L` and `r - 1`
//! is the smallest index missing from `L` below `j` (`r = 0` when `L` is the
//! prefix `x_0..=x_j`). Row `r` therefore names element `x_{r-1}`.
//!
//! The grid is cut by a quadtree. A square whose every cell is feasible
//! contributes a zonotope; mixed squares combine their four children.

use std::collections::HashSet;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::polygon::{hull_of_points, hull_union, minkowski_sum, segment_zonotope, translate, ConvexPolygon, Point};
use crate::poset::{LowerSet, ParamWeight, WeightedPoset, SIZE_LIMIT};
use crate::witness::Witness;

pub type Utility = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiItem {
    pub id: String,
    pub utility: Utility,
    pub weight: ParamWeight,
}

/// Items kept sorted by utility (stable for ties).
#[derive(Clone, Debug)]
pub struct Semiorder {
    items: Vec<SemiItem>,
}

/// Square of the extremes grid: rows `r0..r0+side`, columns `j0..j0+side`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSquare {
    pub r0: usize,
    pub j0: usize,
    pub side: usize,
}

impl GridSquare {
    /// Element indices of the rows (`r - 1` for each row `r >= 1`).
    pub fn row_elements(&self) -> std::ops::Range<usize> {
        self.r0.saturating_sub(1)..(self.r0 + self.side).saturating_sub(1)
    }

    pub fn col_elements(&self) -> std::ops::Range<usize> {
        self.j0..self.j0 + self.side
    }

    /// Elements of the subproblem, sorted.
    pub fn subproblem(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.row_elements().chain(self.col_elements()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Elements outside the subproblem lying between two of its elements.
    pub fn freeset(&self) -> Vec<usize> {
        self.free_range().collect()
    }

    fn free_range(&self) -> std::ops::Range<usize> {
        let rows = self.row_elements();
        if rows.is_empty() {
            return 0..0;
        }
        let cols = self.col_elements();
        if rows.end <= cols.start {
            rows.end..cols.start
        } else if cols.end <= rows.start {
            cols.end..rows.start
        } else {
            0..0
        }
    }

    /// Elements below the rows; every lower set mapped here contains them.
    fn forced_end(&self) -> usize {
        self.r0.saturating_sub(1)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SemiorderStats {
    /// Size after padding to a power of two.
    pub padded: usize,
    /// `subdivided[k]`: squares of side `2^k` that were split.
    pub subdivided: Vec<usize>,
    /// Squares resolved as fully feasible.
    pub zonotope_squares: usize,
}

impl SemiorderStats {
    /// Largest `count * side / padded` over all side lengths.
    pub fn max_subdivision_ratio(&self) -> f64 {
        self.subdivided
            .iter()
            .enumerate()
            .map(|(k, &c)| (c << k) as f64 / self.padded.max(1) as f64)
            .fold(0.0, f64::max)
    }
}

impl Semiorder {
    pub fn new(mut items: Vec<SemiItem>) -> Result<Self> {
        if items.len() > SIZE_LIMIT {
            return Err(Error::SizeLimit { size: items.len(), limit: SIZE_LIMIT });
        }
        let mut seen = HashSet::with_capacity(items.len());
        for it in &items {
            it.weight.check(&it.id)?;
            if !seen.insert(it.id.as_str()) {
                return Err(Error::DuplicateId(it.id.clone()));
            }
        }
        items.sort_by_key(|it| it.utility);
        Ok(Semiorder { items })
    }

    /// Convenience constructor with ids `"0"`, `"1"`, ... in input order.
    pub fn from_values(values: &[(Utility, ParamWeight)]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &(utility, weight))| SemiItem { id: i.to_string(), utility, weight })
                .collect(),
        )
    }

    pub fn items(&self) -> &[SemiItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `x_i < x_j` in sorted indices.
    pub fn less(&self, i: usize, j: usize) -> bool {
        self.items[i].utility < self.items[j].utility - 1
    }

    /// Explicit poset; element `k` is the `k`-th item in utility order.
    pub fn to_poset(&self) -> Result<WeightedPoset> {
        let n = self.len();
        let mut rels = Vec::new();
        for i in 0..n {
            // utilities are sorted, so x_i < x_j forces i < j
            for j in i + 1..n {
                if self.less(i, j) {
                    rels.push((i, j));
                }
            }
        }
        WeightedPoset::from_parts(
            self.items.iter().map(|it| it.id.clone()).collect(),
            self.items.iter().map(|it| it.weight).collect(),
            &rels,
        )
    }

    /// Adds zero-weight items below everything until the size is a power of two.
    pub fn pad_to_power_of_two(&self) -> Semiorder {
        let n = self.len();
        let target = n.max(1).next_power_of_two();
        if target == n {
            return self.clone();
        }
        let low = self.items.first().map_or(Ratio::from_integer(0), |it| it.utility) - 2;
        let taken: HashSet<&str> = self.items.iter().map(|it| it.id.as_str()).collect();
        let mut pads = Vec::with_capacity(target - n);
        let mut k = 0;
        while pads.len() < target - n {
            let id = format!("pad{k}");
            k += 1;
            if !taken.contains(id.as_str()) {
                pads.push(SemiItem { id, utility: low, weight: ParamWeight::new(0, 0) });
            }
        }
        pads.extend(self.items.iter().cloned());
        Semiorder { items: pads }
    }

    /// Grid point `(r, j)` of a nonempty lower set (sorted indices).
    pub fn extremes(&self, l: &LowerSet) -> Option<(usize, usize)> {
        let &j = l.members.iter().max()?;
        let inside: HashSet<usize> = l.members.iter().copied().collect();
        let i = (0..j).find(|k| !inside.contains(k));
        Some((i.map_or(0, |i| i + 1), j))
    }
}

/// Hull of all lower-set projections, with witnesses.
pub fn solve_semiorder(s: &Semiorder) -> ConvexPolygon {
    solve_semiorder_with(s, true).0
}

pub fn solve_semiorder_with(s: &Semiorder, with_witness: bool) -> (ConvexPolygon, SemiorderStats) {
    let n = s.len();
    let size = n.max(1).next_power_of_two();
    let npad = size - n;
    let low = s.items.first().map_or(Ratio::from_integer(0), |it| it.utility) - 2;
    let mut u = vec![low; npad];
    u.extend(s.items.iter().map(|it| it.utility));
    let mut w = vec![Point::ORIGIN; npad];
    w.extend(s.items.iter().map(|it| it.weight.point()));
    let mut prefix = vec![Point::ORIGIN; size + 1];
    for k in 0..size {
        prefix[k + 1] = prefix[k] + w[k];
    }

    let mut solver = Quadtree {
        u,
        w,
        prefix,
        npad,
        with_witness,
        stats: SemiorderStats { padded: size, subdivided: vec![0; size.trailing_zeros() as usize + 1], zonotope_squares: 0 },
    };
    let root = GridSquare { r0: 0, j0: 0, side: size };
    let body = solver.square(root);

    // prefix lower sets, the empty one included
    let mut pts = Vec::with_capacity(size + 1);
    let mut wit = Witness::empty();
    pts.push((Point::ORIGIN, wit.clone()));
    for j in 0..size {
        if j >= npad && with_witness {
            wit = Witness::union(&wit, &Witness::single(j - npad));
        }
        pts.push((solver.prefix[j + 1], wit.clone()));
    }
    let mut prefixes = hull_of_points(&pts);
    if !with_witness {
        prefixes = prefixes.without_witnesses();
    }
    (hull_union(&body, &prefixes), solver.stats)
}

struct Quadtree {
    u: Vec<Utility>,
    w: Vec<Point>,
    prefix: Vec<Point>,
    npad: usize,
    with_witness: bool,
    stats: SemiorderStats,
}

impl Quadtree {
    fn real(&self, range: std::ops::Range<usize>) -> impl Iterator<Item = usize> + '_ {
        range.filter(move |&k| k >= self.npad).map(move |k| k - self.npad)
    }

    fn zonotope(&self, elems: &[usize]) -> ConvexPolygon {
        let gens: Vec<(Point, usize)> = elems.iter().filter(|&&k| k >= self.npad).map(|&k| (self.w[k], k - self.npad)).collect();
        segment_zonotope(&gens, self.with_witness)
    }

    /// Lower sets mapped into `s`, relative to its forced and free elements.
    fn square(&mut self, s: GridSquare) -> ConvexPolygon {
        let one = Ratio::from_integer(1);
        let (rmax, jmax) = (s.r0 + s.side - 1, s.j0 + s.side - 1);
        if s.r0 > jmax || rmax < 1 || self.u[rmax - 1] < self.u[s.j0] - one {
            return ConvexPolygon::empty();
        }
        if s.r0 >= 1 && rmax <= s.j0 && self.u[s.r0 - 1] >= self.u[jmax] - one {
            self.stats.zonotope_squares += 1;
            return self.zonotope(&s.subproblem());
        }
        debug_assert!(s.side > 1);
        self.stats.subdivided[s.side.trailing_zeros() as usize] += 1;
        let h = s.side / 2;
        let mut acc = ConvexPolygon::empty();
        for (dr, dj) in [(0, 0), (0, h), (h, 0), (h, h)] {
            let c = GridSquare { r0: s.r0 + dr, j0: s.j0 + dj, side: h };
            let inner = self.square(c);
            if inner.is_empty() {
                continue;
            }
            let (cf, pf) = (c.free_range(), s.free_range());
            let newly_free: Vec<usize> = cf.filter(|k| !pf.contains(k)).collect();
            let forced = s.forced_end()..c.forced_end();
            let by = self.prefix[forced.end] - self.prefix[forced.start];
            let shift = self.with_witness.then(|| Witness::leaf(self.real(forced.clone())));
            let lifted = if newly_free.is_empty() { inner } else { minkowski_sum(&inner, &self.zonotope(&newly_free)) };
            acc = hull_union(&acc, &translate(&lifted, by, shift.as_ref()));
        }
        acc
    }
}
