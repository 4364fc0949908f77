//! Exact convex polygon algebra.
//!
//! Polygons are kept in one canonical form: vertices counterclockwise,
//! starting at the lexicographically smallest point, with no repeated and no
//! collinear vertices. Two polygons are equal iff their vertex lists are equal.
//! All predicates are integer cross products evaluated in `i128`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::witness::Witness;

/// Exact lattice point. The derived order is lexicographic (x, then y).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl SubAssign for Point {
    fn sub_assign(&mut self, o: Point) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl std::iter::Sum for Point {
    fn sum<I: Iterator<Item = Point>>(iter: I) -> Point {
        iter.fold(Point::ORIGIN, |a, b| a + b)
    }
}

/// Cross product of two vectors.
#[inline]
pub fn cross_vec(u: Point, v: Point) -> i128 {
    u.x as i128 * v.y as i128 - u.y as i128 * v.x as i128
}

/// Orientation of `o -> a -> b`: positive for a left turn.
#[inline]
pub fn cross(o: Point, a: Point, b: Point) -> i128 {
    cross_vec(a - o, b - o)
}

/// 0 for directions with angle in (-90°, 90°], 1 otherwise.
#[inline]
pub(crate) fn half(v: Point) -> u8 {
    if v.x > 0 || (v.x == 0 && v.y > 0) {
        0
    } else {
        1
    }
}

/// Angular order of nonzero directions, starting just after straight down.
/// This is the order in which the edges of a canonical polygon appear.
#[inline]
pub(crate) fn angle_cmp(u: Point, v: Point) -> Ordering {
    half(u).cmp(&half(v)).then_with(|| 0.cmp(&cross_vec(u, v)))
}

/// Convex polygon in canonical form, optionally carrying one witness per vertex.
#[derive(Clone, Debug, Default)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    witnesses: Option<Vec<Witness>>,
}

impl PartialEq for ConvexPolygon {
    /// Structural equality of the canonical vertex lists; witnesses are not
    /// compared since several lower sets may project onto one vertex.
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for ConvexPolygon {}

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon { vertices: Vec::new(), witnesses: None }
    }

    pub fn point(p: Point, witness: Option<Witness>) -> Self {
        ConvexPolygon { vertices: vec![p], witnesses: witness.map(|w| vec![w]) }
    }

    /// Wraps an already canonical vertex list. Panics in debug builds otherwise.
    pub fn from_canonical(vertices: Vec<Point>, witnesses: Option<Vec<Witness>>) -> Self {
        if let Some(w) = &witnesses {
            assert_eq!(w.len(), vertices.len(), "witness list misaligned");
        }
        let p = ConvexPolygon { vertices, witnesses };
        debug_assert!(p.is_canonical(), "not canonical: {:?}", p.vertices);
        p
    }

    /// Like [`ConvexPolygon::from_canonical`], but reports malformed input.
    pub fn try_from_canonical(vertices: Vec<Point>, witnesses: Option<Vec<Witness>>) -> Result<Self> {
        if witnesses.as_ref().is_some_and(|w| w.len() != vertices.len()) {
            return Err(Error::Parse("witness list length differs from vertex count".into()));
        }
        let p = ConvexPolygon { vertices, witnesses };
        if !p.is_canonical() {
            return Err(Error::Parse("vertices are not a strictly convex counter-clockwise list from the lexicographic minimum".into()));
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn witnesses(&self) -> Option<&[Witness]> {
        self.witnesses.as_deref()
    }

    pub fn witness(&self, i: usize) -> Option<&Witness> {
        self.witnesses.as_ref().map(|w| &w[i])
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn has_witnesses(&self) -> bool {
        self.witnesses.is_some()
    }

    pub fn without_witnesses(mut self) -> Self {
        self.witnesses = None;
        self
    }

    /// Checks the canonical-form invariants.
    pub fn is_canonical(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n <= 1 {
            return true;
        }
        if v.iter().skip(1).any(|p| *p <= v[0]) {
            return false;
        }
        if n == 2 {
            return true;
        }
        (0..n).all(|i| cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) > 0)
    }

    /// Index of the lexicographically largest vertex.
    pub(crate) fn lexmax_index(&self) -> usize {
        let v = &self.vertices;
        (0..v.len()).max_by_key(|&i| v[i]).unwrap_or(0)
    }

    /// Lower chain, lexicographic min to max inclusive.
    pub fn lower_chain(&self) -> Vec<Point> {
        if self.is_empty() {
            return Vec::new();
        }
        self.vertices[..=self.lexmax_index()].to_vec()
    }

    /// Upper chain left to right, lexicographic min to max inclusive.
    pub fn upper_chain(&self) -> Vec<Point> {
        self.upper_chain_indices().into_iter().map(|i| self.vertices[i]).collect()
    }

    pub(crate) fn upper_chain_indices(&self) -> Vec<usize> {
        let n = self.len();
        if n == 0 {
            return Vec::new();
        }
        let k = self.lexmax_index();
        let mut idx = vec![0];
        idx.extend((k..n).rev().filter(|&i| i != 0));
        if k == 0 {
            idx.truncate(1);
        }
        idx
    }

    /// Vertex indices in lexicographic order, in linear time.
    fn lex_order(&self) -> Vec<usize> {
        let n = self.len();
        if n == 0 {
            return Vec::new();
        }
        let k = self.lexmax_index();
        let mut out = Vec::with_capacity(n);
        let (mut a, mut b) = (0usize, n); // a walks up the lower chain, b down the upper one
        while a <= k || b > k + 1 {
            let take_lower = if a > k {
                false
            } else if b <= k + 1 {
                true
            } else {
                self.vertices[a] < self.vertices[b - 1]
            };
            if take_lower {
                out.push(a);
                a += 1;
            } else {
                out.push(b - 1);
                b -= 1;
            }
        }
        out
    }
}

type Tagged = (Point, Option<Witness>);

/// Andrew's monotone chain over lexicographically sorted, deduplicated input.
fn monotone_chain(sorted: Vec<Tagged>, keep_witness: bool) -> ConvexPolygon {
    let n = sorted.len();
    if n == 0 {
        return ConvexPolygon::empty();
    }
    let build = |pts: &[&Tagged]| {
        let vertices: Vec<Point> = pts.iter().map(|t| t.0).collect();
        let witnesses = if keep_witness {
            Some(pts.iter().map(|t| t.1.clone().unwrap_or_else(Witness::empty)).collect())
        } else {
            None
        };
        ConvexPolygon { vertices, witnesses }
    };
    if n <= 2 {
        return build(&sorted.iter().collect::<Vec<_>>());
    }
    let mut lower: Vec<&Tagged> = Vec::with_capacity(n);
    for t in &sorted {
        while lower.len() >= 2 && cross(lower[lower.len() - 2].0, lower[lower.len() - 1].0, t.0) <= 0 {
            lower.pop();
        }
        lower.push(t);
    }
    let mut upper: Vec<&Tagged> = Vec::with_capacity(n);
    for t in sorted.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2].0, upper[upper.len() - 1].0, t.0) <= 0 {
            upper.pop();
        }
        upper.push(t);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    build(&lower)
}

fn dedup_sorted(mut pts: Vec<Tagged>) -> Vec<Tagged> {
    pts.dedup_by(|b, a| a.0 == b.0);
    pts
}

/// Convex hull of a witnessed point set. Coincident points keep the first witness.
pub fn hull_of_points(pts: &[(Point, Witness)]) -> ConvexPolygon {
    let mut tagged: Vec<Tagged> = pts.iter().map(|(p, w)| (*p, Some(w.clone()))).collect();
    tagged.sort_by_key(|t| t.0);
    monotone_chain(dedup_sorted(tagged), true)
}

/// Convex hull of bare points.
pub fn hull_of_plain_points(pts: &[Point]) -> ConvexPolygon {
    let mut tagged: Vec<Tagged> = pts.iter().map(|p| (*p, None)).collect();
    tagged.sort_by_key(|t| t.0);
    monotone_chain(dedup_sorted(tagged), false)
}

fn edges(v: &[Point]) -> Vec<Point> {
    let n = v.len();
    if n < 2 {
        return Vec::new();
    }
    (0..n).map(|i| v[(i + 1) % n] - v[i]).collect()
}

/// Minkowski sum by merging the two edge sequences in angular order.
///
/// Parallel edges are fused. The witness of each output vertex is the union
/// of the witnesses of the two vertices it is the sum of.
pub fn minkowski_sum(p: &ConvexPolygon, q: &ConvexPolygon) -> ConvexPolygon {
    if p.is_empty() || q.is_empty() {
        return ConvexPolygon::empty();
    }
    let keep = p.has_witnesses() && q.has_witnesses();
    let (ep, eq) = (edges(&p.vertices), edges(&q.vertices));
    let (np, nq) = (p.len(), q.len());
    let wit = |i: usize, j: usize| Witness::union(&p.witnesses.as_ref().unwrap()[i % np], &q.witnesses.as_ref().unwrap()[j % nq]);

    let mut cur = p.vertices[0] + q.vertices[0];
    let mut vertices = vec![cur];
    let mut witnesses = keep.then(|| vec![wit(0, 0)]);
    let (mut i, mut j) = (0, 0);
    while i < ep.len() || j < eq.len() {
        let ord = if i == ep.len() {
            Ordering::Greater
        } else if j == eq.len() {
            Ordering::Less
        } else {
            angle_cmp(ep[i], eq[j])
        };
        match ord {
            Ordering::Less => {
                cur += ep[i];
                i += 1;
            }
            Ordering::Greater => {
                cur += eq[j];
                j += 1;
            }
            Ordering::Equal => {
                cur += ep[i] + eq[j];
                i += 1;
                j += 1;
            }
        }
        if i == ep.len() && j == eq.len() {
            debug_assert_eq!(cur, vertices[0]);
            break;
        }
        vertices.push(cur);
        if let Some(w) = witnesses.as_mut() {
            w.push(wit(i, j));
        }
    }
    ConvexPolygon::from_canonical(vertices, witnesses)
}

/// Convex hull of the union of two polygons, in linear time.
pub fn hull_union(p: &ConvexPolygon, q: &ConvexPolygon) -> ConvexPolygon {
    if p.is_empty() {
        return q.clone();
    }
    if q.is_empty() {
        return p.clone();
    }
    let keep = p.has_witnesses() && q.has_witnesses();
    let tag = |poly: &ConvexPolygon, i: usize| -> Tagged {
        (poly.vertices[i], if keep { poly.witness(i).cloned() } else { None })
    };
    let (lp, lq) = (p.lex_order(), q.lex_order());
    let mut merged = Vec::with_capacity(lp.len() + lq.len());
    let (mut a, mut b) = (0, 0);
    while a < lp.len() || b < lq.len() {
        if b == lq.len() || (a < lp.len() && p.vertices[lp[a]] <= q.vertices[lq[b]]) {
            merged.push(tag(p, lp[a]));
            a += 1;
        } else {
            merged.push(tag(q, lq[b]));
            b += 1;
        }
    }
    monotone_chain(dedup_sorted(merged), keep)
}

/// Shifts every vertex by `by`, wrapping witnesses in a shift by `shift`.
pub fn translate(p: &ConvexPolygon, by: Point, shift: Option<&Witness>) -> ConvexPolygon {
    ConvexPolygon {
        vertices: p.vertices.iter().map(|&v| v + by).collect(),
        witnesses: p.witnesses.as_ref().map(|ws| match shift {
            Some(s) => ws.iter().map(|w| Witness::shift(w, s)).collect(),
            None => ws.clone(),
        }),
    }
}

/// Parallel generators merged: summed vector, ids kept, ids flipped.
type Group = (Point, Vec<usize>, Vec<usize>);

/// Hull of all subset sums of the generators: a Minkowski sum of segments.
///
/// Each generator is `(vector, element index)`. With `with_witness`, every
/// vertex records the subset of element indices it is the sum of.
pub fn segment_zonotope(gens: &[(Point, usize)], with_witness: bool) -> ConvexPolygon {
    // Orient every generator into the first angular half; flipped ones start "in".
    let mut base = Point::ORIGIN;
    let mut dirs: Vec<(Point, usize, bool)> = Vec::with_capacity(gens.len());
    for &(g, id) in gens {
        if g == Point::ORIGIN {
            continue;
        }
        if half(g) == 0 {
            dirs.push((g, id, false));
        } else {
            base += g;
            dirs.push((-g, id, true));
        }
    }
    dirs.sort_by(|a, b| angle_cmp(a.0, b.0));
    // (direction sum, unflipped ids, flipped ids)
    let mut groups: Vec<Group> = Vec::new();
    for (g, id, flipped) in dirs {
        let fresh = match groups.last() {
            Some((sum, _, _)) => cross_vec(*sum, g) != 0,
            None => true,
        };
        if fresh {
            groups.push((Point::ORIGIN, Vec::new(), Vec::new()));
        }
        let last = groups.last_mut().unwrap();
        last.0 += g;
        if flipped {
            last.2.push(id);
        } else {
            last.1.push(id);
        }
    }
    let k = groups.len();

    // Walking the boundary toggles whole groups in order, so every vertex set
    // is a prefix of one kind of id joined with a suffix of the other.
    let chains = with_witness.then(|| {
        let prefix = |pick: fn(&Group) -> &Vec<usize>| {
            let mut out = vec![Witness::empty()];
            for g in &groups {
                let w = Witness::union(out.last().unwrap(), &Witness::leaf(pick(g).iter().copied()));
                out.push(w);
            }
            out
        };
        let suffix = |pick: fn(&Group) -> &Vec<usize>| {
            let mut out = vec![Witness::empty()];
            for g in groups.iter().rev() {
                let w = Witness::union(out.last().unwrap(), &Witness::leaf(pick(g).iter().copied()));
                out.push(w);
            }
            out.reverse();
            out
        };
        (prefix(|g| &g.1), suffix(|g| &g.1), prefix(|g| &g.2), suffix(|g| &g.2))
    });

    let mut cur = base;
    let mut vertices = vec![cur];
    let mut witnesses = chains.as_ref().map(|(_, _, _, sfl)| vec![sfl[0].clone()]);
    for step in 0..2 * k {
        let g = groups[step % k].0;
        if step < k {
            cur += g;
        } else {
            cur -= g;
        }
        if step + 1 == 2 * k {
            break;
        }
        vertices.push(cur);
        if let (Some(ws), Some((pnf, snf, pfl, sfl))) = (witnesses.as_mut(), chains.as_ref()) {
            let t = step % k + 1;
            ws.push(if step < k { Witness::union(&pnf[t], &sfl[t]) } else { Witness::union(&snf[t], &pfl[t]) });
        }
    }
    ConvexPolygon::from_canonical(vertices, witnesses)
}

/// Expression tree over polygons.
#[derive(Clone, Debug)]
pub enum PolygonFormula {
    Leaf(ConvexPolygon),
    Sum(Box<PolygonFormula>, Box<PolygonFormula>),
    Union(Box<PolygonFormula>, Box<PolygonFormula>),
    Translate { by: Point, shift: Option<Witness>, child: Box<PolygonFormula> },
}

impl PolygonFormula {
    pub fn sum(a: PolygonFormula, b: PolygonFormula) -> Self {
        PolygonFormula::Sum(Box::new(a), Box::new(b))
    }

    pub fn union(a: PolygonFormula, b: PolygonFormula) -> Self {
        PolygonFormula::Union(Box::new(a), Box::new(b))
    }

    /// Longest root-to-leaf count of binary operations. Translations are free.
    pub fn height(&self) -> usize {
        match self {
            PolygonFormula::Leaf(_) => 0,
            PolygonFormula::Sum(a, b) | PolygonFormula::Union(a, b) => 1 + a.height().max(b.height()),
            PolygonFormula::Translate { child, .. } => child.height(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            PolygonFormula::Leaf(_) => 1,
            PolygonFormula::Sum(a, b) | PolygonFormula::Union(a, b) => a.leaf_count() + b.leaf_count(),
            PolygonFormula::Translate { child, .. } => child.leaf_count(),
        }
    }

    /// Total number of vertices over all leaves.
    pub fn leaf_vertex_count(&self) -> usize {
        match self {
            PolygonFormula::Leaf(p) => p.len(),
            PolygonFormula::Sum(a, b) | PolygonFormula::Union(a, b) => a.leaf_vertex_count() + b.leaf_vertex_count(),
            PolygonFormula::Translate { child, .. } => child.leaf_vertex_count(),
        }
    }

    pub fn eval(&self) -> ConvexPolygon {
        match self {
            PolygonFormula::Leaf(p) => p.clone(),
            PolygonFormula::Sum(a, b) => minkowski_sum(&a.eval(), &b.eval()),
            PolygonFormula::Union(a, b) => hull_union(&a.eval(), &b.eval()),
            PolygonFormula::Translate { by, shift, child } => translate(&child.eval(), *by, shift.as_ref()),
        }
    }
}

/// Evaluates a formula bottom-up.
pub fn eval_formula(f: &PolygonFormula) -> ConvexPolygon {
    f.eval()
}
