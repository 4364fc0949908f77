//! Weighted partial orders, lower sets, and the brute-force oracle.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::polygon::{hull_of_points, ConvexPolygon, Point};
use crate::witness::Witness;

/// Largest accepted magnitude of a weight component.
pub const WEIGHT_LIMIT: i64 = 1_000_000;
/// Largest accepted number of elements; with [`WEIGHT_LIMIT`] every subset sum fits in `i64`.
pub const SIZE_LIMIT: usize = 1_000_000;
/// Default cap on brute-force enumeration.
pub const ORACLE_LIMIT: usize = 20;

/// Linear weight `a * lambda + b`; projects to the point `(a, b)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamWeight {
    pub a: i64,
    pub b: i64,
}

impl ParamWeight {
    pub const fn new(a: i64, b: i64) -> Self {
        ParamWeight { a, b }
    }

    pub fn point(self) -> Point {
        Point::new(self.a, self.b)
    }

    pub(crate) fn check(self, id: &str) -> Result<Self> {
        for value in [self.a, self.b] {
            if value.abs() > WEIGHT_LIMIT {
                return Err(Error::WeightOutOfRange { id: id.to_string(), value, limit: WEIGHT_LIMIT });
            }
        }
        Ok(self)
    }
}

impl From<(i64, i64)> for ParamWeight {
    fn from((a, b): (i64, i64)) -> Self {
        ParamWeight { a, b }
    }
}

/// Downward-closed set of element indices, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LowerSet {
    pub members: Vec<usize>,
}

/// A finite poset with integer linear weights.
///
/// Comparability is stored as transitively closed bitset rows, so
/// [`WeightedPoset::is_below`] is O(1).
#[derive(Clone, Debug)]
pub struct WeightedPoset {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<ParamWeight>,
    covers: Vec<(usize, usize)>,
    below: Vec<FixedBitSet>,
    above: Vec<FixedBitSet>,
    topo: Vec<usize>,
}

impl WeightedPoset {
    /// Builds a poset from named elements and any set of order pairs `(lower, upper)`.
    pub fn new<S: AsRef<str>>(elements: Vec<(String, ParamWeight)>, relations: &[(S, S)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, (id, w)) in elements.iter().enumerate() {
            w.check(id)?;
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownId(s.to_string()));
        let rels = relations
            .iter()
            .map(|(x, y)| Ok((lookup(x.as_ref())?, lookup(y.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        let (ids, weights) = elements.into_iter().unzip();
        Self::assemble(ids, index, weights, &rels)
    }

    /// Builds a poset from weights and index pairs; ids become `"0"`, `"1"`, ...
    pub fn from_indices(weights: Vec<ParamWeight>, relations: &[(usize, usize)]) -> Result<Self> {
        let ids: Vec<String> = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::from_parts(ids, weights, relations)
    }

    /// Named elements with index pairs.
    pub fn from_parts(ids: Vec<String>, weights: Vec<ParamWeight>, relations: &[(usize, usize)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            weights[i].check(id)?;
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        if let Some(&(x, y)) = relations.iter().find(|&&(x, y)| x >= ids.len() || y >= ids.len()) {
            return Err(Error::BadIndex(x.max(y)));
        }
        Self::assemble(ids, index, weights, relations)
    }

    fn assemble(
        ids: Vec<String>,
        index: HashMap<String, usize>,
        weights: Vec<ParamWeight>,
        rels: &[(usize, usize)],
    ) -> Result<Self> {
        let n = ids.len();
        if n > SIZE_LIMIT {
            return Err(Error::SizeLimit { size: n, limit: SIZE_LIMIT });
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(x, y) in rels {
            preds[y].push(x);
            succs[x].push(y);
        }
        let topo = topological_order(&preds, &succs).map_err(|cycle| Error::Cycle(cycle.iter().map(|&i| ids[i].clone()).collect()))?;

        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for &y in &topo {
            let mut row = FixedBitSet::with_capacity(n);
            for &x in &preds[y] {
                row.union_with(&below[x]);
                row.insert(x);
            }
            below[y] = row;
        }
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for (y, row) in below.iter().enumerate() {
            for x in row.ones() {
                above[x].insert(y);
            }
        }
        let mut covers: Vec<(usize, usize)> = rels
            .iter()
            .copied()
            .filter(|&(x, y)| above[x].intersection(&below[y]).next().is_none())
            .collect();
        covers.sort_unstable();
        covers.dedup();
        Ok(WeightedPoset { ids, index, weights, covers, below, above, topo })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn weights(&self) -> &[ParamWeight] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> ParamWeight {
        self.weights[i]
    }

    /// Covering pairs `(lower, upper)`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// A fixed linear extension.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Strictly-below set of `y`.
    pub fn below_set(&self, y: usize) -> &FixedBitSet {
        &self.below[y]
    }

    /// Strictly-above set of `x`.
    pub fn above_set(&self, x: usize) -> &FixedBitSet {
        &self.above[x]
    }

    /// `x < y` by index.
    #[inline]
    pub fn less(&self, x: usize, y: usize) -> bool {
        self.below[y].contains(x)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        x == y || self.less(x, y) || self.less(y, x)
    }

    /// `x < y` by id.
    pub fn is_below(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.less(self.index_of(x)?, self.index_of(y)?))
    }

    /// True iff `members` is downward closed.
    pub fn is_lower_set(&self, members: &[usize]) -> bool {
        let mut set = FixedBitSet::with_capacity(self.len());
        for &m in members {
            if m >= self.len() {
                return false;
            }
            set.insert(m);
        }
        members.iter().all(|&m| self.below[m].is_subset(&set))
    }

    /// Every lower set exactly once, by branching on a fixed topological order.
    pub fn enumerate_lower_sets(&self, limit: usize) -> Result<Vec<LowerSet>> {
        if self.len() > limit {
            return Err(Error::SizeLimit { size: self.len(), limit });
        }
        let mut out = Vec::new();
        let mut taken = Vec::new();
        let mut forbidden = FixedBitSet::with_capacity(self.len());
        self.branch(0, &mut taken, &mut forbidden, &mut out);
        Ok(out)
    }

    fn branch(&self, k: usize, taken: &mut Vec<usize>, forbidden: &mut FixedBitSet, out: &mut Vec<LowerSet>) {
        if k == self.topo.len() {
            let mut members = taken.clone();
            members.sort_unstable();
            out.push(LowerSet { members });
            return;
        }
        let e = self.topo[k];
        if forbidden.contains(e) {
            self.branch(k + 1, taken, forbidden, out);
            return;
        }
        // skip e: all successors become forbidden
        let saved = forbidden.clone();
        forbidden.union_with(&self.above[e]);
        self.branch(k + 1, taken, forbidden, out);
        *forbidden = saved;
        // take e: its predecessors were all taken, or e would be forbidden
        taken.push(e);
        self.branch(k + 1, taken, forbidden, out);
        taken.pop();
    }

    /// Sum of member weights.
    pub fn project(&self, members: &[usize]) -> Result<Point> {
        members
            .iter()
            .map(|&m| self.weights.get(m).map(|w| w.point()).ok_or(Error::BadIndex(m)))
            .sum::<Result<Point>>()
    }

    /// Sum of member weights, by id.
    pub fn project_ids<S: AsRef<str>>(&self, members: &[S]) -> Result<Point> {
        let idx = members.iter().map(|s| self.index_of(s.as_ref())).collect::<Result<Vec<_>>>()?;
        self.project(&idx)
    }

    /// Hull of the projections of all lower sets, by enumeration.
    pub fn oracle_polygon(&self, limit: usize) -> Result<ConvexPolygon> {
        let sets = self.enumerate_lower_sets(limit)?;
        let pts: Vec<(Point, Witness)> = sets
            .iter()
            .map(|s| (self.project(&s.members).expect("indices in range"), Witness::leaf(s.members.iter().copied())))
            .collect();
        Ok(hull_of_points(&pts))
    }

    /// Expanded witness as element ids.
    pub fn witness_ids(&self, w: &Witness) -> Vec<String> {
        w.expand().into_iter().map(|i| self.ids[i].clone()).collect()
    }
}

/// Kahn's algorithm; on failure returns one directed cycle.
fn topological_order(preds: &[Vec<usize>], succs: &[Vec<usize>]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = preds.len();
    let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = ready.pop() {
        order.push(x);
        for &y in &succs[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                ready.push(y);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover node has a leftover predecessor; walk backwards until a repeat.
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut cur = (0..n).find(|&i| indeg[i] > 0).expect("leftover node");
    while seen[cur] == usize::MAX {
        seen[cur] = path.len();
        path.push(cur);
        cur = *preds[cur].iter().find(|&&p| indeg[p] > 0).expect("leftover predecessor");
    }
    let mut cycle = path[seen[cur]..].to_vec();
    cycle.reverse();
    Err(cycle)
}

/// Undirected graph with weighted vertices and edges.
#[derive(Clone, Debug, Default)]
pub struct WeightedGraph {
    pub vertices: Vec<(String, ParamWeight)>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Clone, Debug)]
pub struct GraphEdge {
    pub id: String,
    pub ends: [String; 2],
    pub weight: ParamWeight,
}

/// Poset on vertices and edges with `v < e` whenever `v` is an endpoint of `e`.
pub fn incidence_poset(graph: &WeightedGraph) -> Result<WeightedPoset> {
    let known: HashMap<&str, ()> = graph.vertices.iter().map(|(id, _)| (id.as_str(), ())).collect();
    let mut elements = graph.vertices.clone();
    let mut relations = Vec::with_capacity(2 * graph.edges.len());
    for e in &graph.edges {
        for end in &e.ends {
            if !known.contains_key(end.as_str()) {
                return Err(Error::UnknownId(end.clone()));
            }
            relations.push((end.clone(), e.id.clone()));
        }
        elements.push((e.id.clone(), e.weight));
    }
    WeightedPoset::new(elements, &relations)
}
