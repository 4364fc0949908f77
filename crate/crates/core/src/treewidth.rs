//! Bounded-treewidth posets: a ⋓/⊕ formula over a balanced separator
//! hierarchy of a tree decomposition of the cover graph.
//!
//! Every step picks a separator bag of the live forest and branches on each
//! of its not-yet-assigned elements (in the lower set or not). Once the bag
//! is assigned, the two sub-forests left by deleting it are independent
//! given the assignment, so their polygons add. An element's weight is
//! counted by the leaf that closes the path on which the element was
//! assigned: pending elements travel to the first sub-forest only.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::polygon::{hull_union, minkowski_sum, ConvexPolygon, Point, PolygonFormula};
use crate::poset::WeightedPoset;
use crate::witness::Witness;

/// Bags of element indices joined by tree edges (a forest is accepted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreewidthLimits {
    pub max_elements: usize,
    pub max_width: usize,
}

impl Default for TreewidthLimits {
    fn default() -> Self {
        TreewidthLimits { max_elements: 24, max_width: 4 }
    }
}

impl TreeDecomposition {
    /// Largest bag size minus one (0 for no bags).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Checks the forest shape, element coverage, cover-edge coverage and
    /// connectivity of every element's bags.
    pub fn validate(&self, p: &WeightedPoset) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDecomposition(m));
        let k = self.bags.len();
        let mut uf: Vec<usize> = (0..k).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            if a >= k || b >= k {
                return bad(format!("edge ({a}, {b}) names a missing bag"));
            }
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra == rb {
                return bad("bag edges contain a cycle".into());
            }
            uf[ra] = rb;
        }
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); p.len()];
        for (i, bag) in self.bags.iter().enumerate() {
            for &e in bag {
                if e >= p.len() {
                    return bad(format!("bag {i} names element index {e}"));
                }
                if holders[e].last() == Some(&i) {
                    return bad(format!("bag {i} repeats `{}`", p.id(e)));
                }
                holders[e].push(i);
            }
        }
        let adj = self.adjacency();
        for (e, hs) in holders.iter().enumerate() {
            if hs.is_empty() {
                return bad(format!("`{}` is in no bag", p.id(e)));
            }
            // bags holding e must be connected through bags holding e
            let inside: HashSet<usize> = hs.iter().copied().collect();
            let mut seen = HashSet::from([hs[0]]);
            let mut stack = vec![hs[0]];
            while let Some(b) = stack.pop() {
                for &c in &adj[b] {
                    if inside.contains(&c) && seen.insert(c) {
                        stack.push(c);
                    }
                }
            }
            if seen.len() != hs.len() {
                return bad(format!("bags holding `{}` are not connected", p.id(e)));
            }
        }
        for &(x, y) in p.covers() {
            let hx: HashSet<usize> = holders[x].iter().copied().collect();
            if !holders[y].iter().any(|b| hx.contains(b)) {
                return bad(format!("no bag holds both `{}` and `{}`", p.id(x), p.id(y)));
            }
        }
        Ok(())
    }

    /// Removes bags contained in a neighbour (and empty bags), then splits
    /// bags of degree above three into chains of copies. Width is unchanged.
    pub fn normalize(&self, p: &WeightedPoset) -> Result<TreeDecomposition> {
        self.validate(p)?;
        let k = self.bags.len();
        let mut bags: Vec<Option<HashSet<usize>>> = self.bags.iter().map(|b| Some(b.iter().copied().collect())).collect();
        let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); k];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..k {
                let Some(bag) = bags[a].as_ref() else { continue };
                // an empty bag is a subset of any neighbour; an isolated one just goes
                let target = adj[a].iter().copied().find(|&b| bag.is_subset(bags[b].as_ref().unwrap()));
                if target.is_none() && !bag.is_empty() {
                    continue;
                }
                let nbrs: Vec<usize> = adj[a].drain().collect();
                for &c in &nbrs {
                    adj[c].remove(&a);
                }
                if let Some(b) = target {
                    for &c in &nbrs {
                        if c != b {
                            adj[c].insert(b);
                            adj[b].insert(c);
                        }
                    }
                }
                bags[a] = None;
                changed = true;
            }
        }

        let live: Vec<usize> = (0..k).filter(|&i| bags[i].is_some()).collect();
        let pos: HashMap<usize, usize> = live.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let mut out_bags: Vec<Vec<usize>> = live
            .iter()
            .map(|&b| {
                let mut v: Vec<usize> = bags[b].as_ref().unwrap().iter().copied().collect();
                v.sort_unstable();
                v
            })
            .collect();
        // each tree edge is attached to one copy of each endpoint
        let mut slot: Vec<Vec<usize>> = vec![Vec::new(); live.len()];
        let mut edges = Vec::new();
        for (i, &b) in live.iter().enumerate() {
            let mut nb: Vec<usize> = adj[b].iter().map(|c| pos[c]).collect();
            nb.sort_unstable();
            if nb.len() <= 3 {
                slot[i] = vec![i; nb.len()];
                continue;
            }
            // copies c_0 (= i), c_1, ..., c_{d-3}; c_0 and the last take two neighbours
            let d = nb.len();
            let mut copies = vec![i];
            for _ in 0..d - 3 {
                out_bags.push(out_bags[i].clone());
                let c = out_bags.len() - 1;
                edges.push((*copies.last().unwrap(), c));
                copies.push(c);
            }
            let mut s = Vec::with_capacity(d);
            for (t, _) in nb.iter().enumerate() {
                let c = match t {
                    0 | 1 => copies[0],
                    _ if t >= d - 2 => *copies.last().unwrap(),
                    _ => copies[t - 1],
                };
                s.push(c);
            }
            slot[i] = s;
        }
        for (i, &b) in live.iter().enumerate() {
            let mut nb: Vec<usize> = adj[b].iter().map(|c| pos[c]).collect();
            nb.sort_unstable();
            for (t, &j) in nb.iter().enumerate() {
                if i < j {
                    let mut nbj: Vec<usize> = adj[live[j]].iter().map(|c| pos[c]).collect();
                    nbj.sort_unstable();
                    let tj = nbj.iter().position(|&x| x == i).unwrap();
                    edges.push((slot[i][t], slot[j][tj]));
                }
            }
        }
        let td = TreeDecomposition { bags: out_bags, edges };
        debug_assert!(td.max_degree() <= 3);
        td.validate(p)?;
        Ok(td)
    }

    /// Parses `{"bags":[{"id":0,"elems":["a"]}],"edges":[[0,1]]}` against `p`.
    pub fn from_json(v: &Value, p: &WeightedPoset) -> Result<Self> {
        let parse = |m: &str| Error::Parse(m.to_string());
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut bags = Vec::new();
        for b in v.get("bags").and_then(Value::as_array).ok_or_else(|| parse("decomposition needs `bags`"))? {
            let id = b.get("id").map(Value::to_string).ok_or_else(|| parse("bag without id"))?;
            if ids.insert(id.clone(), bags.len()).is_some() {
                return Err(Error::InvalidDecomposition(format!("duplicate bag id {id}")));
            }
            let elems = b
                .get("elems")
                .and_then(Value::as_array)
                .ok_or_else(|| parse("bag without elems"))?
                .iter()
                .map(|e| p.index_of(e.as_str().ok_or_else(|| parse("element ids are strings"))?))
                .collect::<Result<Vec<_>>>()?;
            bags.push(elems);
        }
        let mut edges = Vec::new();
        for e in v.get("edges").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
            let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| parse("edges are [bag, bag] pairs"))?;
            let look = |x: &Value| ids.get(&x.to_string()).copied().ok_or_else(|| Error::InvalidDecomposition(format!("edge names unknown bag {x}")));
            edges.push((look(&pair[0])?, look(&pair[1])?));
        }
        Ok(TreeDecomposition { bags, edges })
    }

    pub fn to_json(&self, p: &WeightedPoset) -> Value {
        json!({
            "bags": self.bags.iter().enumerate().map(|(i, b)| json!({"id": i, "elems": b.iter().map(|&e| p.id(e)).collect::<Vec<_>>()})).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }
}

/// Min-degree elimination on the undirected cover graph.
pub fn greedy_tree_decomposition(p: &WeightedPoset) -> TreeDecomposition {
    greedy_graph_decomposition(p.len(), p.covers())
}

/// Min-degree elimination on an undirected graph with vertices `0..n`.
pub fn greedy_graph_decomposition(n: usize, edges: &[(usize, usize)]) -> TreeDecomposition {
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for &(x, y) in edges {
        adj[x].insert(y);
        adj[y].insert(x);
    }
    let mut gone = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut bag_of = vec![0; n];
    let mut bags = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !gone[v]).min_by_key(|&v| (adj[v].len(), v)).unwrap();
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
            adj[a].remove(&v);
        }
        let mut bag: Vec<usize> = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bag_of[v] = bags.len();
        bags.push(bag);
        gone[v] = true;
        order.push(v);
    }
    let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for &v in &order {
        // join to the bag of the earliest-eliminated remaining neighbour
        let b = bag_of[v];
        if let Some(&u) = bags[b].iter().filter(|&&u| u != v).min_by_key(|&&u| rank[&u]) {
            edges.push((b, bag_of[u]));
        }
    }
    TreeDecomposition { bags, edges }
}

/// Deletes one bag of the forest `f` so that the rest splits into two groups
/// of at most two thirds each. Returns the bag and the two groups.
pub fn split_forest(f: &[usize], adj: &[Vec<usize>]) -> (usize, Vec<usize>, Vec<usize>) {
    assert!(!f.is_empty());
    let live: HashSet<usize> = f.iter().copied().collect();
    let comps = components(f, adj, &live);
    let big = comps.iter().max_by_key(|c| c.len()).unwrap();
    let x = centroid(big, adj, &live);
    let mut rest = live.clone();
    rest.remove(&x);
    let remaining: Vec<usize> = f.iter().copied().filter(|&b| b != x).collect();
    let mut parts = components(&remaining, adj, &rest);
    parts.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let k = f.len() - 1;
    let (mut f1, mut f2) = (Vec::new(), Vec::new());
    for part in parts {
        if 3 * f1.len() < k {
            f1.extend(part);
        } else {
            f2.extend(part);
        }
    }
    (x, f1, f2)
}

fn components(f: &[usize], adj: &[Vec<usize>], live: &HashSet<usize>) -> Vec<Vec<usize>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &s in f {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &c in &adj[comp[i]] {
                if live.contains(&c) && seen.insert(c) {
                    comp.push(c);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

/// Node whose removal leaves pieces of at most half the tree.
fn centroid(tree: &[usize], adj: &[Vec<usize>], live: &HashSet<usize>) -> usize {
    let root = tree[0];
    let mut parent: HashMap<usize, usize> = HashMap::from([(root, usize::MAX)]);
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &c in &adj[v] {
            if live.contains(&c) && !parent.contains_key(&c) {
                parent.insert(c, v);
                order.push(c);
            }
        }
        i += 1;
    }
    let mut size: HashMap<usize, usize> = HashMap::new();
    for &v in order.iter().rev() {
        let s = 1 + adj[v].iter().filter(|c| parent.get(c) == Some(&v)).map(|c| size[c]).sum::<usize>();
        size.insert(v, s);
    }
    let n = order.len();
    for &v in &order {
        let heaviest_child = adj[v].iter().filter(|c| parent.get(c) == Some(&v)).map(|c| size[c]).max().unwrap_or(0);
        if 2 * heaviest_child <= n && 2 * (n - size[&v]) <= n {
            return v;
        }
    }
    unreachable!("every tree has a centroid")
}

/// Separator hierarchy: the bag chosen for a forest, the elements first met
/// there, and the hierarchies of the (up to two) remaining groups.
struct SepNode {
    fresh: Vec<usize>,
    children: Vec<SepNode>,
}

fn separator_tree(td: &TreeDecomposition, forest: Vec<usize>, adj: &[Vec<usize>], assigned: &mut FixedBitSet) -> SepNode {
    let (x, f1, f2) = split_forest(&forest, adj);
    let fresh: Vec<usize> = td.bags[x].iter().copied().filter(|&e| !assigned.contains(e)).collect();
    for &e in &fresh {
        assigned.insert(e);
    }
    let children = [f1, f2].into_iter().filter(|f| !f.is_empty()).map(|f| separator_tree(td, f, adj, assigned)).collect();
    for &e in &fresh {
        assigned.set(e, false);
    }
    SepNode { fresh, children }
}

trait Sink {
    type Out;
    fn point(&mut self, at: Point, w: Witness) -> Self::Out;
    fn union(&mut self, a: Self::Out, b: Self::Out) -> Self::Out;
    fn sum(&mut self, a: Self::Out, b: Self::Out) -> Self::Out;
}

struct FormulaSink;

impl Sink for FormulaSink {
    type Out = PolygonFormula;
    fn point(&mut self, at: Point, w: Witness) -> PolygonFormula {
        PolygonFormula::Leaf(ConvexPolygon::point(at, Some(w)))
    }
    fn union(&mut self, a: PolygonFormula, b: PolygonFormula) -> PolygonFormula {
        PolygonFormula::union(a, b)
    }
    fn sum(&mut self, a: PolygonFormula, b: PolygonFormula) -> PolygonFormula {
        PolygonFormula::sum(a, b)
    }
}

/// Evaluates on the fly, holding O(height) polygons.
struct EvalSink {
    with_witness: bool,
}

impl Sink for EvalSink {
    type Out = ConvexPolygon;
    fn point(&mut self, at: Point, w: Witness) -> ConvexPolygon {
        ConvexPolygon::point(at, self.with_witness.then_some(w))
    }
    fn union(&mut self, a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon {
        hull_union(&a, &b)
    }
    fn sum(&mut self, a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon {
        minkowski_sum(&a, &b)
    }
}

struct Walker<'a, S: Sink> {
    p: &'a WeightedPoset,
    low: FixedBitSet,
    up: FixedBitSet,
    sink: S,
}

impl<S: Sink> Walker<'_, S> {
    fn assign(&mut self, node: &SepNode, k: usize, pending: &mut Vec<usize>) -> Option<S::Out> {
        if k == node.fresh.len() {
            return Some(match node.children.as_slice() {
                [] => {
                    let at: Point = pending.iter().map(|&e| self.p.weight(e).point()).sum();
                    self.sink.point(at, Witness::leaf(pending.iter().copied()))
                }
                [only] => self.assign(only, 0, pending)?,
                [first, second] => {
                    let a = self.assign(first, 0, pending)?;
                    let b = self.assign(second, 0, &mut Vec::new())?;
                    self.sink.sum(a, b)
                }
                _ => unreachable!("separator nodes have at most two children"),
            });
        }
        let e = node.fresh[k];
        // in the lower set: nothing already excluded may lie below e
        let take = if self.up.is_disjoint(self.p.below_set(e)) {
            self.low.insert(e);
            pending.push(e);
            let r = self.assign(node, k + 1, pending);
            pending.pop();
            self.low.set(e, false);
            r
        } else {
            None
        };
        // excluded: nothing already included may lie above e
        let skip = if self.low.is_disjoint(self.p.above_set(e)) {
            self.up.insert(e);
            let r = self.assign(node, k + 1, pending);
            self.up.set(e, false);
            r
        } else {
            None
        };
        match (take, skip) {
            (Some(a), Some(b)) => Some(self.sink.union(a, b)),
            (a, b) => a.or(b),
        }
    }
}

fn prepare(p: &WeightedPoset, td: &TreeDecomposition, limits: TreewidthLimits) -> Result<Option<SepNode>> {
    if p.len() > limits.max_elements {
        return Err(Error::SizeLimit { size: p.len(), limit: limits.max_elements });
    }
    if td.width() > limits.max_width {
        return Err(Error::WidthLimit { width: td.width(), limit: limits.max_width });
    }
    let norm = td.normalize(p)?;
    if norm.bags.is_empty() {
        return Ok(None);
    }
    let adj = norm.adjacency();
    let all: Vec<usize> = (0..norm.bags.len()).collect();
    let mut assigned = FixedBitSet::with_capacity(p.len());
    Ok(Some(separator_tree(&norm, all, &adj, &mut assigned)))
}

fn walk<S: Sink>(p: &WeightedPoset, root: Option<SepNode>, sink: S) -> S::Out {
    let mut w = Walker { p, low: FixedBitSet::with_capacity(p.len()), up: FixedBitSet::with_capacity(p.len()), sink };
    match root {
        // no elements: only the empty set
        None => w.sink.point(Point::ORIGIN, Witness::empty()),
        Some(root) => {
            let out = w.assign(&root, 0, &mut Vec::new());
            out.expect("the all-excluded assignment is always feasible")
        }
    }
}

/// Formula whose value is the hull of all lower-set projections.
pub fn build_formula(p: &WeightedPoset, td: &TreeDecomposition) -> Result<PolygonFormula> {
    build_formula_with(p, td, TreewidthLimits::default())
}

pub fn build_formula_with(p: &WeightedPoset, td: &TreeDecomposition, limits: TreewidthLimits) -> Result<PolygonFormula> {
    let root = prepare(p, td, limits)?;
    Ok(walk(p, root, FormulaSink))
}

pub fn solve_treewidth(p: &WeightedPoset, td: &TreeDecomposition) -> Result<ConvexPolygon> {
    solve_treewidth_with(p, td, TreewidthLimits::default(), true)
}

/// Streams the formula, combining polygons as soon as both operands exist.
pub fn solve_treewidth_with(p: &WeightedPoset, td: &TreeDecomposition, limits: TreewidthLimits, with_witness: bool) -> Result<ConvexPolygon> {
    let root = prepare(p, td, limits)?;
    Ok(walk(p, root, EvalSink { with_witness }))
}

/// `(w + 2) (log_{3/2} n + 4)` for `n >= 1`.
pub fn height_bound(width: usize, n: usize) -> f64 {
    (width as f64 + 2.0) * ((n.max(1) as f64).ln() / 1.5f64.ln() + 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{ParamWeight, ORACLE_LIMIT};

    fn poset(weights: &[(i64, i64)], rels: &[(usize, usize)]) -> WeightedPoset {
        WeightedPoset::from_indices(weights.iter().map(|&w| w.into()).collect(), rels).unwrap()
    }

    fn path_adj(k: usize) -> Vec<Vec<usize>> {
        (0..k).map(|i| [i.checked_sub(1), (i + 1 < k).then_some(i + 1)].into_iter().flatten().collect()).collect()
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_forest(&[0], &[vec![]]), (0, vec![], vec![]));
        let (x, a, b) = split_forest(&[0, 1, 2], &path_adj(3));
        assert_eq!((x, a.len(), b.len()), (1, 1, 1));
    }

    #[test]
    fn split_random_trees_within_two_thirds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let k = rng.gen_range(1..=60);
            let mut adj = vec![Vec::new(); k];
            let mut deg = vec![0; k];
            for v in 1..k {
                // random parent with degree below three
                let mut u = rng.gen_range(0..v);
                while deg[u] >= 3 {
                    u = rng.gen_range(0..v);
                }
                deg[u] += 1;
                deg[v] += 1;
                adj[u].push(v);
                adj[v].push(u);
            }
            // drop a random edge sometimes to get a forest
            let f: Vec<usize> = (0..k).collect();
            let (x, f1, f2) = split_forest(&f, &adj);
            let bound = (2 * k).div_ceil(3);
            assert!(f1.len() <= bound && f2.len() <= bound, "k={k}: {} {}", f1.len(), f2.len());
            let mut all: Vec<usize> = f1.iter().chain(&f2).copied().chain([x]).collect();
            all.sort_unstable();
            assert_eq!(all, f);
            // no tree edge between the groups
            let s1: HashSet<usize> = f1.iter().copied().collect();
            for &b in &f2 {
                assert!(adj[b].iter().all(|c| !s1.contains(c)));
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let p = poset(&[(1, 0); 4], &[(0, 1), (1, 2), (2, 3)]);
        let path = TreeDecomposition { bags: vec![vec![0, 1], vec![1, 2], vec![2, 3]], edges: vec![(0, 1), (1, 2)] };
        assert_eq!(path.normalize(&p).unwrap(), path);

        // star: centre {0} plus five leaves {0, i}; the centre is contracted away,
        // so use a centre that is not a subset of any leaf
        let p = poset(&[(1, 0); 6], &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let star = TreeDecomposition {
            bags: vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4], vec![0, 5]],
            edges: (1..6).map(|i| (0, i)).collect(),
        };
        let norm = star.normalize(&p).unwrap();
        assert!(norm.max_degree() <= 3);
        assert_eq!(norm.width(), 1);

        let p = poset(&[(1, 0); 7], &[]);
        let star = TreeDecomposition {
            bags: vec![vec![0, 6], vec![1, 6], vec![2, 6], vec![3, 6], vec![4, 6], vec![5, 6]],
            edges: (1..6).map(|i| (0, i)).collect(),
        };
        let norm = star.normalize(&p).unwrap();
        assert!(norm.max_degree() <= 3);
        assert!(norm.bags.len() > 6);
        assert_eq!(norm.width(), 1);
    }

    #[test]
    fn invalid_decompositions_are_rejected() {
        let p = poset(&[(1, 0); 3], &[(0, 1), (1, 2)]);
        let missing_edge = TreeDecomposition { bags: vec![vec![0, 1], vec![2]], edges: vec![(0, 1)] };
        assert!(matches!(missing_edge.validate(&p), Err(Error::InvalidDecomposition(_))));
        let disconnected = TreeDecomposition { bags: vec![vec![0, 1], vec![2], vec![1, 2]], edges: vec![(0, 1), (1, 2)] };
        assert!(matches!(disconnected.validate(&p), Err(Error::InvalidDecomposition(_))));
        let cyc = TreeDecomposition { bags: vec![vec![0, 1], vec![1, 2]], edges: vec![(0, 1), (1, 0)] };
        assert!(cyc.validate(&p).is_err());
    }

    #[test]
    fn greedy_examples() {
        let tree = poset(&[(1, 0); 5], &[(0, 1), (0, 2), (2, 3), (2, 4)]);
        let td = greedy_tree_decomposition(&tree);
        td.validate(&tree).unwrap();
        assert_eq!(td.width(), 1);
        let edge = poset(&[(1, 0); 2], &[(0, 1)]);
        assert_eq!(greedy_tree_decomposition(&edge).width(), 1);
        let k4: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        assert_eq!(greedy_graph_decomposition(4, &k4).width(), 3);
        let crown = poset(&[(1, 0); 4], &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        let td = greedy_tree_decomposition(&crown);
        td.validate(&crown).unwrap();
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn formula_examples() {
        let anti = poset(&[(1, 0), (0, 1)], &[]);
        let one_bag = TreeDecomposition { bags: vec![vec![0, 1]], edges: vec![] };
        let f = build_formula(&anti, &one_bag).unwrap();
        assert_eq!(f.eval(), crate::polygon::segment_zonotope(&[(Point::new(1, 0), 0), (Point::new(0, 1), 1)], false));

        let chain = poset(&[(1, 0), (0, 1)], &[(0, 1)]);
        let f = build_formula(&chain, &one_bag).unwrap();
        // b in without a is infeasible: only three lower sets
        assert_eq!(f.eval().vertices(), &[Point::new(0, 0), Point::new(1, 0), Point::new(1, 1)]);
        assert_eq!(f.leaf_count(), 3);

        let path = poset(&[(2, -1), (-1, 3), (1, 1)], &[(0, 1), (1, 2)]);
        let td = TreeDecomposition { bags: vec![vec![0, 1], vec![1, 2]], edges: vec![(0, 1)] };
        let got = solve_treewidth(&path, &td).unwrap();
        let prefix = [(0, 0), (2, -1), (1, 2), (2, 3)].map(|(x, y)| Point::new(x, y));
        assert_eq!(got, crate::polygon::hull_of_plain_points(&prefix));
    }

    #[test]
    fn incidence_of_four_cycle_matches_oracle() {
        use crate::poset::{incidence_poset, GraphEdge, WeightedGraph};
        let vs = ["p", "q", "r", "s"];
        let g = WeightedGraph {
            vertices: vs.iter().map(|v| (v.to_string(), ParamWeight::new(1, -2))).collect(),
            edges: (0..4)
                .map(|i| GraphEdge { id: format!("e{i}"), ends: [vs[i].to_string(), vs[(i + 1) % 4].to_string()], weight: ParamWeight::new(-1, 3) })
                .collect(),
        };
        let p = incidence_poset(&g).unwrap();
        assert_eq!(p.len(), 8);
        let td = greedy_tree_decomposition(&p);
        assert!(td.width() <= 3);
        let got = solve_treewidth(&p, &td).unwrap();
        assert_eq!(got, p.oracle_polygon(ORACLE_LIMIT).unwrap());
        for (v, w) in got.vertices().iter().zip(got.witnesses().unwrap()) {
            let m = w.expand();
            assert!(p.is_lower_set(&m));
            assert_eq!(p.project(&m).unwrap(), *v);
        }
    }

    #[test]
    fn limits_are_enforced() {
        let p = poset(&[(1, 0); 25], &[]);
        let td = greedy_tree_decomposition(&p);
        assert!(matches!(solve_treewidth(&p, &td), Err(Error::SizeLimit { .. })));
        let p = poset(&[(1, 0); 6], &[]);
        let wide = TreeDecomposition { bags: vec![(0..6).collect()], edges: vec![] };
        assert!(matches!(solve_treewidth(&p, &wide), Err(Error::WidthLimit { .. })));
    }

    #[test]
    fn empty_poset() {
        let p = poset(&[], &[]);
        let td = TreeDecomposition { bags: vec![], edges: vec![] };
        assert_eq!(solve_treewidth(&p, &td).unwrap().vertices(), &[Point::ORIGIN]);
    }
}
