//! Series-parallel orders and rooted-tree orders.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::polygon::{hull_of_points, ConvexPolygon, Point};
use crate::poset::{ParamWeight, WeightedPoset, SIZE_LIMIT};
use crate::splay::{SplayPolygon, SplayStats};
use crate::witness::Witness;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SPNode {
    /// Element index.
    Leaf(usize),
    /// Everything on the left lies below everything on the right.
    Series(usize, usize),
    Parallel(usize, usize),
}

/// Binary decomposition tree stored as an arena; children precede parents
/// and the last node is the root.
#[derive(Clone, Debug, Default)]
pub struct SPTree {
    nodes: Vec<SPNode>,
    used: Vec<bool>,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<ParamWeight>,
    count: Vec<usize>,
    total: Vec<Point>,
}

impl SPTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_leaf(&mut self, id: impl Into<String>, weight: ParamWeight) -> Result<usize> {
        let id = id.into();
        weight.check(&id)?;
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        if self.ids.len() >= SIZE_LIMIT {
            return Err(Error::SizeLimit { size: self.ids.len() + 1, limit: SIZE_LIMIT });
        }
        let e = self.ids.len();
        self.index.insert(id.clone(), e);
        self.ids.push(id);
        self.weights.push(weight);
        Ok(self.push(SPNode::Leaf(e), 1, weight.point()))
    }

    pub fn add_series(&mut self, left: usize, right: usize) -> Result<usize> {
        self.claim(left, right)?;
        Ok(self.push(SPNode::Series(left, right), self.count[left] + self.count[right], self.total[left] + self.total[right]))
    }

    pub fn add_parallel(&mut self, left: usize, right: usize) -> Result<usize> {
        self.claim(left, right)?;
        Ok(self.push(SPNode::Parallel(left, right), self.count[left] + self.count[right], self.total[left] + self.total[right]))
    }

    /// Right-leaning chain over `parts`, which must be nonempty.
    pub fn add_series_all(&mut self, parts: &[usize]) -> Result<usize> {
        self.fold(parts, Self::add_series)
    }

    pub fn add_parallel_all(&mut self, parts: &[usize]) -> Result<usize> {
        self.fold(parts, Self::add_parallel)
    }

    fn fold(&mut self, parts: &[usize], op: fn(&mut Self, usize, usize) -> Result<usize>) -> Result<usize> {
        let (&last, rest) = parts.split_last().ok_or_else(|| Error::Parse("empty composition".into()))?;
        let mut acc = last;
        for &p in rest.iter().rev() {
            acc = op(self, p, acc)?;
        }
        Ok(acc)
    }

    fn claim(&mut self, left: usize, right: usize) -> Result<()> {
        for c in [left, right] {
            if c >= self.nodes.len() || self.used[c] || left == right {
                return Err(Error::Parse(format!("node {c} is missing or already has a parent")));
            }
        }
        self.used[left] = true;
        self.used[right] = true;
        Ok(())
    }

    fn push(&mut self, node: SPNode, count: usize, total: Point) -> usize {
        self.nodes.push(node);
        self.used.push(false);
        self.count.push(count);
        self.total.push(total);
        self.nodes.len() - 1
    }

    /// Same shape with every element weight replaced by `f(weight)`.
    pub fn map_weights(&self, f: impl Fn(ParamWeight) -> ParamWeight) -> Result<SPTree> {
        let mut t = self.clone();
        for (e, w) in t.weights.iter_mut().enumerate() {
            *w = f(*w).check(&t.ids[e])?;
        }
        for v in 0..t.nodes.len() {
            t.total[v] = match t.nodes[v] {
                SPNode::Leaf(e) => t.weights[e].point(),
                SPNode::Series(l, r) | SPNode::Parallel(l, r) => t.total[l] + t.total[r],
            };
        }
        Ok(t)
    }

    pub fn nodes(&self) -> &[SPNode] {
        &self.nodes
    }

    pub fn root(&self) -> Option<usize> {
        self.nodes.len().checked_sub(1)
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[ParamWeight] {
        &self.weights
    }

    /// Elements below node `v`.
    pub fn subtree_count(&self, v: usize) -> usize {
        self.count[v]
    }

    /// Weight sum below node `v`.
    pub fn subtree_total(&self, v: usize) -> Point {
        self.total[v]
    }

    fn check_single_root(&self) -> Result<()> {
        let roots = self.used.iter().filter(|u| !**u).count();
        if roots > 1 {
            return Err(Error::Parse(format!("decomposition has {roots} disconnected parts")));
        }
        Ok(())
    }

    /// Explicit poset with the same lower sets; element `k` is leaf `k`.
    pub fn to_poset(&self) -> Result<WeightedPoset> {
        self.check_single_root()?;
        // minimal and maximal elements of each subtree
        let mut mins: Vec<Vec<usize>> = Vec::with_capacity(self.nodes.len());
        let mut maxs: Vec<Vec<usize>> = Vec::with_capacity(self.nodes.len());
        let mut rels = Vec::new();
        for node in &self.nodes {
            let (lo, hi) = match *node {
                SPNode::Leaf(e) => (vec![e], vec![e]),
                SPNode::Series(l, r) => {
                    for &a in &maxs[l] {
                        for &b in &mins[r] {
                            rels.push((a, b));
                        }
                    }
                    (mins[l].clone(), maxs[r].clone())
                }
                SPNode::Parallel(l, r) => ([&mins[l][..], &mins[r][..]].concat(), [&maxs[l][..], &maxs[r][..]].concat()),
            };
            mins.push(lo);
            maxs.push(hi);
        }
        WeightedPoset::from_parts(self.ids.clone(), self.weights.clone(), &rels)
    }

    /// Nested JSON with same-kind chains flattened into lists.
    pub fn to_json(&self) -> Value {
        let mut out: Vec<Option<Value>> = vec![None; self.nodes.len()];
        for (v, node) in self.nodes.iter().enumerate() {
            let value = match *node {
                SPNode::Leaf(e) => json!({"leaf": {"id": self.ids[e], "weight": [self.weights[e].a, self.weights[e].b]}}),
                SPNode::Series(l, r) | SPNode::Parallel(l, r) => {
                    let key = if matches!(node, SPNode::Series(..)) { "series" } else { "parallel" };
                    let mut items = Vec::new();
                    for c in [l, r] {
                        match out[c].take() {
                            Some(Value::Object(mut m)) if m.contains_key(key) => {
                                if let Some(Value::Array(a)) = m.remove(key) {
                                    items.extend(a);
                                }
                            }
                            Some(other) => items.push(other),
                            None => unreachable!("child serialized twice"),
                        }
                    }
                    json!({ key: items })
                }
            };
            out[v] = Some(value);
        }
        out.pop().flatten().unwrap_or_else(|| json!({"series": []}))
    }
}

/// Parses `{"leaf":{"id":..,"weight":[a,b]}}`, `{"series":[..]}` and
/// `{"parallel":[..]}`; lists are binarized right-leaning.
pub fn parse_sp(text: &str) -> Result<SPTree> {
    let value: Value = serde_json::from_str(text)?;
    sp_from_value(&value)
}

pub fn sp_from_value(value: &Value) -> Result<SPTree> {
    let mut tree = SPTree::new();
    if value.get("series").and_then(Value::as_array).is_some_and(Vec::is_empty) {
        return Ok(tree);
    }
    // explicit post-order: (node, children already pushed?)
    let mut stack: Vec<(&Value, bool)> = vec![(value, false)];
    let mut done: Vec<usize> = Vec::new();
    while let Some((v, expanded)) = stack.pop() {
        let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| Error::Parse(format!("malformed node {v}")))?;
        let (key, body) = obj.iter().next().unwrap();
        match key.as_str() {
            "leaf" => {
                let id = body.get("id").and_then(Value::as_str).ok_or_else(|| Error::Parse(format!("leaf without id: {v}")))?;
                let w = parse_weight(body.get("weight"))?;
                done.push(tree.add_leaf(id, w)?);
            }
            "series" | "parallel" => {
                let items = body.as_array().filter(|a| !a.is_empty()).ok_or_else(|| Error::Parse(format!("empty {key}")))?;
                if expanded {
                    let parts = done.split_off(done.len() - items.len());
                    let node = if key == "series" { tree.add_series_all(&parts)? } else { tree.add_parallel_all(&parts)? };
                    done.push(node);
                } else {
                    stack.push((v, true));
                    for item in items.iter().rev() {
                        stack.push((item, false));
                    }
                }
            }
            other => return Err(Error::Parse(format!("unknown node kind `{other}`"))),
        }
    }
    Ok(tree)
}

pub(crate) fn parse_weight(v: Option<&Value>) -> Result<ParamWeight> {
    let arr = v.and_then(Value::as_array).filter(|a| a.len() == 2).ok_or_else(|| Error::Parse("weight must be [a, b]".into()))?;
    let get = |x: &Value| x.as_i64().ok_or_else(|| Error::Parse(format!("weight component {x} is not an integer")));
    Ok(ParamWeight::new(get(&arr[0])?, get(&arr[1])?))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SpStats {
    pub splay: SplayStats,
    pub merges: usize,
}

pub fn solve_sp(t: &SPTree) -> Result<ConvexPolygon> {
    Ok(solve_sp_with(t, true)?.0)
}

/// Bottom-up evaluation with splay polygons, smaller merged into larger.
pub fn solve_sp_with(t: &SPTree, with_witness: bool) -> Result<(ConvexPolygon, SpStats)> {
    t.check_single_root()?;
    let mut stats = SpStats::default();
    if t.nodes.is_empty() {
        let w = with_witness.then(Witness::empty);
        return Ok((ConvexPolygon::point(Point::ORIGIN, w), stats));
    }
    let mut polys: Vec<Option<SplayPolygon>> = Vec::with_capacity(t.nodes.len());
    let mut all: Vec<Witness> = Vec::with_capacity(if with_witness { t.nodes.len() } else { 0 });
    for (v, node) in t.nodes.iter().enumerate() {
        let p = match *node {
            SPNode::Leaf(e) => {
                if with_witness {
                    all.push(Witness::single(e));
                }
                let mut seg = hull_of_points(&[(Point::ORIGIN, Witness::empty()), (t.weights[e].point(), Witness::single(e))]);
                if !with_witness {
                    seg = seg.without_witnesses();
                }
                SplayPolygon::from_polygon(&seg)
            }
            SPNode::Parallel(l, r) => {
                if with_witness {
                    all.push(Witness::union(&all[l], &all[r]));
                }
                stats.merges += 1;
                take(&mut polys, l).merge_minkowski(take(&mut polys, r))
            }
            SPNode::Series(l, r) => {
                let mut upper = take(&mut polys, r);
                upper.translate(t.total[l], if with_witness { Some(&all[l]) } else { None });
                if with_witness {
                    all.push(Witness::union(&all[l], &all[r]));
                }
                stats.merges += 1;
                take(&mut polys, l).merge_union(upper)
            }
        };
        debug_assert_eq!(polys.len(), v);
        polys.push(Some(p));
    }
    let root = polys.pop().flatten().expect("root polygon");
    stats.splay = root.stats();
    Ok((root.to_polygon(), stats))
}

fn take(polys: &mut [Option<SplayPolygon>], i: usize) -> SplayPolygon {
    polys[i].take().expect("each subtree is merged once")
}

/// Edge of a rooted tree; the poset elements are the edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub id: String,
    pub parent: String,
    pub child: String,
    pub weight: ParamWeight,
}

/// Rooted tree whose root-containing subtrees are the lower sets of its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    pub root: String,
    pub edges: Vec<TreeEdge>,
}

impl RootedTree {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let root = v.get("root").and_then(Value::as_str).ok_or_else(|| Error::Parse("tree needs a root".into()))?.to_string();
        let edges = v
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("tree needs an edge list".into()))?
            .iter()
            .map(|e| {
                let s = |k: &str| e.get(k).and_then(Value::as_str).map(str::to_string).ok_or_else(|| Error::Parse(format!("tree edge without `{k}`")));
                Ok(TreeEdge { id: s("id")?, parent: s("from")?, child: s("to")?, weight: parse_weight(e.get("weight"))? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RootedTree { root, edges })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "root": self.root,
            "edges": self.edges.iter().map(|e| json!({"id": e.id, "from": e.parent, "to": e.child, "weight": [e.weight.a, e.weight.b]})).collect::<Vec<_>>(),
        })
    }

    /// Each vertex becomes the parallel composition, over its child edges `e`,
    /// of `e` in series below the subtree hanging from `e`.
    pub fn to_sp(&self) -> Result<SPTree> {
        let mut children: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut has_parent: HashMap<&str, &str> = HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.child == self.root {
                return Err(Error::Parse(format!("edge `{}` enters the root", e.id)));
            }
            if has_parent.insert(&e.child, &e.id).is_some() {
                return Err(Error::Parse(format!("vertex `{}` has two parents", e.child)));
            }
            children.entry(&e.parent).or_default().push(k);
        }
        // preorder from the root
        let mut order = Vec::with_capacity(self.edges.len());
        let mut stack = vec![self.root.as_str()];
        while let Some(v) = stack.pop() {
            for &k in children.get(v).map(Vec::as_slice).unwrap_or(&[]) {
                order.push(k);
                stack.push(&self.edges[k].child);
            }
        }
        if order.len() != self.edges.len() {
            return Err(Error::Parse("tree edges are not all reachable from the root".into()));
        }
        let mut tree = SPTree::new();
        let mut hanging: HashMap<&str, usize> = HashMap::new();
        for &k in order.iter().rev() {
            let e = &self.edges[k];
            let mut below: Vec<usize> = Vec::new();
            for &c in children.get(e.child.as_str()).map(Vec::as_slice).unwrap_or(&[]) {
                below.push(hanging.remove(self.edges[c].id.as_str()).expect("child edge built first"));
            }
            let leaf = tree.add_leaf(e.id.clone(), e.weight)?;
            let node = if below.is_empty() {
                leaf
            } else {
                let par = tree.add_parallel_all(&below)?;
                tree.add_series(leaf, par)?
            };
            hanging.insert(&e.id, node);
        }
        let tops: Vec<usize> = children.get(self.root.as_str()).map(Vec::as_slice).unwrap_or(&[]).iter().map(|&k| hanging[self.edges[k].id.as_str()]).collect();
        if !tops.is_empty() {
            tree.add_parallel_all(&tops)?;
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::ORACLE_LIMIT;

    fn leaf(t: &mut SPTree, id: &str, a: i64, b: i64) -> usize {
        t.add_leaf(id, ParamWeight::new(a, b)).unwrap()
    }

    #[test]
    fn parse_examples() {
        let t = parse_sp(r#"{"leaf":{"id":"a","weight":[1,0]}}"#).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.nodes(), &[SPNode::Leaf(0)]);
        let t = parse_sp(r#"{"series":[{"leaf":{"id":"a","weight":[1,0]}},{"leaf":{"id":"b","weight":[0,1]}}]}"#).unwrap();
        assert_eq!(t.subtree_count(t.root().unwrap()), 2);
        let t = parse_sp(
            r#"{"series":[{"leaf":{"id":"a","weight":[1,0]}},{"leaf":{"id":"b","weight":[0,1]}},{"leaf":{"id":"c","weight":[2,2]}}]}"#,
        )
        .unwrap();
        assert_eq!(t.nodes()[3..], [SPNode::Series(1, 2), SPNode::Series(0, 3)]);
        assert!(matches!(parse_sp(r#"{"leaf":{"id":"a"}}"#), Err(Error::Parse(_))));
        assert!(matches!(
            parse_sp(r#"{"parallel":[{"leaf":{"id":"a","weight":[1,0]}},{"leaf":{"id":"a","weight":[0,1]}}]}"#),
            Err(Error::DuplicateId(_))
        ));
        assert!(matches!(parse_sp(r#"{"loop":[]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"series":[{"parallel":[{"leaf":{"id":"a","weight":[1,0]}},{"leaf":{"id":"b","weight":[0,1]}},{"leaf":{"id":"x","weight":[3,3]}}]},{"leaf":{"id":"c","weight":[-1,2]}}]}"#;
        let t = parse_sp(text).unwrap();
        let v: Value = serde_json::from_str(text).unwrap();
        assert_eq!(t.to_json(), v);
    }

    #[test]
    fn to_poset_examples() {
        let mut t = SPTree::new();
        let (a, b) = (leaf(&mut t, "a", 1, 0), leaf(&mut t, "b", 0, 1));
        t.add_parallel(a, b).unwrap();
        assert!(t.to_poset().unwrap().covers().is_empty());

        let mut t = SPTree::new();
        let (a, b) = (leaf(&mut t, "a", 1, 0), leaf(&mut t, "b", 0, 1));
        t.add_series(a, b).unwrap();
        assert_eq!(t.to_poset().unwrap().covers(), &[(0, 1)]);

        let mut t = SPTree::new();
        let (a, b) = (leaf(&mut t, "a", 1, 0), leaf(&mut t, "b", 0, 1));
        let p = t.add_parallel(a, b).unwrap();
        let c = leaf(&mut t, "c", 1, 1);
        t.add_series(p, c).unwrap();
        let poset = t.to_poset().unwrap();
        assert!(poset.less(0, 2) && poset.less(1, 2) && !poset.comparable(0, 1));
    }

    #[test]
    fn solve_examples() {
        let mut t = SPTree::new();
        let (a, b) = (leaf(&mut t, "a", 1, 0), leaf(&mut t, "b", 0, 1));
        t.add_parallel(a, b).unwrap();
        let sq = solve_sp(&t).unwrap();
        assert_eq!(sq.vertices(), &[Point::new(0, 0), Point::new(1, 0), Point::new(1, 1), Point::new(0, 1)]);

        let mut t = SPTree::new();
        let (a, b) = (leaf(&mut t, "a", 1, 0), leaf(&mut t, "b", 0, 1));
        t.add_series(a, b).unwrap();
        let tri = solve_sp(&t).unwrap();
        assert_eq!(tri.vertices(), &[Point::new(0, 0), Point::new(1, 0), Point::new(1, 1)]);
        let ws: Vec<Vec<usize>> = tri.witnesses().unwrap().iter().map(|w| w.expand()).collect();
        assert_eq!(ws, vec![vec![], vec![0], vec![0, 1]]);

        assert_eq!(solve_sp(&SPTree::new()).unwrap().vertices(), &[Point::ORIGIN]);
    }

    #[test]
    fn reassociation_invariance() {
        let w = [(3, -1), (-2, 4), (1, 1), (5, -3)];
        let build = |left_leaning: bool, series: bool| {
            let mut t = SPTree::new();
            let ls: Vec<usize> = w.iter().enumerate().map(|(i, &(a, b))| leaf(&mut t, &i.to_string(), a, b)).collect();
            let op = if series { SPTree::add_series } else { SPTree::add_parallel };
            if left_leaning {
                let mut acc = ls[0];
                for &l in &ls[1..] {
                    acc = op(&mut t, acc, l).unwrap();
                }
            } else {
                let x = op(&mut t, ls[0], ls[1]).unwrap();
                let y = op(&mut t, ls[2], ls[3]).unwrap();
                op(&mut t, x, y).unwrap();
            }
            solve_sp(&t).unwrap()
        };
        for series in [false, true] {
            assert_eq!(build(true, series), build(false, series));
        }
    }

    #[test]
    fn tree_order_matches_oracle() {
        let tree = RootedTree::parse(
            r#"{"root":"r","edges":[
                {"id":"e1","from":"r","to":"u","weight":[2,-1]},
                {"id":"e2","from":"u","to":"v","weight":[-1,3]},
                {"id":"e3","from":"u","to":"w","weight":[1,1]},
                {"id":"e4","from":"r","to":"z","weight":[0,-2]}]}"#,
        )
        .unwrap();
        let sp = tree.to_sp().unwrap();
        let poset = sp.to_poset().unwrap();
        let e1 = poset.index_of("e1").unwrap();
        let e2 = poset.index_of("e2").unwrap();
        let e4 = poset.index_of("e4").unwrap();
        assert!(poset.less(e1, e2) && !poset.comparable(e1, e4));
        assert_eq!(poset.enumerate_lower_sets(ORACLE_LIMIT).unwrap().len(), 10);
        assert_eq!(solve_sp(&sp).unwrap(), poset.oracle_polygon(ORACLE_LIMIT).unwrap());
        assert_eq!(RootedTree::parse(&tree.to_json().to_string()).unwrap(), tree);

        let bad = RootedTree::parse(r#"{"root":"r","edges":[{"id":"e","from":"x","to":"y","weight":[1,1]}]}"#).unwrap();
        assert!(bad.to_sp().is_err());
    }

    #[test]
    fn deep_chain_solves_without_recursion() {
        let mut t = SPTree::new();
        let mut acc = leaf(&mut t, "0", 1, 0);
        for i in 1..50_000 {
            let l = leaf(&mut t, &i.to_string(), if i % 2 == 0 { 1 } else { -1 }, 1);
            acc = t.add_series(acc, l).unwrap();
        }
        let (p, _) = solve_sp_with(&t, true).unwrap();
        assert!(p.len() <= 2 * t.len());
        for (v, w) in p.vertices().iter().zip(p.witnesses().unwrap()) {
            let s: Point = w.expand().iter().map(|&e| t.weights()[e].point()).sum();
            assert_eq!(*v, s);
        }
    }
}
