//! Seeded random instances whose class membership holds by construction.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::poset::{GraphEdge, ParamWeight, WeightedGraph, WeightedPoset};
use crate::semiorder::{SemiItem, Semiorder};
use crate::series_parallel::{RootedTree, SPTree, TreeEdge};
use crate::treewidth::greedy_tree_decomposition;

pub use rand_chacha::ChaCha8Rng as Rng64;

pub fn rng(seed: u64) -> Rng64 {
    rand::SeedableRng::seed_from_u64(seed)
}

fn weight<R: Rng>(rng: &mut R, w: i64) -> ParamWeight {
    ParamWeight::new(rng.gen_range(-w..=w), rng.gen_range(-w..=w))
}

/// Utilities `k/6` with `k` uniform in `0..=6·span`, i.e. rationals in `[0, span]`.
pub fn semiorder<R: Rng>(rng: &mut R, n: usize, w: i64, span: i64) -> Semiorder {
    let items = (0..n)
        .map(|i| SemiItem { id: format!("s{i}"), utility: Ratio::new(rng.gen_range(0..=6 * span), 6), weight: weight(rng, w) })
        .collect();
    Semiorder::new(items).expect("generated ids are distinct")
}

/// Random binary decomposition: each internal node splits its leaf count
/// uniformly and picks series or parallel with equal odds.
pub fn sp_tree<R: Rng>(rng: &mut R, n: usize, w: i64) -> SPTree {
    enum Task {
        Build(usize),
        Join(bool),
    }
    let mut t = SPTree::new();
    if n == 0 {
        return t;
    }
    let mut tasks = vec![Task::Build(n)];
    let mut done: Vec<usize> = Vec::new();
    let mut next_id = 0;
    while let Some(task) = tasks.pop() {
        match task {
            Task::Build(1) => {
                done.push(t.add_leaf(format!("e{next_id}"), weight(rng, w)).expect("fresh id"));
                next_id += 1;
            }
            Task::Build(m) => {
                let k = rng.gen_range(1..m);
                tasks.push(Task::Join(rng.gen_bool(0.5)));
                tasks.push(Task::Build(m - k));
                tasks.push(Task::Build(k));
            }
            Task::Join(series) => {
                let r = done.pop().unwrap();
                let l = done.pop().unwrap();
                let node = if series { t.add_series(l, r) } else { t.add_parallel(l, r) };
                done.push(node.expect("fresh subtrees"));
            }
        }
    }
    t
}

/// Rooted tree on `n` edges; vertex `i` hangs from a uniform earlier vertex.
pub fn rooted_tree<R: Rng>(rng: &mut R, n: usize, w: i64) -> RootedTree {
    let edges = (1..=n)
        .map(|i| TreeEdge { id: format!("t{i}"), parent: format!("v{}", rng.gen_range(0..i)), child: format!("v{i}"), weight: weight(rng, w) })
        .collect();
    RootedTree { root: "v0".into(), edges }
}

/// Two chains merged along a random interleaving; each cross pair that
/// respects the interleaving becomes a relation with probability `q`.
pub fn width2_poset<R: Rng>(rng: &mut R, n: usize, w: i64, q: f64) -> WeightedPoset {
    let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mut rels = Vec::new();
    let mut last: [Option<usize>; 2] = [None, None];
    for (i, &side) in labels.iter().enumerate() {
        let s = side as usize;
        if let Some(prev) = last[s] {
            rels.push((prev, i));
        }
        last[s] = Some(i);
    }
    for i in 0..n {
        for j in i + 1..n {
            if labels[i] != labels[j] && rng.gen_bool(q) {
                rels.push((i, j));
            }
        }
    }
    // hide the interleaving behind a random relabelling
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let rels: Vec<(usize, usize)> = rels.into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    let weights = (0..n).map(|_| weight(rng, w)).collect();
    WeightedPoset::from_parts((0..n).map(|i| format!("w{i}")).collect(), weights, &rels).expect("acyclic by construction")
}

/// DAG whose undirected edges form a partial k-tree; orientation follows a
/// random vertex order.
pub fn partial_ktree_dag<R: Rng>(rng: &mut R, n: usize, k: usize, w: i64, keep: f64) -> WeightedPoset {
    let mut bags: Vec<Vec<usize>> = Vec::new();
    let mut edges = Vec::new();
    let start = n.min(k + 1);
    for a in 0..start {
        for b in a + 1..start {
            if rng.gen_bool(keep) {
                edges.push((a, b));
            }
        }
    }
    if start > 0 {
        bags.push((0..start).collect());
    }
    for v in start..n {
        let bag = bags.choose(rng).unwrap().clone();
        let mut sub = bag.clone();
        sub.shuffle(rng);
        sub.truncate(k);
        for &u in &sub {
            if rng.gen_bool(keep) {
                edges.push((u, v));
            }
        }
        sub.push(v);
        bags.push(sub);
    }
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    let rels: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| if rank[a] < rank[b] { (a, b) } else { (b, a) }).collect();
    let weights = (0..n).map(|_| weight(rng, w)).collect();
    WeightedPoset::from_parts((0..n).map(|i| format!("d{i}")).collect(), weights, &rels).expect("acyclic by construction")
}

/// Partial k-tree DAG, redrawn until the elimination heuristic finds width
/// at most `max_width`.
pub fn bounded_treewidth_dag<R: Rng>(rng: &mut R, n: usize, k: usize, w: i64, max_width: usize) -> WeightedPoset {
    loop {
        let p = partial_ktree_dag(rng, n, k, w, 0.7);
        if greedy_tree_decomposition(&p).width() <= max_width {
            return p;
        }
    }
}

/// Random DAG: each pair (in a random order) is related with probability `q`.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, w: i64, q: f64) -> WeightedPoset {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut rels = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(q) {
                rels.push((perm[i], perm[j]));
            }
        }
    }
    let weights = (0..n).map(|_| weight(rng, w)).collect();
    WeightedPoset::from_parts((0..n).map(|i| format!("p{i}")).collect(), weights, &rels).expect("acyclic by construction")
}

/// Simple graph with `m` distinct edges (fewer if the graph is complete).
pub fn random_graph<R: Rng>(rng: &mut R, nv: usize, m: usize, w: i64) -> WeightedGraph {
    let mut pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a + 1..nv).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    pairs.truncate(m);
    WeightedGraph {
        vertices: (0..nv).map(|i| (format!("v{i}"), weight(rng, w))).collect(),
        edges: pairs
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| GraphEdge { id: format!("g{i}"), ends: [format!("v{a}"), format!("v{b}")], weight: weight(rng, w) })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::width::chain_partition_width2;

    #[test]
    fn seeds_are_reproducible() {
        let a = sp_tree(&mut rng(7), 50, 9).to_json();
        let b = sp_tree(&mut rng(7), 50, 9).to_json();
        assert_eq!(a, b);
        assert_ne!(a, sp_tree(&mut rng(8), 50, 9).to_json());
    }

    #[test]
    fn classes_hold() {
        let mut r = rng(1);
        for n in 0..20 {
            assert!(chain_partition_width2(&width2_poset(&mut r, n, 9, 0.3)).is_ok());
            let t = sp_tree(&mut r, n, 9);
            assert_eq!(t.len(), n);
            let d = bounded_treewidth_dag(&mut r, n, 2, 9, 3);
            assert!(greedy_tree_decomposition(&d).width() <= 3);
            assert_eq!(rooted_tree(&mut r, n, 9).to_sp().unwrap().len(), n);
        }
    }
}
