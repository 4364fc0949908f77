//! Width-two posets.
//!
//! With the elements split into two chains, a lower set is a pair of prefix
//! lengths `(x, y)`. The feasible pairs form an orthogonally convex region
//! that is tiled by power-of-two squares; the lower sets of one square are a
//! fixed prefix plus a free prefix of each chain's interval, so its polygon
//! is a Minkowski sum of two precomputed chain hulls.

use crate::error::{Error, Result};
use crate::polygon::{hull_of_points, minkowski_sum, translate, ConvexPolygon, Point};
use crate::poset::WeightedPoset;
use crate::witness::Witness;

/// Two chains, each listed bottom-up, covering every element once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub chain1: Vec<usize>,
    pub chain2: Vec<usize>,
}

impl ChainDecomposition {
    pub fn validate(&self, p: &WeightedPoset) -> Result<()> {
        let mut seen = vec![false; p.len()];
        for c in [&self.chain1, &self.chain2] {
            for (k, &e) in c.iter().enumerate() {
                if e >= p.len() || std::mem::replace(&mut seen[e], true) {
                    return Err(Error::Parse(format!("chain entry {e} is missing or repeated")));
                }
                if k > 0 && !p.less(c[k - 1], e) {
                    return Err(Error::Parse(format!("`{}` and `{}` are not ordered", p.id(c[k - 1]), p.id(e))));
                }
            }
        }
        if let Some(e) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!("`{}` is on no chain", p.id(e))));
        }
        Ok(())
    }

    /// `(chain, index)` of every element.
    pub fn positions(&self, n: usize) -> Vec<(u8, usize)> {
        let mut pos = vec![(0, 0); n];
        for (k, &e) in self.chain1.iter().enumerate() {
            pos[e] = (1, k);
        }
        for (k, &e) in self.chain2.iter().enumerate() {
            pos[e] = (2, k);
        }
        pos
    }
}

/// Minimum chain cover by bipartite matching on the comparability relation;
/// its size is the width of `p`.
pub fn min_chain_cover(p: &WeightedPoset) -> Vec<Vec<usize>> {
    let n = p.len();
    let mut next: Vec<Option<usize>> = vec![None; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    // greedy start along covers, then augmenting paths
    for &(x, y) in p.covers() {
        if next[x].is_none() && prev[y].is_none() {
            next[x] = Some(y);
            prev[y] = Some(x);
        }
    }
    for &x in p.topological_order() {
        if next[x].is_some() {
            continue;
        }
        let mut visited = vec![false; n];
        augment(p, x, &mut next, &mut prev, &mut visited);
    }
    (0..n)
        .filter(|&e| prev[e].is_none())
        .map(|s| {
            let mut c = vec![s];
            while let Some(y) = next[*c.last().unwrap()] {
                c.push(y);
            }
            c
        })
        .collect()
}

/// Two chains covering `p`; fails with a three-element antichain otherwise.
pub fn chain_partition_width2(p: &WeightedPoset) -> Result<ChainDecomposition> {
    let chains = min_chain_cover(p);
    match chains.len() {
        0 => Ok(ChainDecomposition { chain1: vec![], chain2: vec![] }),
        1 => Ok(ChainDecomposition { chain1: chains.into_iter().next().unwrap(), chain2: vec![] }),
        2 => {
            let mut it = chains.into_iter();
            Ok(ChainDecomposition { chain1: it.next().unwrap(), chain2: it.next().unwrap() })
        }
        _ => Err(Error::WidthExceeded(find_antichain3(p).iter().map(|&e| p.id(e).to_string()).collect())),
    }
}

fn augment(p: &WeightedPoset, x: usize, next: &mut [Option<usize>], prev: &mut [Option<usize>], visited: &mut [bool]) -> bool {
    for y in p.above_set(x).ones() {
        if visited[y] {
            continue;
        }
        visited[y] = true;
        let free = match prev[y] {
            None => true,
            Some(z) => augment(p, z, next, prev, visited),
        };
        if free {
            next[x] = Some(y);
            prev[y] = Some(x);
            return true;
        }
    }
    false
}

fn find_antichain3(p: &WeightedPoset) -> [usize; 3] {
    let n = p.len();
    for a in 0..n {
        for b in a + 1..n {
            if p.comparable(a, b) {
                continue;
            }
            for c in b + 1..n {
                if !p.comparable(a, c) && !p.comparable(b, c) {
                    return [a, b, c];
                }
            }
        }
    }
    unreachable!("more than two chains in a minimum cover implies a 3-antichain")
}

/// Feasible `y` range `lo[x]..=hi[x]` for every `x` in `0..=n1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridRegion {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
}

impl GridRegion {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.lo.len() && self.lo[x] <= y && y <= self.hi[x]
    }

    pub fn point_count(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h + 1 - l).sum()
    }
}

/// `(x, y)` is feasible iff the first `x` elements of chain 1 together with
/// the first `y` of chain 2 are downward closed.
pub fn feasible_region(p: &WeightedPoset, chains: &ChainDecomposition) -> GridRegion {
    let (c1, c2) = (&chains.chain1, &chains.chain2);
    // need_a[i]: prefix length of the other chain forced by element i of chain a
    let need = |a: &[usize], b: &[usize]| -> Vec<usize> {
        let mut k = 0;
        a.iter()
            .map(|&e| {
                while k < b.len() && p.less(b[k], e) {
                    k += 1;
                }
                k
            })
            .collect()
    };
    let need2 = need(c1, c2);
    let need1 = need(c2, c1);
    let mut lo = Vec::with_capacity(c1.len() + 1);
    let mut hi = Vec::with_capacity(c1.len() + 1);
    let mut y = 0;
    for x in 0..=c1.len() {
        lo.push(if x == 0 { 0 } else { need2[x - 1] });
        while y < c2.len() && need1[y] <= x {
            y += 1;
        }
        hi.push(y);
    }
    GridRegion { lo, hi }
}

#[derive(Clone, Debug, Default)]
pub struct Width2Stats {
    /// `squares[k]`: emitted squares of side `2^k`.
    pub squares: Vec<usize>,
    /// Sum of emitted square perimeters.
    pub perimeter: usize,
    /// Emitted squares as `(x0, y0, side)`.
    pub tiles: Vec<(usize, usize, usize)>,
}

pub fn solve_width2(p: &WeightedPoset) -> Result<ConvexPolygon> {
    let chains = chain_partition_width2(p)?;
    Ok(solve_width2_with(p, &chains, true)?.0)
}

/// Hulls of all prefix sums within aligned power-of-two intervals of one chain.
struct ChainHulls {
    /// `levels[k][i]`: interval `[i 2^k, (i+1) 2^k)` of grid coordinates.
    levels: Vec<Vec<ConvexPolygon>>,
    /// Weight sum of the first `x` elements.
    sums: Vec<Point>,
    /// Witness of the first `x` elements.
    prefix: Vec<Witness>,
}

impl ChainHulls {
    fn new(p: &WeightedPoset, chain: &[usize], with_witness: bool) -> Self {
        let n = chain.len();
        let mut sums = vec![Point::ORIGIN; n + 1];
        let mut prefix = vec![Witness::empty(); n + 1];
        for (k, &e) in chain.iter().enumerate() {
            sums[k + 1] = sums[k] + p.weight(e).point();
            if with_witness {
                prefix[k + 1] = Witness::union(&prefix[k], &Witness::single(e));
            }
        }
        // blocks of elements for the shift witnesses, aligned like the intervals
        let mut blocks: Vec<Vec<Witness>> = vec![chain.iter().map(|&e| if with_witness { Witness::single(e) } else { Witness::empty() }).collect()];
        let origin = ConvexPolygon::point(Point::ORIGIN, with_witness.then(Witness::empty));
        let mut levels = vec![vec![origin; n + 1]];
        let mut side = 1;
        while 2 * side <= n + 1 {
            let prev = levels.last().unwrap();
            let prev_blocks = blocks.last().unwrap();
            let count = (n + 1) / (2 * side);
            let mut cur = Vec::with_capacity(count);
            for i in 0..count {
                let (l, r) = (2 * i, 2 * i + 1);
                let start = l * side;
                let shift = sums[start + side] - sums[start];
                let moved = translate(&prev[r], shift, with_witness.then_some(&prev_blocks[l]));
                cur.push(crate::polygon::hull_union(&prev[l], &moved));
            }
            let next_blocks = (0..prev_blocks.len() / 2).map(|i| Witness::union(&prev_blocks[2 * i], &prev_blocks[2 * i + 1])).collect();
            blocks.push(next_blocks);
            levels.push(cur);
            side *= 2;
        }
        ChainHulls { levels, sums, prefix }
    }

    fn hull(&self, start: usize, side: usize) -> &ConvexPolygon {
        let k = side.trailing_zeros() as usize;
        &self.levels[k][start / side]
    }
}

/// Tiles the feasible region and hulls the square polygons together.
pub fn solve_width2_with(p: &WeightedPoset, chains: &ChainDecomposition, with_witness: bool) -> Result<(ConvexPolygon, Width2Stats)> {
    chains.validate(p)?;
    let region = feasible_region(p, chains);
    let (n1, n2) = (chains.chain1.len(), chains.chain2.len());
    let h1 = ChainHulls::new(p, &chains.chain1, with_witness);
    let h2 = ChainHulls::new(p, &chains.chain2, with_witness);
    let size = (n1.max(n2) + 1).next_power_of_two();
    let mut stats = Width2Stats { squares: vec![0; size.trailing_zeros() as usize + 1], ..Default::default() };
    let mut stack = vec![(0usize, 0usize, size)];
    let mut pts: Vec<(Point, Witness)> = Vec::new();
    while let Some((x0, y0, side)) = stack.pop() {
        let (x1, y1) = (x0 + side - 1, y0 + side - 1);
        if x0 > n1 || y0 > n2 {
            continue;
        }
        let xl = x1.min(n1);
        if y1 < region.lo[x0] || y0 > region.hi[xl] {
            continue;
        }
        if x1 <= n1 && y1 <= n2 && region.lo[x1] <= y0 && region.hi[x0] >= y1 {
            stats.squares[side.trailing_zeros() as usize] += 1;
            stats.perimeter += 4 * side;
            stats.tiles.push((x0, y0, side));
            let body = minkowski_sum(h1.hull(x0, side), h2.hull(y0, side));
            let by = h1.sums[x0] + h2.sums[y0];
            let shift = Witness::union(&h1.prefix[x0], &h2.prefix[y0]);
            let placed = translate(&body, by, Some(&shift));
            match placed.witnesses() {
                Some(ws) => pts.extend(placed.vertices().iter().copied().zip(ws.iter().cloned())),
                None => pts.extend(placed.vertices().iter().map(|&v| (v, Witness::empty()))),
            }
            continue;
        }
        debug_assert!(side > 1);
        let h = side / 2;
        stack.extend([(x0, y0, h), (x0 + h, y0, h), (x0, y0 + h, h), (x0 + h, y0 + h, h)]);
    }
    let mut out = hull_of_points(&pts);
    if !with_witness {
        out = out.without_witnesses();
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::ORACLE_LIMIT;

    fn poset(weights: &[(i64, i64)], rels: &[(usize, usize)]) -> WeightedPoset {
        WeightedPoset::from_indices(weights.iter().map(|&w| w.into()).collect(), rels).unwrap()
    }

    #[test]
    fn partition_examples() {
        let chain = poset(&[(1, 0); 3], &[(0, 1), (1, 2)]);
        let c = chain_partition_width2(&chain).unwrap();
        assert_eq!((c.chain1, c.chain2), (vec![0, 1, 2], vec![]));

        let two = poset(&[(1, 0); 4], &[(0, 1), (2, 3)]);
        let c = chain_partition_width2(&two).unwrap();
        assert_eq!((c.chain1, c.chain2), (vec![0, 1], vec![2, 3]));

        // N: a < c, b < c, b < d
        let n = poset(&[(1, 0), (0, 1), (-1, 3), (2, -1)], &[(0, 2), (1, 2), (1, 3)]);
        let c = chain_partition_width2(&n).unwrap();
        c.validate(&n).unwrap();

        let anti = poset(&[(1, 0); 3], &[]);
        match chain_partition_width2(&anti) {
            Err(Error::WidthExceeded(ids)) => assert_eq!(ids.len(), 3),
            other => panic!("expected a width error, got {other:?}"),
        }
    }

    #[test]
    fn region_examples() {
        let two = poset(&[(1, 0); 5], &[(0, 1), (2, 3), (3, 4)]);
        let chains = ChainDecomposition { chain1: vec![0, 1], chain2: vec![2, 3, 4] };
        let r = feasible_region(&two, &chains);
        assert_eq!(r, GridRegion { lo: vec![0; 3], hi: vec![3; 3] });

        // chain1 = a < b, chain2 = c, a < c
        let p = poset(&[(1, 0); 3], &[(0, 1), (0, 2)]);
        let chains = ChainDecomposition { chain1: vec![0, 1], chain2: vec![2] };
        let r = feasible_region(&p, &chains);
        for x in 0..=2 {
            for y in 0..=1 {
                assert_eq!(r.contains(x, y), y == 0 || x >= 1);
            }
        }
    }

    #[test]
    fn solve_examples() {
        let p = poset(&[(1, 0), (1, 0), (0, 1), (0, 1)], &[(0, 1), (2, 3)]);
        let r = solve_width2(&p).unwrap();
        assert_eq!(r.vertices(), &[Point::new(0, 0), Point::new(2, 0), Point::new(2, 2), Point::new(0, 2)]);

        let chain = poset(&[(3, -1), (-1, 2), (2, 2)], &[(0, 1), (1, 2)]);
        let pts = [(0, 0), (3, -1), (2, 1), (4, 3)].map(|(x, y)| Point::new(x, y));
        assert_eq!(solve_width2(&chain).unwrap(), crate::polygon::hull_of_plain_points(&pts));

        let n = poset(&[(1, 0), (0, 1), (-1, 3), (2, -1)], &[(0, 2), (1, 2), (1, 3)]);
        let got = solve_width2(&n).unwrap();
        assert_eq!(got, n.oracle_polygon(ORACLE_LIMIT).unwrap());
        for (v, w) in got.vertices().iter().zip(got.witnesses().unwrap()) {
            let m = w.expand();
            assert!(n.is_lower_set(&m));
            assert_eq!(n.project(&m).unwrap(), *v);
        }
        assert_eq!(solve_width2(&poset(&[], &[])).unwrap().vertices(), &[Point::ORIGIN]);
    }

    #[test]
    fn tiles_cover_the_region_exactly() {
        let p = poset(&[(1, 2); 9], &[(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 8), (0, 6), (5, 2), (7, 4)]);
        let chains = chain_partition_width2(&p).unwrap();
        let region = feasible_region(&p, &chains);
        let (_, stats) = solve_width2_with(&p, &chains, false).unwrap();
        let mut covered = std::collections::HashMap::new();
        for &(x0, y0, s) in &stats.tiles {
            for x in x0..x0 + s {
                for y in y0..y0 + s {
                    assert!(region.contains(x, y));
                    *covered.entry((x, y)).or_insert(0) += 1;
                }
            }
        }
        assert!(covered.values().all(|&c| c == 1));
        assert_eq!(covered.len(), region.point_count());
        assert_eq!(region.point_count(), p.enumerate_lower_sets(ORACLE_LIMIT).unwrap().len());
    }

    #[test]
    fn chain_choice_does_not_matter() {
        // two incomparable pairs: {0<1} and {2<3}; alternative chains swap the roles
        let p = poset(&[(2, -1), (-1, 3), (0, 2), (4, 1)], &[(0, 1), (2, 3), (0, 3)]);
        let a = ChainDecomposition { chain1: vec![0, 1], chain2: vec![2, 3] };
        let b = ChainDecomposition { chain1: vec![2, 3], chain2: vec![0, 1] };
        let c = ChainDecomposition { chain1: vec![0, 3], chain2: vec![2] };
        assert!(c.validate(&p).is_err());
        assert_eq!(solve_width2_with(&p, &a, true).unwrap().0, solve_width2_with(&p, &b, true).unwrap().0);
    }
}
