//! Mergeable convex polygons on splay trees.
//!
//! Each hull chain lives in its own splay tree whose in-order traversal is the
//! chain in lexicographic order. The root stores absolute coordinates and
//! every other node stores its offset from its parent, so translating a whole
//! subtree is a single addition at its root. Every node also stores the edge
//! vector to its in-order successor, which is what the slope searches compare.
//!
//! The upper chain is kept as the lower chain of the point-reflected polygon
//! `-P`, so both trees run the same code. Witness shifts are applied lazily
//! through subtree tags that are pushed down ahead of every rotation.

use crate::polygon::{cross, cross_vec, ConvexPolygon, Point};
use crate::witness::Witness;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    left: u32,
    right: u32,
    parent: u32,
    /// Absolute coordinates at a root, offset from the parent otherwise.
    off: Point,
    /// Edge vector to the in-order successor; `None` on the last vertex.
    next: Option<Point>,
    witness: Option<Witness>,
    /// Pending shift for every witness in this subtree, this node included.
    tag: Option<Witness>,
}

/// Rotation and access counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SplayStats {
    pub rotations: u64,
    pub splays: u64,
}

impl std::ops::AddAssign for SplayStats {
    fn add_assign(&mut self, o: Self) {
        self.rotations += o.rotations;
        self.splays += o.splays;
    }
}

#[derive(Clone, Copy, Debug)]
struct HullTree {
    root: u32,
    len: usize,
}

impl HullTree {
    const EMPTY: HullTree = HullTree { root: NIL, len: 0 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chain {
    Lower,
    Upper,
}

/// A convex polygon as two splay trees sharing one node arena.
///
/// Merges consume both operands, so a polygon cannot be touched after it has
/// been merged into another one.
#[derive(Clone, Debug)]
pub struct SplayPolygon {
    nodes: Vec<Node>,
    free: Vec<u32>,
    lower: HullTree,
    upper: HullTree,
    with_witness: bool,
    stats: SplayStats,
}

type Tagged = (Point, Option<Witness>);

impl SplayPolygon {
    /// Builds balanced trees for both chains of `p`.
    pub fn from_polygon(p: &ConvexPolygon) -> Self {
        let with_witness = p.has_witnesses();
        let mut sp = SplayPolygon {
            nodes: Vec::with_capacity(2 * p.len() + 2),
            free: Vec::new(),
            lower: HullTree::EMPTY,
            upper: HullTree::EMPTY,
            with_witness,
            stats: SplayStats::default(),
        };
        if p.is_empty() {
            return sp;
        }
        let w = |i: usize| p.witness(i).cloned();
        let k = p.lexmax_index();
        let lower: Vec<Tagged> = (0..=k).map(|i| (p.vertices()[i], w(i))).collect();
        let upper: Vec<Tagged> = p
            .upper_chain_indices()
            .into_iter()
            .rev()
            .map(|i| (-p.vertices()[i], w(i)))
            .collect();
        sp.lower = sp.build(&lower);
        sp.upper = sp.build(&upper);
        sp
    }

    /// Canonical polygon, by in-order traversal of both chains.
    pub fn to_polygon(&self) -> ConvexPolygon {
        if self.lower.root == NIL {
            return ConvexPolygon::empty();
        }
        let lower = self.chain(Chain::Lower);
        let upper = self.chain(Chain::Upper);
        let mut vertices: Vec<Point> = lower.iter().map(|t| t.0).collect();
        let mut witnesses: Option<Vec<Witness>> = self
            .with_witness
            .then(|| lower.iter().map(|t| t.1.clone().unwrap_or_else(Witness::empty)).collect());
        if upper.len() > 2 {
            for t in &upper[1..upper.len() - 1] {
                vertices.push(-t.0);
                if let Some(ws) = witnesses.as_mut() {
                    ws.push(t.1.clone().unwrap_or_else(Witness::empty));
                }
            }
        }
        ConvexPolygon::from_canonical(vertices, witnesses)
    }

    /// Number of polygon vertices.
    pub fn len(&self) -> usize {
        if self.lower.len <= 1 {
            self.lower.len
        } else {
            self.lower.len + self.upper.len - 2
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lower.len == 0
    }

    pub fn stats(&self) -> SplayStats {
        self.stats
    }

    /// Translates the polygon in O(1), shifting witnesses by `shift`.
    pub fn translate(&mut self, by: Point, shift: Option<&Witness>) {
        for (chain, d) in [(Chain::Lower, by), (Chain::Upper, -by)] {
            let root = self.tree(chain).root;
            if root == NIL {
                continue;
            }
            self.nodes[root as usize].off += d;
            if let Some(s) = shift {
                self.add_tag(root, s);
            }
        }
    }

    /// Hull of the union. The smaller polygon's vertices are inserted into
    /// the larger one, left to right, one chain at a time.
    pub fn merge_union(self, other: SplayPolygon) -> SplayPolygon {
        let (mut big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        if small.is_empty() {
            big.stats += small.stats;
            return big;
        }
        if big.is_empty() {
            let mut s = small;
            s.stats += big.stats;
            return s;
        }
        big.with_witness &= small.with_witness;
        for chain in [Chain::Lower, Chain::Upper] {
            for (v, w) in small.chain(chain) {
                big.insert_vertex(chain, v, w);
            }
        }
        big.stats += small.stats;
        big
    }

    /// Minkowski sum. The smaller polygon's edges are threaded into the
    /// larger one's chains by slope; the vertices past each insertion point
    /// are translated through their subtree root.
    pub fn merge_minkowski(self, other: SplayPolygon) -> SplayPolygon {
        let (mut big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        big.stats += small.stats;
        if big.is_empty() || small.is_empty() {
            return SplayPolygon { lower: HullTree::EMPTY, upper: HullTree::EMPTY, ..big };
        }
        big.with_witness &= small.with_witness;
        for chain in [Chain::Lower, Chain::Upper] {
            let verts = small.chain(chain);
            big.thread_edges(chain, &verts);
        }
        big
    }

    // ---- construction and traversal ----

    fn alloc(&mut self, off: Point, next: Option<Point>, witness: Option<Witness>) -> u32 {
        let node = Node { left: NIL, right: NIL, parent: NIL, off, next, witness, tag: None };
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn build(&mut self, chain: &[Tagged]) -> HullTree {
        let root = self.build_range(chain, 0, chain.len(), Point::ORIGIN);
        HullTree { root, len: chain.len() }
    }

    fn build_range(&mut self, chain: &[Tagged], lo: usize, hi: usize, parent_abs: Point) -> u32 {
        if lo >= hi {
            return NIL;
        }
        let mid = (lo + hi) / 2;
        let (p, w) = &chain[mid];
        let next = chain.get(mid + 1).map(|q| q.0 - *p);
        let x = self.alloc(*p - parent_abs, next, if self.with_witness { w.clone() } else { None });
        let l = self.build_range(chain, lo, mid, *p);
        let r = self.build_range(chain, mid + 1, hi, *p);
        self.set_left(x, l);
        self.set_right(x, r);
        x
    }

    fn tree(&self, chain: Chain) -> HullTree {
        match chain {
            Chain::Lower => self.lower,
            Chain::Upper => self.upper,
        }
    }

    fn tree_mut(&mut self, chain: Chain) -> &mut HullTree {
        match chain {
            Chain::Lower => &mut self.lower,
            Chain::Upper => &mut self.upper,
        }
    }

    /// In-order vertices of one chain (in its own frame) with effective witnesses.
    fn chain(&self, chain: Chain) -> Vec<Tagged> {
        let root = self.tree(chain).root;
        let mut out = Vec::with_capacity(self.tree(chain).len);
        // (node, absolute coordinates, accumulated tag)
        let mut stack: Vec<(u32, Point, Option<Witness>)> = Vec::new();
        let mut cur = root;
        let mut cur_abs = Point::ORIGIN;
        let mut cur_tag: Option<Witness> = None;
        loop {
            while cur != NIL {
                let n = &self.nodes[cur as usize];
                let abs = cur_abs + n.off;
                let tag = compose(cur_tag.as_ref(), n.tag.as_ref());
                stack.push((cur, abs, tag.clone()));
                cur = n.left;
                cur_abs = abs;
                cur_tag = tag;
            }
            let Some((x, abs, tag)) = stack.pop() else { break };
            let n = &self.nodes[x as usize];
            let w = if self.with_witness {
                n.witness.as_ref().map(|w| match &tag {
                    Some(t) => Witness::shift(w, t),
                    None => w.clone(),
                })
            } else {
                None
            };
            out.push((abs, w));
            cur = n.right;
            cur_abs = abs;
            cur_tag = tag;
        }
        out
    }

    // ---- tree primitives ----

    fn set_left(&mut self, x: u32, c: u32) {
        self.nodes[x as usize].left = c;
        if c != NIL {
            self.nodes[c as usize].parent = x;
        }
    }

    fn set_right(&mut self, x: u32, c: u32) {
        self.nodes[x as usize].right = c;
        if c != NIL {
            self.nodes[c as usize].parent = x;
        }
    }

    fn add_tag(&mut self, x: u32, t: &Witness) {
        if !self.with_witness {
            return;
        }
        let n = &mut self.nodes[x as usize];
        n.tag = Some(match &n.tag {
            Some(old) => Witness::union(old, t),
            None => t.clone(),
        });
    }

    fn push_down(&mut self, x: u32) {
        let Some(t) = self.nodes[x as usize].tag.take() else { return };
        let n = &mut self.nodes[x as usize];
        if let Some(w) = n.witness.as_mut() {
            *w = Witness::shift(w, &t);
        }
        let (l, r) = (n.left, n.right);
        for c in [l, r] {
            if c != NIL {
                self.add_tag(c, &t);
            }
        }
    }

    /// Rotates `x` above its parent, keeping offsets consistent.
    fn rotate(&mut self, x: u32) {
        let p = self.nodes[x as usize].parent;
        let g = self.nodes[p as usize].parent;
        let xo = self.nodes[x as usize].off;
        let po = self.nodes[p as usize].off;
        let b;
        if self.nodes[p as usize].left == x {
            b = self.nodes[x as usize].right;
            self.set_left(p, b);
            self.set_right(x, p);
        } else {
            b = self.nodes[x as usize].left;
            self.set_right(p, b);
            self.set_left(x, p);
        }
        if b != NIL {
            self.nodes[b as usize].off += xo;
        }
        self.nodes[x as usize].off = xo + po;
        self.nodes[p as usize].off = -xo;
        self.nodes[x as usize].parent = g;
        if g != NIL {
            let gn = &mut self.nodes[g as usize];
            if gn.left == p {
                gn.left = x;
            } else {
                gn.right = x;
            }
        }
        self.stats.rotations += 1;
    }

    /// Moves `x` to the root of its tree.
    fn splay(&mut self, x: u32) {
        self.stats.splays += 1;
        let mut path = vec![x];
        let mut a = self.nodes[x as usize].parent;
        while a != NIL {
            path.push(a);
            a = self.nodes[a as usize].parent;
        }
        for &y in path.iter().rev() {
            self.push_down(y);
        }
        loop {
            let p = self.nodes[x as usize].parent;
            if p == NIL {
                break;
            }
            let g = self.nodes[p as usize].parent;
            if g == NIL {
                self.rotate(x);
                break;
            }
            let zigzig = (self.nodes[g as usize].left == p) == (self.nodes[p as usize].left == x);
            if zigzig {
                self.rotate(p);
            } else {
                self.rotate(x);
            }
            self.rotate(x);
        }
    }

    /// Splays `x` and records it as the root of `chain`.
    fn access(&mut self, chain: Chain, x: u32) {
        self.splay(x);
        self.tree_mut(chain).root = x;
    }

    /// Binary search for a monotone predicate over in-order nodes.
    /// `first = true`: first node where `pred` holds (pattern F..F T..T).
    /// `first = false`: last node where `pred` holds (pattern T..T F..F).
    /// Returns the match and the deepest node visited.
    fn search(&self, root: u32, first: bool, pred: impl Fn(Point, Option<Point>) -> bool) -> (Option<u32>, u32) {
        let mut cur = root;
        let mut abs = Point::ORIGIN;
        let mut found = None;
        let mut last = root;
        while cur != NIL {
            let n = &self.nodes[cur as usize];
            abs += n.off;
            last = cur;
            let hit = pred(abs, n.next);
            if hit {
                found = Some(cur);
            }
            cur = if hit == first { n.left } else { n.right };
        }
        (found, last)
    }

    /// Runs a search on `chain`, splaying the deepest node and then the match.
    fn find(&mut self, chain: Chain, first: bool, pred: impl Fn(Point, Option<Point>) -> bool) -> Option<u32> {
        let root = self.tree(chain).root;
        if root == NIL {
            return None;
        }
        let (found, last) = self.search(root, first, pred);
        self.access(chain, last);
        if let Some(f) = found {
            self.access(chain, f);
        }
        found
    }

    /// Detaches the left subtree of root `x`, returning it as a tree root.
    fn cut_left(&mut self, x: u32) -> u32 {
        self.push_down(x);
        let l = self.nodes[x as usize].left;
        if l != NIL {
            let xo = self.nodes[x as usize].off;
            let ln = &mut self.nodes[l as usize];
            ln.parent = NIL;
            ln.off += xo;
            self.nodes[x as usize].left = NIL;
        }
        l
    }

    fn cut_right(&mut self, x: u32) -> u32 {
        self.push_down(x);
        let r = self.nodes[x as usize].right;
        if r != NIL {
            let xo = self.nodes[x as usize].off;
            let rn = &mut self.nodes[r as usize];
            rn.parent = NIL;
            rn.off += xo;
            self.nodes[x as usize].right = NIL;
        }
        r
    }

    /// Splays the maximum of the tree rooted at `root`; returns it.
    fn splay_max(&mut self, root: u32) -> u32 {
        let mut m = root;
        while self.nodes[m as usize].right != NIL {
            m = self.nodes[m as usize].right;
        }
        self.splay(m);
        m
    }

    /// Concatenates two trees; every key of `a` precedes every key of `b`.
    fn join(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let m = self.splay_max(a);
        self.push_down(m);
        let mo = self.nodes[m as usize].off;
        self.nodes[b as usize].off -= mo;
        self.set_right(m, b);
        m
    }

    /// Returns every node of a detached subtree to the free list.
    fn release(&mut self, root: u32) -> usize {
        let mut count = 0;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            if x == NIL {
                continue;
            }
            count += 1;
            let n = &mut self.nodes[x as usize];
            stack.push(n.left);
            stack.push(n.right);
            n.witness = None;
            n.tag = None;
            self.free.push(x);
        }
        count
    }

    // ---- hull of union ----

    /// Inserts `v` into one chain if it lies strictly outside it.
    fn insert_vertex(&mut self, chain: Chain, v: Point, w: Option<Witness>) {
        // last vertex lexicographically below v
        let a = self.find(chain, false, |abs, _| abs < v);
        match a {
            Some(a) => {
                let n = &self.nodes[a as usize];
                let a_abs = n.off; // a is the root now
                if let Some(e) = n.next {
                    let b = a_abs + e;
                    if b == v || cross(a_abs, b, v) >= 0 {
                        return;
                    }
                }
            }
            None => {
                let root = self.tree(chain).root;
                let (f, _) = self.search(root, true, |_, _| true);
                let f = f.expect("nonempty chain");
                self.access(chain, f);
                if self.nodes[f as usize].off == v {
                    return;
                }
            }
        }

        let left = if a.is_some() {
            self.find(chain, true, |abs, next| match next {
                _ if abs >= v => true,
                None => true,
                Some(e) => cross(abs, abs + e, v) <= 0,
            })
        } else {
            None
        };
        let right = self.find(chain, true, |abs, next| {
            abs > v
                && match next {
                    None => true,
                    Some(e) => cross(abs, abs + e, v) > 0,
                }
        });

        let x = self.alloc(v, None, if self.with_witness { w } else { None });
        let mut removed = 0;
        match (left, right) {
            (Some(l), Some(r)) => {
                self.access(chain, l);
                let rest = self.cut_right(l);
                self.splay(r);
                debug_assert!(rest != NIL);
                let between = self.cut_left(r);
                removed += self.release(between);
                let (l_abs, r_abs) = (self.nodes[l as usize].off, self.nodes[r as usize].off);
                self.nodes[l as usize].off = l_abs - v;
                self.nodes[l as usize].next = Some(v - l_abs);
                self.nodes[r as usize].off = r_abs - v;
                self.nodes[x as usize].next = Some(r_abs - v);
                self.set_left(x, l);
                self.set_right(x, r);
            }
            (Some(l), None) => {
                self.access(chain, l);
                let rest = self.cut_right(l);
                removed += self.release(rest);
                let l_abs = self.nodes[l as usize].off;
                self.nodes[l as usize].off = l_abs - v;
                self.nodes[l as usize].next = Some(v - l_abs);
                self.set_left(x, l);
            }
            (None, Some(r)) => {
                self.access(chain, r);
                let rest = self.cut_left(r);
                removed += self.release(rest);
                let r_abs = self.nodes[r as usize].off;
                self.nodes[r as usize].off = r_abs - v;
                self.nodes[x as usize].next = Some(r_abs - v);
                self.set_right(x, r);
            }
            (None, None) => unreachable!("outside vertex with no neighbours"),
        }
        let t = self.tree_mut(chain);
        t.root = x;
        t.len = t.len + 1 - removed;
    }

    // ---- Minkowski sum ----

    /// Adds the chain `small` (vertices in this chain's frame) to one chain.
    fn thread_edges(&mut self, chain: Chain, small: &[Tagged]) {
        let wit = |i: usize| small[i].1.clone();
        let mut rem = self.tree(chain).root;
        let mut len = self.tree(chain).len;
        self.nodes[rem as usize].off += small[0].0;
        let mut done = NIL;
        for k in 1..small.len() {
            let f = small[k].0 - small[k - 1].0;
            // first vertex whose outgoing edge turns strictly past f
            let (found, last) = self.search(rem, true, |_, next| match next {
                None => true,
                Some(e) => cross_vec(f, e) > 0,
            });
            self.splay(last);
            let t = found.expect("last vertex always matches");
            self.splay(t);
            let piece_left = self.cut_left(t);
            let t_abs = self.nodes[t as usize].off;
            let mut piece = piece_left;
            let mut fused = false;
            if piece_left != NIL {
                let m = self.splay_max(piece_left);
                piece = m;
                let e = self.nodes[m as usize].next.expect("edge into t");
                if cross_vec(e, f) == 0 {
                    self.nodes[m as usize].next = Some(e + f);
                    fused = true;
                }
            }
            if !fused {
                let w = self.nodes[t as usize].witness.clone();
                let copy = self.alloc(t_abs, Some(f), w);
                len += 1;
                if piece == NIL {
                    piece = copy;
                } else {
                    let m_abs = self.nodes[piece as usize].off;
                    self.nodes[copy as usize].off = t_abs - m_abs;
                    self.set_right(piece, copy);
                }
            }
            if let Some(w) = wit(k - 1) {
                self.add_tag(piece, &w);
            }
            done = self.join(done, piece);
            self.nodes[t as usize].off += f;
            rem = t;
        }
        if let Some(w) = wit(small.len() - 1) {
            self.add_tag(rem, &w);
        }
        let root = self.join(done, rem);
        let tree = self.tree_mut(chain);
        tree.root = root;
        tree.len = len;
    }

    /// Validates structure, offsets and convexity. Test support.
    pub fn check_invariants(&self) -> Result<(), String> {
        for chain in [Chain::Lower, Chain::Upper] {
            let t = self.tree(chain);
            let verts = self.chain(chain);
            if verts.len() != t.len {
                return Err(format!("{chain:?}: len {} but {} nodes", t.len, verts.len()));
            }
            if t.root != NIL && self.nodes[t.root as usize].parent != NIL {
                return Err(format!("{chain:?}: root has a parent"));
            }
            // absolute coordinates by walking parent links must agree with the in-order pass
            let mut order = Vec::new();
            self.collect_inorder(t.root, &mut order);
            for (i, &x) in order.iter().enumerate() {
                let mut abs = Point::ORIGIN;
                let mut y = x;
                while y != NIL {
                    abs += self.nodes[y as usize].off;
                    y = self.nodes[y as usize].parent;
                }
                if abs != verts[i].0 {
                    return Err(format!("{chain:?}: node {i} resolves to {abs} vs {}", verts[i].0));
                }
                let expect_next = verts.get(i + 1).map(|q| q.0 - abs);
                if self.nodes[x as usize].next != expect_next {
                    return Err(format!("{chain:?}: stale edge vector at {i}"));
                }
            }
            for w in verts.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(format!("{chain:?}: not increasing"));
                }
            }
            for w in verts.windows(3) {
                if cross(w[0].0, w[1].0, w[2].0) <= 0 {
                    return Err(format!("{chain:?}: not strictly convex at {}", w[1].0));
                }
            }
        }
        Ok(())
    }

    fn collect_inorder(&self, root: u32, out: &mut Vec<u32>) {
        let mut stack = Vec::new();
        let mut cur = root;
        loop {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur as usize].left;
            }
            let Some(x) = stack.pop() else { break };
            out.push(x);
            cur = self.nodes[x as usize].right;
        }
    }
}

fn compose(a: Option<&Witness>, b: Option<&Witness>) -> Option<Witness> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(Witness::union(x, y)),
    }
}
