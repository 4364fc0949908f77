//! Persistent witness DAG.
//!
//! A [`Witness`] names the lower set that projects onto a polygon vertex.
//! Handles are shared (`Arc`), so building a union or a shift is O(1) no
//! matter how large the underlying sets are. Expanding a handle walks the DAG
//! iteratively; series-parallel chains can nest handles 10^5 deep.

use std::sync::{Arc, LazyLock};

#[derive(Debug)]
enum Node {
    Empty,
    Leaf(Vec<u32>),
    Union(Witness, Witness),
    Shift(Witness, Witness),
}

/// Handle into the witness DAG. Children of `Union` and `Shift` are disjoint.
#[derive(Clone, Debug)]
pub struct Witness(Arc<Node>);

impl Witness {
    pub fn empty() -> Self {
        Witness(EMPTY.clone())
    }

    pub fn leaf<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let ids: Vec<u32> = ids.into_iter().map(|i| i as u32).collect();
        if ids.is_empty() {
            return Self::empty();
        }
        Witness(Arc::new(Node::Leaf(ids)))
    }

    pub fn single(id: usize) -> Self {
        Witness(Arc::new(Node::Leaf(vec![id as u32])))
    }

    pub fn union(a: &Witness, b: &Witness) -> Self {
        match (a.is_trivially_empty(), b.is_trivially_empty()) {
            (true, _) => b.clone(),
            (_, true) => a.clone(),
            _ => Witness(Arc::new(Node::Union(a.clone(), b.clone()))),
        }
    }

    /// `child` shifted by the fixed set `by`.
    pub fn shift(child: &Witness, by: &Witness) -> Self {
        if by.is_trivially_empty() {
            return child.clone();
        }
        Witness(Arc::new(Node::Shift(child.clone(), by.clone())))
    }

    fn is_trivially_empty(&self) -> bool {
        matches!(*self.0, Node::Empty)
    }

    /// All element indices named by this handle, sorted.
    ///
    /// Shared sub-DAGs are walked once per occurrence; a repeated index means
    /// the disjointness invariant was broken and trips a debug assertion.
    pub fn expand(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<&Witness> = vec![self];
        while let Some(w) = stack.pop() {
            match &*w.0 {
                Node::Empty => {}
                Node::Leaf(ids) => out.extend(ids.iter().map(|&i| i as usize)),
                Node::Union(a, b) | Node::Shift(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out.sort_unstable();
        debug_assert!(
            out.windows(2).all(|p| p[0] != p[1]),
            "witness expands to a repeated element"
        );
        out
    }
}

impl Drop for Node {
    // Deep Shift chains would otherwise overflow the stack on drop.
    fn drop(&mut self) {
        let mut pending: Vec<Arc<Node>> = Vec::new();
        let take = |node: &mut Node, pending: &mut Vec<Arc<Node>>| {
            if let Node::Union(a, b) | Node::Shift(a, b) = node {
                let a = std::mem::replace(a, Witness(EMPTY.clone()));
                let b = std::mem::replace(b, Witness(EMPTY.clone()));
                pending.push(a.0);
                pending.push(b.0);
            }
        };
        take(self, &mut pending);
        while let Some(arc) = pending.pop() {
            if let Ok(mut node) = Arc::try_unwrap(arc) {
                take(&mut node, &mut pending);
            }
        }
    }
}

static EMPTY: LazyLock<Arc<Node>> = LazyLock::new(|| Arc::new(Node::Empty));

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_collects_all_parts() {
        let a = Witness::leaf([3, 1]);
        let b = Witness::single(7);
        let s = Witness::shift(&Witness::union(&a, &b), &Witness::leaf([0]));
        assert_eq!(s.expand(), vec![0, 1, 3, 7]);
        assert!(Witness::empty().expand().is_empty());
        assert!(Witness::leaf(std::iter::empty()).expand().is_empty());
    }

    #[test]
    fn deep_chain_drops_without_overflow() {
        let mut w = Witness::single(0);
        for i in 1..200_000 {
            w = Witness::shift(&w, &Witness::single(i));
        }
        assert_eq!(w.expand().len(), 200_000);
        drop(w);
    }
}
