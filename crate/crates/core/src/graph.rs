//! Acceptance graphs: which pairs of peers are willing to collaborate.
//!
//! Peers are indexed `0..n` by rank, index 0 being the best peer. Complete
//! graphs are kept implicit so that structural experiments on tens of
//! thousands of peers do not materialize `n²` adjacency entries.

use std::iter::Chain;
use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Repr {
    Complete,
    /// Sorted, deduplicated neighbour lists.
    Lists(Vec<Vec<usize>>),
}

/// Symmetric loopless graph over peers `0..n`.
#[derive(Clone, Debug)]
pub struct AcceptanceGraph {
    n: usize,
    repr: Repr,
}

/// Neighbours of a peer in increasing rank index (best first).
pub enum Neighbors<'a> {
    Complete(Chain<Range<usize>, Range<usize>>),
    List(std::iter::Copied<std::slice::Iter<'a, usize>>),
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            Neighbors::Complete(it) => it.next(),
            Neighbors::List(it) => it.next(),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self {
            Neighbors::Complete(it) => it.size_hint(),
            Neighbors::List(it) => it.size_hint(),
        }
    }
}

impl AcceptanceGraph {
    pub fn empty(n: usize) -> Self {
        AcceptanceGraph {
            n,
            repr: Repr::Lists(vec![Vec::new(); n]),
        }
    }

    pub fn complete(n: usize) -> Self {
        AcceptanceGraph {
            n,
            repr: Repr::Complete,
        }
    }

    /// Builds a graph from unordered pairs. Duplicates are merged; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut lists = vec![Vec::new(); n];
        for (p, q) in edges {
            check_pair(n, p, q)?;
            lists[p].push(q);
            lists[q].push(p);
        }
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Ok(AcceptanceGraph {
            n,
            repr: Repr::Lists(lists),
        })
    }

    /// Builds a graph from neighbour lists that are already sorted and
    /// symmetric. Used by generators that produce adjacency directly.
    pub(crate) fn from_sorted_lists(lists: Vec<Vec<usize>>) -> Self {
        debug_assert!(lists.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        AcceptanceGraph {
            n: lists.len(),
            repr: Repr::Lists(lists),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_complete_repr(&self) -> bool {
        matches!(self.repr, Repr::Complete)
    }

    pub fn contains(&self, p: usize, q: usize) -> bool {
        if p == q || p >= self.n || q >= self.n {
            return false;
        }
        match &self.repr {
            Repr::Complete => true,
            Repr::Lists(l) => l[p].binary_search(&q).is_ok(),
        }
    }

    pub fn degree(&self, p: usize) -> usize {
        match &self.repr {
            Repr::Complete => self.n.saturating_sub(1),
            Repr::Lists(l) => l[p].len(),
        }
    }

    pub fn neighbors(&self, p: usize) -> Neighbors<'_> {
        match &self.repr {
            Repr::Complete => Neighbors::Complete((0..p).chain(p + 1..self.n)),
            Repr::Lists(l) => Neighbors::List(l[p].iter().copied()),
        }
    }

    /// Neighbours of `p` ranked strictly worse than `p`, best first.
    pub fn neighbors_after(&self, p: usize) -> Neighbors<'_> {
        match &self.repr {
            Repr::Complete => Neighbors::Complete((p + 1..self.n).chain(0..0)),
            Repr::Lists(l) => {
                let from = l[p].partition_point(|&q| q <= p);
                Neighbors::List(l[p][from..].iter().copied())
            }
        }
    }

    /// The `k`-th neighbour of `p` in rank order.
    pub fn neighbor_at(&self, p: usize, k: usize) -> usize {
        match &self.repr {
            Repr::Complete => {
                if k < p {
                    k
                } else {
                    k + 1
                }
            }
            Repr::Lists(l) => l[p][k],
        }
    }

    pub fn edge_count(&self) -> usize {
        match &self.repr {
            Repr::Complete => self.n * self.n.saturating_sub(1) / 2,
            Repr::Lists(l) => l.iter().map(Vec::len).sum::<usize>() / 2,
        }
    }

    /// All edges as `(p, q)` with `p < q`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |p| self.neighbors_after(p).map(move |q| (p, q)))
    }

    pub fn add_edge(&mut self, p: usize, q: usize) -> Result<()> {
        check_pair(self.n, p, q)?;
        let lists = self.lists_mut();
        if let Err(at) = lists[p].binary_search(&q) {
            lists[p].insert(at, q);
            let at = lists[q].binary_search(&p).unwrap_err();
            lists[q].insert(at, p);
        }
        Ok(())
    }

    /// Removes every edge incident to `v`.
    pub fn isolate(&mut self, v: usize) {
        let lists = self.lists_mut();
        let old = std::mem::take(&mut lists[v]);
        for q in old {
            if let Ok(at) = lists[q].binary_search(&v) {
                lists[q].remove(at);
            }
        }
    }

    /// Inserts a new peer at rank index `at`; peers at `at..` shift down by
    /// one. `neighbors` are given in the indexing *after* insertion.
    pub(crate) fn insert_peer(&mut self, at: usize, neighbors: &[usize]) {
        let lists = self.lists_mut();
        for l in lists.iter_mut() {
            for q in l.iter_mut() {
                if *q >= at {
                    *q += 1;
                }
            }
        }
        lists.insert(at, Vec::new());
        self.n += 1;
        for &q in neighbors {
            // Endpoints come from the caller's own bookkeeping.
            self.add_edge(at, q).expect("valid inserted edge");
        }
    }

    fn lists_mut(&mut self) -> &mut Vec<Vec<usize>> {
        if let Repr::Complete = self.repr {
            let n = self.n;
            let lists = (0..n)
                .map(|p| (0..n).filter(|&q| q != p).collect())
                .collect();
            self.repr = Repr::Lists(lists);
        }
        match &mut self.repr {
            Repr::Lists(l) => l,
            Repr::Complete => unreachable!(),
        }
    }
}

impl PartialEq for AcceptanceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.edge_count() == other.edge_count()
            && self.edges().eq(other.edges())
    }
}

impl Eq for AcceptanceGraph {}

fn check_pair(n: usize, p: usize, q: usize) -> Result<()> {
    for peer in [p, q] {
        if peer >= n {
            return Err(Error::PeerOutOfRange { peer, n });
        }
    }
    if p == q {
        return Err(Error::SelfPair(p));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_and_lists_agree() {
        let k4 = AcceptanceGraph::complete(4);
        let all = (0..4).flat_map(|p| (p + 1..4).map(move |q| (p, q)));
        let lists = AcceptanceGraph::from_edges(4, all).unwrap();
        assert_eq!(k4, lists);
        assert_eq!(k4.edge_count(), 6);
        assert_eq!(k4.neighbors(2).collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(k4.neighbors_after(1).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(k4.neighbor_at(2, 2), 3);
        assert_eq!(lists.neighbor_at(2, 2), 3);
    }

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert!(matches!(
            AcceptanceGraph::from_edges(3, [(1, 1)]),
            Err(Error::SelfPair(1))
        ));
        assert!(matches!(
            AcceptanceGraph::from_edges(3, [(0, 3)]),
            Err(Error::PeerOutOfRange { peer: 3, n: 3 })
        ));
    }

    #[test]
    fn symmetric_and_deduplicated() {
        let g = AcceptanceGraph::from_edges(3, [(0, 1), (1, 0), (2, 1)]).unwrap();
        assert!(g.contains(1, 0) && g.contains(0, 1) && g.contains(1, 2));
        assert!(!g.contains(0, 2) && !g.contains(1, 1));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn isolate_materializes_complete() {
        let mut g = AcceptanceGraph::complete(4);
        g.isolate(1);
        assert_eq!(g.degree(1), 0);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (0, 3), (2, 3)]);
    }

    #[test]
    fn insert_shifts_indices() {
        let mut g = AcceptanceGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        g.insert_peer(1, &[0, 3]);
        assert_eq!(g.n(), 4);
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 3), (2, 3)]
        );
    }
}
