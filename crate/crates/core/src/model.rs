//! Peers, slot capacities, configurations and problem instances.

use crate::error::{Error, Result};
use crate::graph::AcceptanceGraph;

/// Strict total order on `n` peers. A peer's identity is its rank index, so
/// ties cannot be expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ranking {
    n: usize,
}

impl Ranking {
    pub fn new(n: usize) -> Self {
        Ranking { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when `a` is ranked strictly better than `b`.
    #[inline]
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        a < b
    }
}

/// Per-peer maximum number of simultaneous collaborations, `b(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlotCapacities(Vec<usize>);

impl SlotCapacities {
    pub fn new(b: Vec<usize>) -> Self {
        SlotCapacities(b)
    }

    pub fn constant(n: usize, b0: usize) -> Self {
        SlotCapacities(vec![b0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, p: usize) -> usize {
        self.0[p]
    }

    /// `B`, the total number of slots.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_constant(&self, b0: usize) -> bool {
        self.0.iter().all(|&b| b == b0)
    }

    pub(crate) fn set(&mut self, p: usize, b: usize) {
        self.0[p] = b;
    }

    pub(crate) fn insert(&mut self, at: usize, b: usize) {
        self.0.insert(at, b);
    }
}

/// The effective collaboration subgraph: for each peer, the sorted list of
/// its current mates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    mates: Vec<Vec<usize>>,
}

impl Configuration {
    pub fn empty(n: usize) -> Self {
        Configuration {
            mates: vec![Vec::new(); n],
        }
    }

    /// Builds a configuration from unordered pairs. Only structural checks are
    /// made here; use [`Configuration::validate`] against an instance.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut c = Configuration::empty(n);
        for (p, q) in edges {
            for peer in [p, q] {
                if peer >= n {
                    return Err(Error::PeerOutOfRange { peer, n });
                }
            }
            if p == q {
                return Err(Error::SelfPair(p));
            }
            if !c.are_mates(p, q) {
                c.connect(p, q);
            }
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.mates.len()
    }

    #[inline]
    pub fn mates(&self, p: usize) -> &[usize] {
        &self.mates[p]
    }

    #[inline]
    pub fn degree(&self, p: usize) -> usize {
        self.mates[p].len()
    }

    #[inline]
    pub fn are_mates(&self, p: usize, q: usize) -> bool {
        self.mates[p].binary_search(&q).is_ok()
    }

    /// Worst-ranked current mate, if any.
    #[inline]
    pub fn worst_mate(&self, p: usize) -> Option<usize> {
        self.mates[p].last().copied()
    }

    /// The unique mate of `p` in a 1-matching.
    pub fn mate(&self, p: usize) -> Option<usize> {
        self.mates[p].first().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.mates.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.mates.iter().all(Vec::is_empty)
    }

    /// Edges as `(p, q)` with `p < q`, lexicographically ordered.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mates
            .iter()
            .enumerate()
            .flat_map(|(p, m)| m.iter().filter(move |&&q| q > p).map(move |&q| (p, q)))
    }

    pub fn max_degree(&self) -> usize {
        self.mates.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Adds the pair `(p, q)`. Caller guarantees they are not already mates.
    pub fn connect(&mut self, p: usize, q: usize) {
        debug_assert_ne!(p, q);
        let at = self.mates[p].binary_search(&q).unwrap_err();
        self.mates[p].insert(at, q);
        let at = self.mates[q].binary_search(&p).unwrap_err();
        self.mates[q].insert(at, p);
    }

    /// Removes the pair `(p, q)`; returns whether it was present.
    pub fn disconnect(&mut self, p: usize, q: usize) -> bool {
        match self.mates[p].binary_search(&q) {
            Ok(at) => {
                self.mates[p].remove(at);
                let at = self.mates[q]
                    .binary_search(&p)
                    .expect("configuration symmetry");
                self.mates[q].remove(at);
                true
            }
            Err(_) => false,
        }
    }

    /// Drops every collaboration of `p`.
    pub fn detach(&mut self, p: usize) {
        for q in std::mem::take(&mut self.mates[p]) {
            let at = self.mates[q]
                .binary_search(&p)
                .expect("configuration symmetry");
            self.mates[q].remove(at);
        }
    }

    pub(crate) fn insert_peer(&mut self, at: usize) {
        for m in &mut self.mates {
            for q in m.iter_mut() {
                if *q >= at {
                    *q += 1;
                }
            }
        }
        self.mates.insert(at, Vec::new());
    }

    /// Checks symmetry, that every pair is acceptable, and degree bounds.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let n = instance.n();
        if self.n() != n {
            return Err(Error::SizeMismatch {
                what: "configuration",
                got: self.n(),
                expected: n,
            });
        }
        for p in 0..n {
            let m = &self.mates[p];
            if m.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Inconsistent(format!(
                    "mates of {p} are not strictly sorted"
                )));
            }
            if m.len() > instance.caps().get(p) {
                return Err(Error::Inconsistent(format!(
                    "peer {p} has {} mates but {} slots",
                    m.len(),
                    instance.caps().get(p)
                )));
            }
            for &q in m {
                if q >= n || !self.are_mates(q, p) {
                    return Err(Error::Inconsistent(format!(
                        "pair ({p}, {q}) is not symmetric"
                    )));
                }
                if !instance.graph().contains(p, q) {
                    return Err(Error::Inconsistent(format!(
                        "pair ({p}, {q}) is not in the acceptance graph"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// An acceptance graph together with slot capacities. The ranking is implied
/// by peer indices. Peers removed by churn stay in place, flagged absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    graph: AcceptanceGraph,
    caps: SlotCapacities,
    present: Vec<bool>,
    present_count: usize,
}

impl Instance {
    pub fn new(graph: AcceptanceGraph, caps: SlotCapacities) -> Result<Self> {
        if graph.n() != caps.len() {
            return Err(Error::SizeMismatch {
                what: "capacities",
                got: caps.len(),
                expected: graph.n(),
            });
        }
        let n = graph.n();
        Ok(Instance {
            graph,
            caps,
            present: vec![true; n],
            present_count: n,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &AcceptanceGraph {
        &self.graph
    }

    pub fn caps(&self) -> &SlotCapacities {
        &self.caps
    }

    pub fn ranking(&self) -> Ranking {
        Ranking::new(self.n())
    }

    #[inline]
    pub fn is_present(&self, p: usize) -> bool {
        self.present[p]
    }

    pub fn present_mask(&self) -> &[bool] {
        &self.present
    }

    pub fn present_count(&self) -> usize {
        self.present_count
    }

    pub fn present_peers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&p| self.present[p])
    }

    pub fn check_peer(&self, p: usize) -> Result<()> {
        if p >= self.n() {
            return Err(Error::PeerOutOfRange {
                peer: p,
                n: self.n(),
            });
        }
        if !self.present[p] {
            return Err(Error::AbsentPeer(p));
        }
        Ok(())
    }

    /// Takes `v` out of the system: its edges and slots vanish and it is
    /// flagged absent. Indices of other peers are unchanged.
    pub fn remove_peer(&mut self, v: usize) -> Result<()> {
        self.check_peer(v)?;
        self.graph.isolate(v);
        self.caps.set(v, 0);
        self.present[v] = false;
        self.present_count -= 1;
        Ok(())
    }

    /// Inserts a present peer at rank index `at` with the given neighbours
    /// (indices after insertion) and capacity. Peers at `at..` shift by one.
    pub(crate) fn insert_peer(&mut self, at: usize, neighbors: &[usize], cap: usize) {
        self.graph.insert_peer(at, neighbors);
        self.caps.insert(at, cap);
        self.present.insert(at, true);
        self.present_count += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connect_disconnect_keep_symmetry() {
        let mut c = Configuration::empty(4);
        c.connect(2, 0);
        c.connect(0, 3);
        assert_eq!(c.mates(0), &[2, 3]);
        assert_eq!(c.worst_mate(0), Some(3));
        assert!(c.are_mates(3, 0));
        assert!(c.disconnect(3, 0));
        assert!(!c.disconnect(3, 0));
        assert_eq!(c.mates(3), &[] as &[usize]);
        c.detach(0);
        assert!(c.is_empty());
    }

    #[test]
    fn validate_catches_capacity_and_graph_violations() {
        let g = AcceptanceGraph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let inst = Instance::new(g, SlotCapacities::constant(3, 1)).unwrap();
        let ok = Configuration::from_edges(3, [(0, 1)]).unwrap();
        assert!(ok.validate(&inst).is_ok());
        let over = Configuration::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        assert!(matches!(over.validate(&inst), Err(Error::Inconsistent(_))));
        let foreign = Configuration::from_edges(3, [(1, 2)]).unwrap();
        assert!(matches!(
            foreign.validate(&inst),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn removal_flags_absent() {
        let mut inst =
            Instance::new(AcceptanceGraph::complete(3), SlotCapacities::constant(3, 1)).unwrap();
        inst.remove_peer(1).unwrap();
        assert!(!inst.is_present(1));
        assert_eq!(inst.present_count(), 2);
        assert_eq!(inst.graph().degree(1), 0);
        assert!(matches!(inst.remove_peer(1), Err(Error::AbsentPeer(1))));
        assert!(matches!(
            inst.check_peer(7),
            Err(Error::PeerOutOfRange { .. })
        ));
    }

    #[test]
    fn capacities_total() {
        let caps = SlotCapacities::new(vec![3, 2, 2, 2]);
        assert_eq!(caps.total(), 9);
        assert_eq!(caps.max(), 3);
        assert!(!caps.is_constant(2));
    }
}
