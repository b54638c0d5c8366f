#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use strata_core::{AcceptanceGraph, Configuration, Instance, SlotCapacities};

/// Random instance with `n` peers, edge probability `p` and capacities in
/// `1..=max_cap`.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, p: f64, max_cap: usize) -> Instance {
    let mut g = AcceptanceGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    let caps = (0..n).map(|_| rng.random_range(1..=max_cap)).collect();
    Instance::new(g, SlotCapacities::new(caps)).unwrap()
}

/// Some valid configuration of `instance`, built from its edges in random
/// order while respecting capacities.
pub fn random_configuration<R: Rng>(rng: &mut R, instance: &Instance) -> Configuration {
    let mut edges: Vec<_> = instance.graph().edges().collect();
    edges.shuffle(rng);
    let mut c = Configuration::empty(instance.n());
    for (p, q) in edges {
        if rng.random_bool(0.5)
            && c.degree(p) < instance.caps().get(p)
            && c.degree(q) < instance.caps().get(q)
        {
            c.connect(p, q);
        }
    }
    c
}
