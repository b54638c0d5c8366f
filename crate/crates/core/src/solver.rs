//! The centralized greedy construction of the unique stable configuration,
//! its exhaustive cross-check, and the corresponding initiative schedule.

use crate::error::{Error, Result};
use crate::model::{Configuration, Instance};
use crate::stability::is_stable;

/// Largest instance accepted by [`oracle_stable`].
pub const ORACLE_MAX_PEERS: usize = 12;
pub const ORACLE_MAX_EDGES: usize = 20;

/// A peer proposing a collaboration to a target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Initiative {
    pub proposer: usize,
    pub target: usize,
}

/// Peers are visited best first; each one connects to every acceptable worse
/// peer, in rank order, while both still have a free slot.
pub fn stable_configuration(instance: &Instance) -> Configuration {
    let mut config = Configuration::empty(instance.n());
    greedy(instance, |i, j| config.connect(i, j));
    config
}

/// The connect events of [`stable_configuration`] as active initiatives taken
/// by the better peer of each pair. Never longer than `B / 2`.
pub fn replay_optimal_schedule(instance: &Instance) -> Vec<Initiative> {
    let mut schedule = Vec::new();
    greedy(instance, |proposer, target| {
        schedule.push(Initiative { proposer, target })
    });
    schedule
}

fn greedy(instance: &Instance, mut connect: impl FnMut(usize, usize)) {
    let graph = instance.graph();
    let mut free: Vec<usize> = instance.caps().as_slice().to_vec();
    for i in 0..instance.n() {
        if free[i] == 0 {
            continue;
        }
        for j in graph.neighbors_after(i) {
            if free[j] > 0 {
                connect(i, j);
                free[i] -= 1;
                free[j] -= 1;
                if free[i] == 0 {
                    break;
                }
            }
        }
    }
}

/// Every stable configuration of a small instance, by enumerating all
/// degree-bounded subgraphs of the acceptance graph.
pub fn oracle_stable(instance: &Instance) -> Result<Vec<Configuration>> {
    let n = instance.n();
    let edges: Vec<(usize, usize)> = instance.graph().edges().collect();
    if n > ORACLE_MAX_PEERS || edges.len() > ORACLE_MAX_EDGES {
        return Err(Error::TooLarge(format!(
            "{n} peers and {} edges (limit {ORACLE_MAX_PEERS} peers, {ORACLE_MAX_EDGES} edges)",
            edges.len()
        )));
    }
    let mut found = Vec::new();
    let mut config = Configuration::empty(n);
    enumerate(instance, &edges, 0, &mut config, &mut found);
    Ok(found)
}

fn enumerate(
    instance: &Instance,
    edges: &[(usize, usize)],
    k: usize,
    config: &mut Configuration,
    found: &mut Vec<Configuration>,
) {
    let Some(&(p, q)) = edges.get(k) else {
        if is_stable(config, instance) {
            found.push(config.clone());
        }
        return;
    };
    enumerate(instance, edges, k + 1, config, found);
    let caps = instance.caps();
    if config.degree(p) < caps.get(p) && config.degree(q) < caps.get(q) {
        config.connect(p, q);
        enumerate(instance, edges, k + 1, config, found);
        config.disconnect(p, q);
    }
}

/// Number of slots left unused in `config`.
pub fn unfilled_slots(config: &Configuration, instance: &Instance) -> usize {
    instance
        .present_peers()
        .map(|p| instance.caps().get(p) - config.degree(p).min(instance.caps().get(p)))
        .sum()
}
