//! Reference laws: exhaustive enumeration of every graph on a few peers, and
//! Monte Carlo over random graphs. Both solve each graph with the greedy
//! stable-configuration construction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_probability, ChoiceDistribution};
use crate::error::{Error, Result};
use crate::generators::{gnp, Seed};
use crate::graph::AcceptanceGraph;
use crate::model::{Configuration, Instance, SlotCapacities};
use crate::solver::stable_configuration;

/// Largest population accepted by [`exact_distribution_oracle`].
pub const EXACT_MAX_PEERS: usize = 6;

const MC_CHUNK: u64 = 1024;

fn check_caps(n: usize, caps: &SlotCapacities) -> Result<usize> {
    if caps.len() != n {
        return Err(Error::SizeMismatch {
            what: "capacities",
            got: caps.len(),
            expected: n,
        });
    }
    Ok(caps.max().max(1))
}

/// Exact `Dc(c, i, j)` under `G(n, p)`: every one of the `2^{n(n-1)/2}`
/// graphs is solved and weighted by `p^|E| (1-p)^{C(n,2) - |E|}`.
pub fn exact_distribution_oracle(
    n: usize,
    p: f64,
    caps: &SlotCapacities,
) -> Result<ChoiceDistribution> {
    check_probability(p)?;
    if n > EXACT_MAX_PEERS {
        return Err(Error::TooLarge(format!(
            "{n} peers (exact enumeration is limited to {EXACT_MAX_PEERS})"
        )));
    }
    let choices = check_caps(n, caps)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();
    let mut out = ChoiceDistribution::zeros(n, choices);
    for mask in 0u32..(1u32 << m) {
        let k = mask.count_ones() as i32;
        let weight = p.powi(k) * (1.0 - p).powi(m as i32 - k);
        if weight == 0.0 {
            continue;
        }
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e);
        let graph = AcceptanceGraph::from_edges(n, edges)?;
        let config = stable_configuration(&Instance::new(graph, caps.clone())?);
        record(&config, |c, i, j| out.add(c, i, j, weight));
    }
    Ok(out)
}

fn record(config: &Configuration, mut hit: impl FnMut(usize, usize, usize)) {
    for i in 0..config.n() {
        for (c, &j) in config.mates(i).iter().enumerate() {
            hit(c, i, j);
        }
    }
}

/// Empirical `Dc(c, i, j)` over `draws` independent `G(n, p)` graphs. Draws
/// are split in fixed chunks, each on its own ChaCha stream, so the result
/// depends only on the seed and not on the thread count.
pub fn monte_carlo_distribution(
    n: usize,
    p: f64,
    caps: &SlotCapacities,
    draws: u64,
    seed: Seed,
) -> Result<ChoiceDistribution> {
    check_probability(p)?;
    if draws == 0 {
        return Err(Error::param("draws", "need at least one draw"));
    }
    let choices = check_caps(n, caps)?;
    let cells = choices * n * n;
    let chunks = draws.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .fold(
            || vec![0u64; cells],
            |mut counts, chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
                rng.set_stream(chunk);
                let todo = MC_CHUNK.min(draws - chunk * MC_CHUNK);
                for _ in 0..todo {
                    let graph = gnp(n, p, &mut rng);
                    let instance = Instance::new(graph, caps.clone()).expect("sizes checked");
                    let config = stable_configuration(&instance);
                    record(&config, |c, i, j| counts[(c * n + i) * n + j] += 1);
                }
                counts
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let data = counts
        .into_iter()
        .map(|c| c as f64 / draws as f64)
        .collect();
    Ok(ChoiceDistribution::from_data(n, choices, data))
}
