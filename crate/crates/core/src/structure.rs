//! Clustering and stratification measures of stable configurations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{gen_complete, sample_capacities_normal, Seed};
use crate::model::{Configuration, Instance, Ranking};
use crate::solver::stable_configuration;

/// A mean together with the number of items it was taken over. A `support`
/// of zero flags an empty mean (reported as 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mean {
    pub value: f64,
    pub support: usize,
}

impl Mean {
    fn of(sum: f64, support: usize) -> Self {
        let value = if support == 0 {
            0.0
        } else {
            sum / support as f64
        };
        Mean { value, support }
    }

    pub fn is_empty(&self) -> bool {
        self.support == 0
    }
}

/// Connected components of the collaboration graph, each sorted, ordered by
/// smallest member. Isolated peers are singletons.
pub fn connected_components(config: &Configuration) -> Vec<Vec<usize>> {
    let n = config.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        stack.push(root);
        let mut comp = Vec::new();
        while let Some(p) = stack.pop() {
            comp.push(p);
            for &q in config.mates(p) {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Mean size of the components that contain at least two peers.
pub fn average_cluster_size(config: &Configuration) -> Mean {
    let sizes: Vec<usize> = connected_components(config)
        .into_iter()
        .map(|c| c.len())
        .filter(|&s| s >= 2)
        .collect();
    let m = Mean::of(sizes.iter().sum::<usize>() as f64, sizes.len());
    if m.is_empty() {
        log::warn!("no component with two or more peers");
    }
    m
}

/// Mean Max Offset: over matched peers, the mean of the largest rank gap to a
/// current mate.
pub fn mmo(config: &Configuration, ranking: Ranking) -> Mean {
    debug_assert_eq!(config.n(), ranking.n());
    let (sum, count) = (0..config.n())
        .filter_map(|p| {
            let m = config.mates(p);
            let lo = *m.first()?;
            let hi = *m.last()?;
            Some(p.abs_diff(lo).max(p.abs_diff(hi)))
        })
        .fold((0usize, 0usize), |(s, c), off| (s + off, c + 1));
    let m = Mean::of(sum as f64, count);
    if m.is_empty() {
        log::warn!("no matched peer");
    }
    m
}

/// MMO of one `(b0 + 1)`-clique, the value reached by constant `b0`-matching
/// on a complete graph: `(1 / (b0 + 1)) Σ_k max(k, b0 - k)`.
pub fn mmo_closed_form(b0: usize) -> Result<f64> {
    if b0 == 0 {
        return Err(Error::param("b0", "must be at least 1"));
    }
    let sum: usize = (0..=b0).map(|k| k.max(b0 - k)).sum();
    Ok(sum as f64 / (b0 + 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub mean_cluster: f64,
    pub mmo: f64,
    pub seed_count: usize,
}

/// Stable configurations of the complete graph on `n` peers with capacities
/// drawn from `N(mean_b, sigma²)`, averaged over `seeds` runs per sigma. Run
/// `k` of every sigma uses seed `base + k`.
pub fn sigma_sweep(
    mean_b: f64,
    sigmas: &[f64],
    n: usize,
    seeds: usize,
    base: Seed,
) -> Result<Vec<SweepRow>> {
    if seeds == 0 {
        return Err(Error::param("seeds", "need at least one run"));
    }
    let cells: Vec<(usize, u64)> = (0..sigmas.len())
        .flat_map(|s| (0..seeds as u64).map(move |k| (s, k)))
        .collect();
    let results: Vec<(usize, f64, f64)> = cells
        .par_iter()
        .map(|&(s, k)| {
            let caps = sample_capacities_normal(n, mean_b, sigmas[s], base.offset(k))?;
            let instance = Instance::new(gen_complete(n), caps)?;
            let config = stable_configuration(&instance);
            Ok((
                s,
                average_cluster_size(&config).value,
                mmo(&config, instance.ranking()).value,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(sigmas
        .iter()
        .enumerate()
        .map(|(s, &sigma)| {
            let (mut cl, mut mm) = (0.0, 0.0);
            for r in results.iter().filter(|r| r.0 == s) {
                cl += r.1;
                mm += r.2;
            }
            SweepRow {
                sigma,
                mean_cluster: cl / seeds as f64,
                mmo: mm / seeds as f64,
                seed_count: seeds,
            }
        })
        .collect())
}
