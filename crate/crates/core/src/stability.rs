//! Blocking pairs, stability and the configuration distance.

use crate::error::{Error, Result};
use crate::model::{Configuration, Instance};
use crate::solver::stable_configuration;

/// Would `p` drop its worst mate (or fill a free slot) to take `q`?
#[inline]
pub(crate) fn wants(config: &Configuration, instance: &Instance, p: usize, q: usize) -> bool {
    let b = instance.caps().get(p);
    if config.degree(p) < b {
        return true;
    }
    matches!(config.worst_mate(p), Some(w) if q < w)
}

/// Rank index below which `p` accepts new mates: `n` if it has a free slot,
/// its worst mate otherwise, 0 if it has no slots at all.
#[inline]
pub(crate) fn acceptance_threshold(config: &Configuration, instance: &Instance, p: usize) -> usize {
    if config.degree(p) < instance.caps().get(p) {
        instance.n()
    } else {
        config.worst_mate(p).unwrap_or(0)
    }
}

pub fn is_blocking_pair(
    config: &Configuration,
    instance: &Instance,
    p: usize,
    q: usize,
) -> Result<bool> {
    let n = instance.n();
    for peer in [p, q] {
        if peer >= n {
            return Err(Error::PeerOutOfRange { peer, n });
        }
    }
    if p == q {
        return Err(Error::SelfPair(p));
    }
    Ok(instance.graph().contains(p, q)
        && !config.are_mates(p, q)
        && wants(config, instance, p, q)
        && wants(config, instance, q, p))
}

/// True when no acceptable pair blocks `config`.
///
/// Only pairs `(p, q)` with `q` below `p`'s acceptance threshold are scanned;
/// every other pair fails the blocking test on `p`'s side.
pub fn is_stable(config: &Configuration, instance: &Instance) -> bool {
    (0..instance.n()).all(|p| {
        let thr = acceptance_threshold(config, instance, p);
        instance
            .graph()
            .neighbors_after(p)
            .take_while(|&q| q < thr)
            .all(|q| config.are_mates(p, q) || !wants(config, instance, q, p))
    })
}

/// Every blocking pair `(p, q)`, `p < q`, found by testing each acceptable
/// pair independently.
pub fn blocking_pairs(config: &Configuration, instance: &Instance) -> Vec<(usize, usize)> {
    instance
        .graph()
        .edges()
        .filter(|&(p, q)| is_blocking_pair(config, instance, p, q).unwrap_or(false))
        .collect()
}

/// Normalized L1 distance between the mate vectors of two 1-matchings, with
/// unmated peers mapped to `n + 1`. Equals 1 between any perfect matching and
/// the empty configuration; two different partial matchings can be further
/// apart than that.
pub fn distance(c1: &Configuration, c2: &Configuration) -> Result<f64> {
    let n = c1.n();
    let all = vec![true; n];
    distance_among(c1, c2, &all)
}

/// [`distance`] restricted to peers flagged in `present`. Present peers are
/// re-ranked `1..=m` among themselves, so absent peers leave no gap.
pub fn distance_among(c1: &Configuration, c2: &Configuration, present: &[bool]) -> Result<f64> {
    let n = c1.n();
    if c2.n() != n {
        return Err(Error::SizeMismatch {
            what: "configuration",
            got: c2.n(),
            expected: n,
        });
    }
    if present.len() != n {
        return Err(Error::SizeMismatch {
            what: "presence mask",
            got: present.len(),
            expected: n,
        });
    }
    for c in [c1, c2] {
        if let Some(p) = (0..n).find(|&p| c.degree(p) > 1) {
            return Err(Error::NotOneMatching {
                peer: p,
                degree: c.degree(p),
            });
        }
    }
    // compact[p] = 1-based rank of p among present peers
    let mut compact = vec![0usize; n];
    let mut m = 0;
    for p in 0..n {
        if present[p] {
            m += 1;
            compact[p] = m;
        }
    }
    if m == 0 {
        return Ok(0.0);
    }
    let sigma = |c: &Configuration, p: usize| -> usize {
        match c.mate(p) {
            Some(q) if present[q] => compact[q],
            _ => m + 1,
        }
    };
    let total: usize = (0..n)
        .filter(|&p| present[p])
        .map(|p| sigma(c1, p).abs_diff(sigma(c2, p)))
        .sum();
    Ok(total as f64 * 2.0 / (m as f64 * (m as f64 + 1.0)))
}

/// Distance from `config` to the unique stable configuration of `instance`.
pub fn disorder(config: &Configuration, instance: &Instance) -> Result<f64> {
    let stable = stable_configuration(instance);
    distance_among(config, &stable, instance.present_mask())
}
