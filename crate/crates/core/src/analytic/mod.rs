//! Probability that two peers end up matched when the acceptance graph is
//! Erdős–Rényi `G(n, p)`.
//!
//! Two families of models live here: the independent-events recurrences,
//! which are cheap and scale to thousands of peers, and exact/empirical laws
//! (full enumeration, Monte Carlo) used to measure how far the recurrences
//! are from the truth.
//!
//! Indices are 0-based throughout: peer 0 is the best peer and choice 0 is a
//! peer's best mate.

mod oracle;
mod recurrence;

pub use oracle::{exact_distribution_oracle, monte_carlo_distribution, EXACT_MAX_PEERS};
pub use recurrence::{
    b0_matching_rows, independent_1matching, independent_b0matching, one_matching_mass,
    one_matching_rows, sweep_b0_matching, sweep_one_matching, MatchDistribution1,
    MatchDistributionB, PairBlock,
};

use crate::error::{Error, Result};

/// Anything that gives the probability of `i` and `j` being matched.
pub trait MatchingLaw {
    fn n(&self) -> usize;

    /// Probability that `i` and `j` collaborate, summed over choice indices.
    fn match_prob(&self, i: usize, j: usize) -> f64;

    fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n()).map(|j| self.match_prob(i, j)).collect()
    }

    /// Expected number of mates of `i`.
    fn mass(&self, i: usize) -> f64 {
        (0..self.n()).map(|j| self.match_prob(i, j)).sum()
    }
}

/// Per-peer total matching mass (row sums).
pub fn mass_profile<L: MatchingLaw + ?Sized>(law: &L) -> Vec<f64> {
    (0..law.n()).map(|i| law.mass(i)).collect()
}

/// `Dc(c, i, j)`: probability that the `c`-th choice of `i` is `j`, stored
/// densely. Used for exact and empirical laws as well as for the marginals
/// of the independent `b0`-matching model.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceDistribution {
    n: usize,
    choices: usize,
    data: Vec<f64>,
}

impl ChoiceDistribution {
    pub fn zeros(n: usize, choices: usize) -> Self {
        ChoiceDistribution {
            n,
            choices,
            data: vec![0.0; choices * n * n],
        }
    }

    pub(crate) fn from_data(n: usize, choices: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), choices * n * n);
        ChoiceDistribution { n, choices, data }
    }

    pub fn choices(&self) -> usize {
        self.choices
    }

    #[inline]
    fn idx(&self, c: usize, i: usize, j: usize) -> usize {
        (c * self.n + i) * self.n + j
    }

    #[inline]
    pub fn get(&self, c: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(c, i, j)]
    }

    #[inline]
    pub(crate) fn add(&mut self, c: usize, i: usize, j: usize, v: f64) {
        let k = self.idx(c, i, j);
        self.data[k] += v;
    }

    /// `Dc(c, i, ·)`.
    pub fn choice_row(&self, c: usize, i: usize) -> &[f64] {
        let start = self.idx(c, i, 0);
        &self.data[start..start + self.n]
    }
}

impl MatchingLaw for ChoiceDistribution {
    fn n(&self) -> usize {
        self.n
    }

    fn match_prob(&self, i: usize, j: usize) -> f64 {
        (0..self.choices).map(|c| self.get(c, i, j)).sum()
    }
}

/// `½ Σ |a - b|` over two (sub-)probability vectors of equal length.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

pub fn max_abs_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Limit density of the best peer's mate offset `β` (in units of `n`) when
/// `p = d / n`: `d e^{-βd}`.
pub fn fluid_density(beta: f64, d: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::param("beta", format!("{beta} must be non-negative")));
    }
    if !(d > 0.0) {
        return Err(Error::param("d", format!("{d} must be positive")));
    }
    Ok(d * (-beta * d).exp())
}

/// Scaled mate-offset profile of peer `1 + ⌊αn⌋` under `p = d / n`: pairs
/// `(β, n·D(i, i + βn))` for every other peer, computed with the independent
/// 1-matching recurrence.
pub fn scaled_profile(n: usize, d: f64, alpha: f64) -> Result<Vec<(f64, f64)>> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} outside [0, 1)")));
    }
    let p = d / n as f64;
    let i = (alpha * n as f64).floor() as usize;
    let row = one_matching_rows(n, p, &[i])?.pop().expect("one row");
    Ok(row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, &v)| ((j as f64 - i as f64) / n as f64, n as f64 * v))
        .collect())
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} outside [0, 1]")));
    }
    Ok(())
}
