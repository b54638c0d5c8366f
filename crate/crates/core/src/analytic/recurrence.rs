//! Independent-events recurrences for 1-matching and `b0`-matching.
//!
//! Both recurrences only ever read, for each peer, the running sum of the
//! probabilities computed so far in its row. The sweeps below keep those sums
//! and hand every pair to a visitor, so callers that need a handful of rows
//! or per-peer aggregates run in `O(n)` memory.

use super::{check_probability, ChoiceDistribution, MatchingLaw};
use crate::error::{Error, Result};

/// Visits every pair `i < j` in loop order with the value of the independent
/// 1-matching recurrence
/// `D(i,j) = p (1 - Σ_{k<j} D(i,k)) (1 - Σ_{k<i} D(j,k))`.
pub fn sweep_one_matching(
    n: usize,
    p: f64,
    mut visit: impl FnMut(usize, usize, f64),
) -> Result<()> {
    check_probability(p)?;
    let mut acc = vec![0.0f64; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = p * (1.0 - acc[i]) * (1.0 - acc[j]);
            acc[i] += d;
            acc[j] += d;
            visit(i, j, d);
        }
    }
    Ok(())
}

/// `D(i, j)` for the independent 1-matching model, stored as a packed upper
/// triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchDistribution1 {
    n: usize,
    p: f64,
    upper: Vec<f64>,
}

#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl MatchDistribution1 {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[packed(self.n, i, j)],
            std::cmp::Ordering::Greater => self.upper[packed(self.n, j, i)],
        }
    }

    /// As a single-choice [`ChoiceDistribution`].
    pub fn to_choice(&self) -> ChoiceDistribution {
        let n = self.n;
        let mut out = ChoiceDistribution::zeros(n, 1);
        for i in 0..n {
            for j in 0..n {
                out.add(0, i, j, self.get(i, j));
            }
        }
        out
    }
}

impl MatchingLaw for MatchDistribution1 {
    fn n(&self) -> usize {
        self.n
    }

    fn match_prob(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

pub fn independent_1matching(n: usize, p: f64) -> Result<MatchDistribution1> {
    let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    sweep_one_matching(n, p, |_, _, d| upper.push(d))?;
    Ok(MatchDistribution1 { n, p, upper })
}

/// Full rows `D(i, ·)` for the requested peers only.
pub fn one_matching_rows(n: usize, p: f64, rows: &[usize]) -> Result<Vec<Vec<f64>>> {
    let slot = row_slots(n, rows)?;
    let mut out = vec![vec![0.0; n]; rows.len()];
    sweep_one_matching(n, p, |i, j, d| {
        if let Some(s) = slot[i] {
            out[s][j] = d;
        }
        if let Some(s) = slot[j] {
            out[s][i] = d;
        }
    })?;
    Ok(out)
}

/// Row sums of `D` for every peer.
pub fn one_matching_mass(n: usize, p: f64) -> Result<Vec<f64>> {
    let mut mass = vec![0.0; n];
    sweep_one_matching(n, p, |i, j, d| {
        mass[i] += d;
        mass[j] += d;
    })?;
    Ok(mass)
}

fn row_slots(n: usize, rows: &[usize]) -> Result<Vec<Option<usize>>> {
    let mut slot = vec![None; n];
    for (s, &r) in rows.iter().enumerate() {
        if r >= n {
            return Err(Error::PeerOutOfRange { peer: r, n });
        }
        slot[r] = Some(s);
    }
    Ok(slot)
}

/// One step of the `b0` recurrence: all choice-pair probabilities of `(i, j)`.
pub struct PairBlock<'a> {
    pub i: usize,
    pub j: usize,
    pub b0: usize,
    /// `Dcc[ci * b0 + cj]`: choice `ci` of `i` is `j` and choice `cj` of `j` is `i`.
    pub dcc: &'a [f64],
    /// `Dc(c, i, j)`, summed over `j`'s choice index.
    pub dc_ij: &'a [f64],
    /// `Dc(c, j, i)`, summed over `i`'s choice index.
    pub dc_ji: &'a [f64],
}

impl PairBlock<'_> {
    /// Total probability that `i` and `j` are matched.
    pub fn total(&self) -> f64 {
        self.dc_ij.iter().sum()
    }
}

/// Visits every pair `i < j` in loop order with the independent
/// `b0`-matching recurrence.
///
/// For each peer and choice `c` a running sum `S_c` of `Dc(c, peer, ·)` is
/// kept, with `S_0 = 1` standing for the certain event behind choice zero.
/// Then `Dcc(ci, cj, i, j) = p (S_{ci-1}(i) - S_{ci}(i)) (S_{cj-1}(j) - S_{cj}(j))`
/// where, at the time `(i, j)` is visited, `i`'s sums cover `k < j` and `j`'s
/// sums cover `k < i`.
pub fn sweep_b0_matching(
    n: usize,
    p: f64,
    b0: usize,
    mut visit: impl FnMut(&PairBlock<'_>),
) -> Result<()> {
    check_probability(p)?;
    if b0 == 0 {
        return Err(Error::param("b0", "must be at least 1"));
    }
    let w = b0 + 1;
    let mut acc = vec![0.0f64; n * w];
    for i in 0..n {
        acc[i * w] = 1.0;
    }
    let mut fi = vec![0.0; b0];
    let mut fj = vec![0.0; b0];
    let mut dcc = vec![0.0; b0 * b0];
    let mut dc_ij = vec![0.0; b0];
    let mut dc_ji = vec![0.0; b0];
    for i in 0..n {
        for j in i + 1..n {
            for c in 0..b0 {
                fi[c] = acc[i * w + c] - acc[i * w + c + 1];
                fj[c] = acc[j * w + c] - acc[j * w + c + 1];
            }
            for ci in 0..b0 {
                for cj in 0..b0 {
                    dcc[ci * b0 + cj] = p * fi[ci] * fj[cj];
                }
            }
            for c in 0..b0 {
                dc_ij[c] = (0..b0).map(|cj| dcc[c * b0 + cj]).sum();
                dc_ji[c] = (0..b0).map(|ci| dcc[ci * b0 + c]).sum();
            }
            for c in 0..b0 {
                acc[i * w + c + 1] += dc_ij[c];
                acc[j * w + c + 1] += dc_ji[c];
            }
            visit(&PairBlock {
                i,
                j,
                b0,
                dcc: &dcc,
                dc_ij: &dc_ij,
                dc_ji: &dc_ji,
            });
        }
    }
    Ok(())
}

/// Independent `b0`-matching law with both the joint choice tensor and its
/// per-choice marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchDistributionB {
    n: usize,
    p: f64,
    b0: usize,
    /// `b0²` values per pair `i < j`, pairs in packed order.
    dcc: Vec<f64>,
    dc: ChoiceDistribution,
}

impl MatchDistributionB {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn b0(&self) -> usize {
        self.b0
    }

    /// `Dcc(ci, cj, i, j)`; zero on the diagonal.
    pub fn dcc(&self, ci: usize, cj: usize, i: usize, j: usize) -> f64 {
        let b0 = self.b0;
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.dcc[packed(self.n, i, j) * b0 * b0 + ci * b0 + cj],
            std::cmp::Ordering::Greater => self.dcc[packed(self.n, j, i) * b0 * b0 + cj * b0 + ci],
        }
    }

    /// `Dc(c, i, j)`.
    pub fn dc(&self, c: usize, i: usize, j: usize) -> f64 {
        self.dc.get(c, i, j)
    }

    pub fn choices(&self) -> &ChoiceDistribution {
        &self.dc
    }
}

impl MatchingLaw for MatchDistributionB {
    fn n(&self) -> usize {
        self.n
    }

    fn match_prob(&self, i: usize, j: usize) -> f64 {
        self.dc.match_prob(i, j)
    }
}

pub fn independent_b0matching(n: usize, p: f64, b0: usize) -> Result<MatchDistributionB> {
    let mut dcc = Vec::with_capacity(n * n.saturating_sub(1) / 2 * b0 * b0);
    let mut dc = ChoiceDistribution::zeros(n, b0);
    sweep_b0_matching(n, p, b0, |blk| {
        dcc.extend_from_slice(blk.dcc);
        for c in 0..blk.b0 {
            dc.add(c, blk.i, blk.j, blk.dc_ij[c]);
            dc.add(c, blk.j, blk.i, blk.dc_ji[c]);
        }
    })?;
    Ok(MatchDistributionB { n, p, b0, dcc, dc })
}

/// `Dc(c, i, ·)` for the requested peers: `out[row][c][j]`.
pub fn b0_matching_rows(n: usize, p: f64, b0: usize, rows: &[usize]) -> Result<Vec<Vec<Vec<f64>>>> {
    let slot = row_slots(n, rows)?;
    let mut out = vec![vec![vec![0.0; n]; b0]; rows.len()];
    sweep_b0_matching(n, p, b0, |blk| {
        if let Some(s) = slot[blk.i] {
            for (row, &v) in out[s].iter_mut().zip(blk.dc_ij) {
                row[blk.j] = v;
            }
        }
        if let Some(s) = slot[blk.j] {
            for (row, &v) in out[s].iter_mut().zip(blk.dc_ji) {
                row[blk.i] = v;
            }
        }
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_pair_is_p() {
        for n in [2, 3, 10] {
            let d = independent_1matching(n, 0.3).unwrap();
            assert_eq!(d.get(0, 1), 0.3);
            assert_eq!(d.get(1, 0), 0.3);
            assert_eq!(d.get(1, 1), 0.0);
        }
    }

    #[test]
    fn second_and_third_peer() {
        let p: f64 = 0.37;
        let d = independent_1matching(3, p).unwrap();
        let expect = p * (1.0 - p) * (1.0 - p * (1.0 - p));
        assert!((d.get(1, 2) - expect).abs() < 1e-15);
    }

    #[test]
    fn best_row_is_geometric() {
        let p: f64 = 0.05;
        let d = independent_1matching(200, p).unwrap();
        for j in 1..200 {
            let expect = p * (1.0 - p).powi(j as i32 - 1);
            assert!((d.get(0, j) - expect).abs() < 1e-14, "j = {j}");
        }
    }

    #[test]
    fn streaming_rows_match_the_stored_matrix() {
        let d = independent_1matching(60, 0.1).unwrap();
        let rows = one_matching_rows(60, 0.1, &[0, 17, 59]).unwrap();
        for (s, &r) in [0usize, 17, 59].iter().enumerate() {
            assert_eq!(rows[s], d.row(r));
        }
        let mass = one_matching_mass(60, 0.1).unwrap();
        for (i, m) in mass.iter().enumerate() {
            assert!((m - d.mass(i)).abs() < 1e-12);
        }
        assert!(one_matching_rows(5, 0.1, &[5]).is_err());
    }

    #[test]
    fn probability_out_of_range() {
        assert!(independent_1matching(4, 1.5).is_err());
        assert!(independent_b0matching(4, -0.1, 2).is_err());
        assert!(independent_b0matching(4, 0.1, 0).is_err());
    }

    #[test]
    fn complete_graph_pairs_ranks() {
        let d = independent_1matching(6, 1.0).unwrap();
        for i in 0..6 {
            assert_eq!(d.mass(i), 1.0);
            assert_eq!(d.get(i, i ^ 1), 1.0);
        }
    }

    #[test]
    fn b0_one_reduces_to_one_matching() {
        let one = independent_1matching(40, 0.2).unwrap();
        let b = independent_b0matching(40, 0.2, 1).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(b.dc(0, i, j), one.get(i, j));
            }
        }
    }

    #[test]
    fn b0_rows_match_stored_tensor() {
        let b = independent_b0matching(30, 0.3, 3).unwrap();
        let rows = b0_matching_rows(30, 0.3, 3, &[4, 29]).unwrap();
        for (s, &r) in [4usize, 29].iter().enumerate() {
            for (c, row) in rows[s].iter().enumerate() {
                assert_eq!(row, b.choices().choice_row(c, r));
            }
        }
    }

    proptest! {
        #[test]
        fn one_matching_bounds(n in 2usize..80, p in 0.0f64..=1.0) {
            let d = independent_1matching(n, p).unwrap();
            for i in 0..n {
                prop_assert!(d.mass(i) <= 1.0 + 1e-12);
                for j in 0..n {
                    let v = d.get(i, j);
                    prop_assert!((0.0..=p + 1e-15).contains(&v));
                    prop_assert_eq!(v, d.get(j, i));
                }
            }
        }

        #[test]
        fn shared_indices_do_not_depend_on_n(n in 2usize..60, extra in 1usize..40, p in 0.0f64..=1.0) {
            let small = independent_1matching(n, p).unwrap();
            let big = independent_1matching(n + extra, p).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((small.get(i, j) - big.get(i, j)).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn b0_matching_invariants(n in 2usize..30, p in 0.0f64..=1.0, b0 in 1usize..4) {
            let d = independent_b0matching(n, p, b0).unwrap();
            for i in 0..n {
                prop_assert!(d.mass(i) <= b0 as f64 + 1e-9);
                for j in 0..n {
                    for ci in 0..b0 {
                        prop_assert!((-1e-15..=1.0).contains(&d.dc(ci, i, j)));
                        for cj in 0..b0 {
                            let v = d.dcc(ci, cj, i, j);
                            prop_assert!((-1e-15..=1.0).contains(&v));
                            prop_assert_eq!(v, d.dcc(cj, ci, j, i));
                        }
                    }
                }
                // partial sums over k < j are non-increasing in the choice index
                for j in 0..=n {
                    let sums: Vec<f64> = (0..b0)
                        .map(|c| (0..j).map(|k| d.dc(c, i, k)).sum())
                        .collect();
                    for w in sums.windows(2) {
                        prop_assert!(w[1] <= w[0] + 1e-12);
                    }
                }
            }
        }
    }
}
