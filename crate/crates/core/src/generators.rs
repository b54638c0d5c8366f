//! Acceptance graph and slot capacity generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal};

use crate::error::{Error, Result};
use crate::graph::AcceptanceGraph;
use crate::model::SlotCapacities;

/// Seed of a deterministic pseudo-random stream. The same seed and parameters
/// give bit-identical outputs on every platform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed of the `index`-th run of a batch started from `self`.
    pub fn offset(self, index: u64) -> Seed {
        Seed(self.0.wrapping_add(index))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

pub fn gen_complete(n: usize) -> AcceptanceGraph {
    AcceptanceGraph::complete(n)
}

/// `G(n, d)`: each unordered pair is an edge independently with probability
/// `d / (n - 1)`.
pub fn gen_erdos_renyi(n: usize, d: f64, seed: Seed) -> Result<AcceptanceGraph> {
    let p = degree_to_probability(n, d)?;
    Ok(gnp(n, p, &mut seed.rng()))
}

/// Edge probability giving expected degree `d` over `n` peers.
pub fn degree_to_probability(n: usize, d: f64) -> Result<f64> {
    let max = n.saturating_sub(1) as f64;
    if !(0.0..=max).contains(&d) {
        return Err(Error::param(
            "d",
            format!("expected degree {d} outside [0, {max}]"),
        ));
    }
    Ok(if max == 0.0 { 0.0 } else { d / max })
}

/// `G(n, p)` drawn from `rng`. Pairs are visited in lexicographic order with
/// geometric skips, so the cost is proportional to the number of edges.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> AcceptanceGraph {
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
    if n < 2 || p <= 0.0 {
        return AcceptanceGraph::from_sorted_lists(lists);
    }
    let geo = (p < 1.0).then(|| Geometric::new(p).expect("p in (0, 1)"));
    let mut row = 0usize;
    // offset of the next candidate inside the current row, i.e. j = row + 1 + col
    let mut col = 0u64;
    loop {
        let skip = geo.as_ref().map_or(0, |g| g.sample(rng));
        col = match col.checked_add(skip) {
            Some(c) => c,
            None => break,
        };
        while row < n - 1 && col >= (n - row - 1) as u64 {
            col -= (n - row - 1) as u64;
            row += 1;
        }
        if row >= n - 1 {
            break;
        }
        let j = row + 1 + col as usize;
        lists[row].push(j);
        lists[j].push(row);
        col += 1;
    }
    AcceptanceGraph::from_sorted_lists(lists)
}

pub fn sample_capacities_constant(n: usize, b0: usize) -> SlotCapacities {
    SlotCapacities::constant(n, b0)
}

/// Capacities drawn from `N(mean, sigma²)`, rounded half-up, and clamped to at
/// least one slot.
pub fn sample_capacities_normal(
    n: usize,
    mean: f64,
    sigma: f64,
    seed: Seed,
) -> Result<SlotCapacities> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::param("mean", format!("{mean} must be positive")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param(
            "sigma",
            format!("{sigma} must be non-negative"),
        ));
    }
    let normal = Normal::new(mean, sigma).map_err(|e| Error::param("sigma", e.to_string()))?;
    let mut rng = seed.rng();
    let b = (0..n)
        .map(|_| round_to_slots(normal.sample(&mut rng)))
        .collect();
    Ok(SlotCapacities::new(b))
}

fn round_to_slots(x: f64) -> usize {
    let r = (x + 0.5).floor();
    if r < 1.0 {
        1
    } else {
        r as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_sizes() {
        assert_eq!(
            gen_complete(3).edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 2)]
        );
        assert_eq!(gen_complete(1).edge_count(), 0);
        assert_eq!(gen_complete(6).edge_count(), 15);
    }

    #[test]
    fn erdos_renyi_extremes() {
        assert_eq!(gen_erdos_renyi(50, 0.0, Seed(1)).unwrap().edge_count(), 0);
        let full = gen_erdos_renyi(30, 29.0, Seed(1)).unwrap();
        assert_eq!(full, gen_complete(30));
        assert!(gen_erdos_renyi(10, 9.5, Seed(1)).is_err());
        assert!(gen_erdos_renyi(10, -1.0, Seed(1)).is_err());
    }

    #[test]
    fn erdos_renyi_is_deterministic() {
        let a = gen_erdos_renyi(300, 7.0, Seed(42)).unwrap();
        let b = gen_erdos_renyi(300, 7.0, Seed(42)).unwrap();
        let c = gen_erdos_renyi(300, 7.0, Seed(43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn erdos_renyi_mean_degree() {
        let n = 1000;
        let mean: f64 = (0..100)
            .map(|s| {
                let g = gen_erdos_renyi(n, 10.0, Seed(s)).unwrap();
                2.0 * g.edge_count() as f64 / n as f64
            })
            .sum::<f64>()
            / 100.0;
        assert!((mean - 10.0).abs() < 0.5, "mean degree {mean}");
    }

    #[test]
    fn erdos_renyi_edge_count_within_three_standard_errors() {
        let (n, d, runs) = (200usize, 5.0, 400u64);
        let pairs = (n * (n - 1) / 2) as f64;
        let p = d / (n - 1) as f64;
        let mean = (0..runs)
            .map(|s| gen_erdos_renyi(n, d, Seed(1000 + s)).unwrap().edge_count() as f64)
            .sum::<f64>()
            / runs as f64;
        let se = (pairs * p * (1.0 - p) / runs as f64).sqrt();
        assert!(
            (mean - pairs * p).abs() < 3.0 * se,
            "mean {mean} vs {}",
            pairs * p
        );
    }

    #[test]
    fn constant_capacities() {
        let c = sample_capacities_constant(5, 2);
        assert_eq!(c.as_slice(), &[2, 2, 2, 2, 2]);
        assert_eq!(c.total(), 10);
        assert!(sample_capacities_constant(4, 0).is_constant(0));
    }

    #[test]
    fn normal_capacities() {
        let c = sample_capacities_normal(100, 2.5, 0.0, Seed(3)).unwrap();
        assert!(c.is_constant(3));
        let c = sample_capacities_normal(1000, 1.0, 10.0, Seed(3)).unwrap();
        assert!(c.as_slice().iter().all(|&b| b >= 1));
        let c = sample_capacities_normal(100_000, 6.0, 0.2, Seed(9)).unwrap();
        let mean = c.total() as f64 / 100_000.0;
        assert!((5.9..=6.1).contains(&mean), "mean {mean}");
        assert!(sample_capacities_normal(3, 0.0, 1.0, Seed(0)).is_err());
        assert!(sample_capacities_normal(3, 1.0, -1.0, Seed(0)).is_err());
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(round_to_slots(2.5), 3);
        assert_eq!(round_to_slots(2.49), 2);
        assert_eq!(round_to_slots(0.2), 1);
        assert_eq!(round_to_slots(-4.0), 1);
    }
}
