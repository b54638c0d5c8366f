//! Expected BitTorrent share ratios under tit-for-tat stratification.
//!
//! Upload bandwidth is assigned to ranks by inverting a cumulative
//! distribution (best rank, highest bandwidth). The independent
//! `b0`-matching law then gives, for each peer, how much it can expect to
//! download from the partners it is likely to be matched with.

use std::path::Path;

use crate::analytic::sweep_b0_matching;
use crate::error::{Error, Result};
use crate::generators::degree_to_probability;

/// The synthetic wide upstream distribution shipped with the crate.
pub const SYNTHETIC_UPLOAD_CDF: &str = include_str!("../data/synthetic_upload_cdf.txt");

/// Piecewise-linear CDF of upload bandwidth. Quantiles below the first point
/// map to the first bandwidth; repeated bandwidths encode density peaks.
#[derive(Clone, Debug, PartialEq)]
pub struct BandwidthProfile {
    points: Vec<(f64, f64)>,
}

impl BandwidthProfile {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("cdf", "no points"));
        }
        for (k, &(bw, f)) in points.iter().enumerate() {
            if !(bw > 0.0 && bw.is_finite()) {
                return Err(Error::param(
                    "cdf",
                    format!("point {}: bandwidth {bw} must be positive", k + 1),
                ));
            }
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::param(
                    "cdf",
                    format!("point {}: fraction {f} outside [0, 1]", k + 1),
                ));
            }
        }
        if let Some(k) = points
            .windows(2)
            .position(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1)
        {
            return Err(Error::param(
                "cdf",
                format!("points {} and {} are not sorted", k + 1, k + 2),
            ));
        }
        let last = points[points.len() - 1].1;
        if (last - 1.0).abs() > 1e-9 {
            return Err(Error::param(
                "cdf",
                format!("last fraction is {last}, expected 1"),
            ));
        }
        Ok(BandwidthProfile { points })
    }

    /// Parses `bandwidth_kbps cumulative_fraction` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let mut num = |what: &str| -> Result<f64> {
                cols.next()
                    .ok_or_else(|| Error::parse(no + 1, format!("missing {what}")))?
                    .parse::<f64>()
                    .map_err(|e| Error::parse(no + 1, format!("{what}: {e}")))
            };
            let bw = num("bandwidth")?;
            let f = num("cumulative fraction")?;
            if cols.next().is_some() {
                return Err(Error::parse(no + 1, "expected two columns"));
            }
            points.push((bw, f));
        }
        BandwidthProfile::new(points)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        BandwidthProfile::parse(&text)
    }

    pub fn synthetic() -> Self {
        BandwidthProfile::parse(SYNTHETIC_UPLOAD_CDF).expect("shipped sample is valid")
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Bandwidth at cumulative fraction `q`.
    pub fn inverse_cdf(&self, q: f64) -> f64 {
        let pts = &self.points;
        if q <= pts[0].1 {
            return pts[0].0;
        }
        let k = pts.partition_point(|&(_, f)| f < q);
        if k >= pts.len() {
            return pts[pts.len() - 1].0;
        }
        let (b0, f0) = pts[k - 1];
        let (b1, f1) = pts[k];
        if f1 == f0 {
            return b1;
        }
        b0 + (q - f0) / (f1 - f0) * (b1 - b0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        BandwidthProfile::new(self.points.iter().map(|&(b, f)| (b * factor, f)).collect())
    }
}

/// Quantile of the peer at rank index `i` (0 = best) among `n` buckets.
pub fn rank_quantile(i: usize, n: usize) -> f64 {
    1.0 - (i as f64 + 0.5) / n as f64
}

/// Upload bandwidth of the peer at rank index `i` (0 = best).
pub fn rank_to_bandwidth(profile: &BandwidthProfile, i: usize, n: usize) -> Result<f64> {
    if i >= n {
        return Err(Error::PeerOutOfRange { peer: i, n });
    }
    Ok(profile.inverse_cdf(rank_quantile(i, n)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShareRatioParams {
    /// Tit-for-tat slots per peer.
    pub b0: usize,
    /// Expected number of acceptable peers.
    pub d: f64,
    /// Number of rank buckets.
    pub n: usize,
    /// Number of slots a partner's upload is split over; defaults to `b0`.
    pub slot_divisor: Option<f64>,
}

impl Default for ShareRatioParams {
    fn default() -> Self {
        ShareRatioParams {
            b0: 3,
            d: 20.0,
            n: 2000,
            slot_divisor: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShareRatioRow {
    /// 1-based rank.
    pub rank: usize,
    pub quantile: f64,
    pub upload: f64,
    pub download: f64,
    pub ratio: f64,
    /// Expected number of filled slots.
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShareRatioCurve {
    pub rows: Vec<ShareRatioRow>,
}

impl ShareRatioCurve {
    /// Ratio at cumulative fraction `q`, linearly interpolated between
    /// bucket centres.
    pub fn ratio_at(&self, q: f64) -> f64 {
        // rows run from high to low quantile
        let rows = &self.rows;
        let k = rows.partition_point(|r| r.quantile > q);
        if k == 0 {
            return rows[0].ratio;
        }
        if k >= rows.len() {
            return rows[rows.len() - 1].ratio;
        }
        let (a, b) = (&rows[k - 1], &rows[k]);
        let t = (a.quantile - q) / (a.quantile - b.quantile);
        a.ratio + t * (b.ratio - a.ratio)
    }
}

/// Expected download `e(i) = Σ_c Σ_j Dc(c, i, j) u(j) / slots`, ratio
/// `e(i) / u(i)` and mass `Σ_c Σ_j Dc(c, i, j)` with `p = d / (n - 1)`.
/// Unfilled slots contribute nothing.
pub fn share_ratio_curve(
    profile: &BandwidthProfile,
    params: &ShareRatioParams,
) -> Result<ShareRatioCurve> {
    let ShareRatioParams { b0, d, n, .. } = *params;
    if b0 == 0 {
        return Err(Error::param("b0", "must be at least 1"));
    }
    if n < 2 {
        return Err(Error::param("n", "need at least two buckets"));
    }
    if !(d > 0.0) {
        return Err(Error::param("d", format!("{d} must be positive")));
    }
    let divisor = params.slot_divisor.unwrap_or(b0 as f64);
    if !(divisor > 0.0) {
        return Err(Error::param(
            "slot_divisor",
            format!("{divisor} must be positive"),
        ));
    }
    let p = degree_to_probability(n, d)?;
    let upload: Vec<f64> = (0..n)
        .map(|i| profile.inverse_cdf(rank_quantile(i, n)))
        .collect();
    let mut download = vec![0.0; n];
    let mut mass = vec![0.0; n];
    sweep_b0_matching(n, p, b0, |blk| {
        let m = blk.total();
        download[blk.i] += m * upload[blk.j] / divisor;
        download[blk.j] += m * upload[blk.i] / divisor;
        mass[blk.i] += m;
        mass[blk.j] += m;
    })?;
    let rows = (0..n)
        .map(|i| ShareRatioRow {
            rank: i + 1,
            quantile: rank_quantile(i, n),
            upload: upload[i],
            download: download[i],
            ratio: download[i] / upload[i],
            mass: mass[i],
        })
        .collect();
    Ok(ShareRatioCurve { rows })
}
