use strata_core::btapp::{share_ratio_curve, BandwidthProfile, ShareRatioParams};

#[test]
fn ratio_peaks_at_the_top_of_the_widest_atom() {
    let curve =
        share_ratio_curve(&BandwidthProfile::synthetic(), &ShareRatioParams::default()).unwrap();
    let rows = &curve.rows;
    // best rank sitting on the 384 kbps step
    let edge = rows.iter().position(|r| r.upload == 384.0).unwrap();
    let window = edge - 50..edge + 50;
    let peak = window
        .clone()
        .max_by(|&a, &b| rows[a].ratio.total_cmp(&rows[b].ratio))
        .unwrap();
    assert!(
        peak <= edge && edge - peak <= 5,
        "peak at {peak}, step starts at {edge}"
    );
}

#[test]
fn ratio_is_scale_free() {
    let prof = BandwidthProfile::synthetic();
    let params = ShareRatioParams {
        n: 500,
        ..Default::default()
    };
    let a = share_ratio_curve(&prof, &params).unwrap();
    let b = share_ratio_curve(&prof.scaled(7.5).unwrap(), &params).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.ratio - y.ratio).abs() <= 1e-12 * x.ratio.max(1.0));
    }
}

#[test]
fn mass_is_bounded_and_falls_at_the_bottom() {
    let curve =
        share_ratio_curve(&BandwidthProfile::synthetic(), &ShareRatioParams::default()).unwrap();
    let max_up = curve.rows.iter().map(|r| r.upload).fold(0.0, f64::max);
    for r in &curve.rows {
        assert!(r.mass <= 3.0 + 1e-9);
        assert!(r.download >= 0.0 && r.download <= max_up);
    }
    let n = curve.rows.len();
    assert!(curve.rows[n - 1].mass < curve.rows[n / 2].mass);
}
