use gqca_core::spectra::{
    brute_force_extent, crossover_exponent, one_side_extent, truncated_sum, CROSSOVER_TOL,
};
use gqca_core::{multiplet_interval, overlap_margin, threshold_scan, CellType, Cutoff, Error, InteractionModel};

// Reference values computed with arbitrary-precision zeta.
const W3: f64 = 0.404_113_806_319_188_57;
const W2: f64 = 1.289_868_133_696_452_9;
const K_STAR: f64 = 2.185_285_451_787_482;
const K_STAR_DISORDER_01: f64 = 2.267_874_728_055_623;

fn analytic(k: f64) -> InteractionModel {
    InteractionModel::new(1.0, k, Cutoff::AnalyticTail)
}

#[test]
fn half_width_at_three_and_two() {
    assert!((analytic(3.0).half_width().unwrap() - W3).abs() < 1e-12);
    assert!((analytic(2.0).half_width().unwrap() - W2).abs() < 1e-12);
    let truncated = InteractionModel::new(1.0, 3.0, Cutoff::Truncated(1_000_000));
    assert!((truncated.half_width().unwrap() - W3).abs() < 1e-9);
}

#[test]
fn margins() {
    let m3 = overlap_margin(&analytic(3.0), CellType::A).unwrap();
    assert!((m3 - (2.0 - 2.0 * W3)).abs() < 1e-12);
    assert!(m3 > 0.0);
    assert!(overlap_margin(&analytic(2.0), CellType::B).unwrap() < 0.0);
    // Bare gaps shift centers only.
    let mut m = analytic(3.0);
    m.gap_a = 40.0;
    assert!((overlap_margin(&m, CellType::A).unwrap() - m3).abs() < 1e-12);
}

#[test]
fn inverse_first_power_diverges() {
    assert!(matches!(analytic(1.0).half_width(), Err(Error::Divergent(_))));
    assert!(matches!(analytic(0.5).half_width(), Err(Error::Divergent(_))));
    let mut last = 0.0;
    for r in [10usize, 100, 1000, 10_000] {
        let m = overlap_margin(&InteractionModel::new(1.0, 1.0, Cutoff::Truncated(r)), CellType::A).unwrap();
        assert!(m < last, "margin must fall with R");
        last = m;
    }
    assert!(last < -15.0);
    assert!(InteractionModel::new(1.0, 1.0, Cutoff::Truncated(10)).divergent());
}

#[test]
fn monotone_in_exponent() {
    let ks: Vec<f64> = (0..40).map(|i| 1.5 + 0.1 * i as f64).collect();
    let r = threshold_scan(1.0, &ks, Cutoff::AnalyticTail, 0.0).unwrap();
    for p in r.rows.windows(2) {
        assert!(p[1].w < p[0].w);
        assert!(p[1].margin > p[0].margin);
    }
    let k3 = r.rows.iter().find(|row| (row.k - 3.0).abs() < 1e-9).unwrap();
    assert!(k3.separated);
    let k2 = r.rows.iter().find(|row| (row.k - 2.0).abs() < 1e-9).unwrap();
    assert!(!k2.separated);
}

#[test]
fn crossover_between_two_and_three() {
    let ks = [2.0, 2.5, 3.0];
    let k = threshold_scan(1.0, &ks, Cutoff::AnalyticTail, 0.0)
        .unwrap()
        .crossover
        .unwrap();
    assert!((k - K_STAR).abs() < CROSSOVER_TOL);
    assert!((crossover_exponent(1.0, 0.0).unwrap() - K_STAR).abs() < CROSSOVER_TOL);
    assert!((crossover_exponent(1.0, 0.1).unwrap() - K_STAR_DISORDER_01).abs() < CROSSOVER_TOL);
}

#[test]
fn disorder_broadens_intervals() {
    let mut m = analytic(3.0);
    let base = multiplet_interval(&m, CellType::A, 0).unwrap();
    m.disorder = 0.05;
    let wide = multiplet_interval(&m, CellType::A, 0).unwrap();
    assert!((base.lo - wide.lo - 0.05).abs() < 1e-15);
    assert!((wide.hi - base.hi - 0.05).abs() < 1e-15);
    assert!((overlap_margin(&m, CellType::A).unwrap() - (2.0 - 2.0 * W3 - 0.1)).abs() < 1e-12);
}

#[test]
fn truncation_error_bound() {
    for k in [1.5, 2.0, 3.0, 4.5] {
        let exact = analytic(k).half_width().unwrap() / 2.0;
        for r in [2usize, 5, 10, 100, 1000] {
            let err = exact - truncated_sum(k, r);
            let bound = (r as f64).powf(1.0 - k) / (k - 1.0);
            assert!(err > 0.0 && err < bound, "k={k} R={r}: {err} vs {bound}");
        }
    }
}

#[test]
fn brute_force_matches_intervals() {
    for k in [1.0, 2.0, 3.0, 6.0] {
        for r in 2..=7 {
            let m = InteractionModel::new(1.3, k, Cutoff::Truncated(r));
            let (lo, hi) = brute_force_extent(&m, r).unwrap();
            for f in [-2i8, 0, 2] {
                let iv = multiplet_interval(&m, CellType::B, f).unwrap();
                assert!((iv.lo - (iv.center + lo)).abs() < 1e-12);
                assert!((iv.hi - (iv.center + hi)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn one_side_doubled_equals_both_sides() {
    for r in 2..=12 {
        let m = InteractionModel::new(1.0, 3.0, Cutoff::Truncated(r));
        let (a_lo, a_hi) = one_side_extent(&m, r).unwrap();
        let (b_lo, b_hi) = brute_force_extent(&m, r).unwrap();
        assert!((a_lo - b_lo).abs() < 1e-12 && (a_hi - b_hi).abs() < 1e-12);
    }
}
