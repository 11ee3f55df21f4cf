mod common;

use std::sync::Arc;

use common::checks;
use proptest::prelude::*;
use specseg::{
    bic_select, build_dft_table, center_series, detect, grid_candidates, make_grid, rho, screen, segment_spectrum,
    simulate_piecewise, validate_segmentation, CandidateSet, DetectorConfig, LinearProcessSpec, PenaltySchedule,
    PiecewiseSpec, SegmentScorer, Solver,
};

fn ok(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dp_is_exact(seed in any::<u64>()) {
        ok(checks::dp_matches_enumeration(seed))?;
    }

    #[test]
    fn unpruned_pelt_is_exact(seed in any::<u64>()) {
        ok(checks::pelt_matches_enumeration(seed))?;
    }

    #[test]
    fn divergence_identities(seed in any::<u64>()) {
        ok(checks::kl_identities(seed))?;
    }

    #[test]
    fn spectra_are_nonnegative(seed in any::<u64>()) {
        ok(checks::spectrum_nonnegative(seed))?;
    }

    #[test]
    fn mass_is_lag_zero_autocovariance(seed in any::<u64>(), a in 0usize..300, len in 2usize..300) {
        let x = checks::awkward_series(600, seed);
        let s = center_series(&x).unwrap();
        let g = Arc::new(make_grid::<f64>(64).unwrap());
        let t = build_dft_table(&s, g);
        let b = (a + len).min(600);
        prop_assume!(b > a + 1);
        let seg = &s.values()[a..b];
        let gamma0 = seg.iter().map(|v| v * v).sum::<f64>() / (b - a) as f64;
        if let Ok(f) = segment_spectrum(&t, a, b, 1.0 / 3.0) {
            let want = 2.0 * std::f64::consts::PI * gamma0;
            prop_assert!((f.mass() - want).abs() <= 1e-9 * want, "{} vs {want}", f.mass());
        }
    }

    #[test]
    fn larger_penalty_never_adds_change_points(seed in any::<u64>(), c in 0.0f64..20.0) {
        let s = common::TableScorer::length_weighted(60, 8, seed);
        let cands = grid_candidates(60, 8, 1);
        let low = bic_select(&s, &cands, 5, &PenaltySchedule::fixed(c)).unwrap();
        let high = bic_select(&s, &cands, 5, &PenaltySchedule::fixed(2.0 * c)).unwrap();
        prop_assert!(high.k_hat <= low.k_hat);
    }

    #[test]
    fn grid_candidates_respect_unit_and_bounds(n in 1usize..3000, ml in 1usize..400, unit in 1usize..80) {
        let c = grid_candidates(n, ml, unit);
        for &i in c.indices() {
            prop_assert!(i % unit == 0 && i >= ml && i + ml <= n);
        }
    }

    #[test]
    fn rho_conventions(a in proptest::collection::btree_set(0usize..1000, 0..6),
                       b in proptest::collection::btree_set(0usize..1000, 0..6)) {
        let a: Vec<usize> = a.into_iter().collect();
        let b: Vec<usize> = b.into_iter().collect();
        let mut union = a.clone();
        union.extend(&b);
        union.sort_unstable();
        prop_assert_eq!(rho(&a, &a, 1000), 0);
        prop_assert_eq!(rho(&union, &b, 1000), 0);
        prop_assert!(rho(&a, &b, 1000) <= 1000);
    }

    #[test]
    fn simulation_is_reproducible(seed in any::<u64>(), l1 in 1usize..200, l2 in 1usize..200) {
        let p = PiecewiseSpec::new(vec![
            (l1, LinearProcessSpec::ar(&[0.5])),
            (l2, LinearProcessSpec::ma(&[1.0, -2.0])),
        ]);
        let a = simulate_piecewise(&p, seed).unwrap();
        let b = simulate_piecewise(&p, seed).unwrap();
        prop_assert_eq!(&a.values, &b.values);
        prop_assert_eq!(a.values.len(), l1 + l2);
        prop_assert_eq!(a.change_points, vec![l1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn detection_is_scale_invariant(seed in any::<u64>()) {
        ok(checks::scale_invariant(seed))?;
    }

    #[test]
    fn detections_are_valid_segmentations(seed in any::<u64>(), solver in prop_oneof![
        Just(Solver::Screening), Just(Solver::Pelt), Just(Solver::BicExhaustive)
    ]) {
        let (x, _) = checks::two_regime(500, seed);
        let cfg = DetectorConfig { ml: 80, k_max: 4, grid_size: 64, n_su: 5, solver, ..DetectorConfig::default() };
        let d = detect(&x, &cfg, None).unwrap();
        prop_assert!(validate_segmentation(&d.segmentation, 500, 80).is_ok());
        prop_assert_eq!(d.k_hat, d.segmentation.k());
    }
}

/// Screening on a score that only rewards pure segments always nominates the
/// planted change.
struct Step {
    n: usize,
    ml: usize,
    change: usize,
}

impl SegmentScorer<f64> for Step {
    fn len(&self) -> usize {
        self.n
    }
    fn min_len(&self) -> usize {
        self.ml
    }
    fn score(&self, a: usize, b: usize) -> specseg::Result<f64> {
        let pure = b <= self.change || a >= self.change;
        Ok(if pure { (b - a) as f64 } else { 0.0 })
    }
}

proptest! {
    #[test]
    fn screening_nominates_a_planted_change(change in 150usize..850, unit in 1usize..6) {
        let s = Step { n: 1000, ml: 150, change };
        let c: CandidateSet = screen(&s, 200, unit, 1.0 / 3.0).unwrap();
        let hit = c.indices().iter().any(|&i| i.abs_diff(change) < unit);
        prop_assert!(hit, "{change}: {:?}", c.indices());
    }
}

#[test]
fn pooled_spectrum_is_the_length_weighted_mixture() {
    let gap = checks::pooled_decomposition_gap(8192, 20);
    assert!(gap < 0.10, "worst relative gap {gap}");
}

#[test]
fn screening_finds_real_changes() {
    let hits = (0..20u64)
        .filter(|&seed| {
            let (x, split) = checks::two_regime(2000, 500 + seed);
            let cfg = DetectorConfig { ml: 300, grid_size: 128, ..DetectorConfig::default() };
            let prepared = specseg::Prepared::new(&x, &cfg).unwrap();
            let oracle = prepared.oracle(cfg.ml).unwrap();
            let c = screen(&oracle, cfg.ml, 1, cfg.alpha).unwrap();
            c.indices().iter().any(|&i| i.abs_diff(split) <= 50)
        })
        .count();
    assert!(hits >= 19, "{hits}/20");
}
