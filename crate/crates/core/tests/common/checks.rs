//! One randomized instance per call for each exact property; the proptest
//! suite and the acceptance runner both drive these.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StudentT};
use specseg::{
    build_dft_table, case_spec, center_series, detect, dp_solve, kl_divergence, make_grid, normalize, pelt_solve_with_penalty,
    pooled_baseline, segment_spectrum, simulate_piecewise, CandidateSet, DetectorConfig, Error, LinearProcessSpec,
    NoiseKind, PiecewiseSpec, Solver, SpectralEstimate,
};

use super::{arma_density, best_penalized, enumerate, fejer_smoothed, random_positive, rng, total, TableScorer};

/// `dp_solve` against brute force on a random table with `n ≤ 100`,
/// `ml ≤ 12`, `k ≤ 3`. Odd seeds use integer scores to exercise ties.
pub fn dp_matches_enumeration(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.random_range(2..=100);
    let ml = r.random_range(1..=12.min(n));
    let k = r.random_range(0..=3);
    let mut s = TableScorer::random(n, ml, seed ^ 0x5eed);
    if seed % 2 == 1 {
        s.scores.iter_mut().for_each(|v| *v = v.round().clamp(0.0, 3.0));
    }
    let keep = r.random_range(0.2..=1.0);
    let cands: Vec<usize> = (1..n).filter(|_| r.random_bool(keep)).collect();

    let all = enumerate(n, ml, k, &cands);
    let mut best: Option<(f64, &Vec<usize>)> = None;
    for b in &all {
        let v = total(&s, b);
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, b));
        }
    }
    let got = dp_solve(&s, k, &CandidateSet::new(cands.iter().copied()));
    match (best, got) {
        (None, Err(Error::Infeasible { .. })) => Ok(()),
        (Some((v, b)), Ok(seg)) => {
            if seg.boundaries != *b {
                return Err(format!("n={n} ml={ml} k={k}: dp {:?} vs brute {b:?}", seg.boundaries));
            }
            if (seg.objective - v).abs() > 1e-9 * v.abs().max(1.0) {
                return Err(format!("n={n} ml={ml} k={k}: value {} vs {v}", seg.objective));
            }
            Ok(())
        }
        (b, g) => Err(format!("n={n} ml={ml} k={k}: brute {b:?} vs dp {g:?}")),
    }
}

/// Unpruned PELT against the brute-force penalized optimum.
pub fn pelt_matches_enumeration(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.random_range(5..=40);
    let ml = r.random_range(5..=10.min(n));
    let penalty = r.random_range(0.0..12.0);
    let s = TableScorer::random(n, ml, seed ^ 0xbeef);
    let cands: Vec<usize> = (1..n).filter(|_| r.random_bool(0.6)).collect();
    let want = best_penalized(&s, &cands, penalty);
    let out = pelt_solve_with_penalty(&s, &CandidateSet::new(cands.iter().copied()), penalty, false)
        .map_err(|e| format!("n={n} ml={ml}: {e}"))?;
    let got = total(&s, &out.segmentation.boundaries) - penalty * out.k_hat as f64;
    if out.k_hat + 2 != out.segmentation.boundaries.len() || (got - want).abs() > 1e-9 * want.abs().max(1.0) {
        return Err(format!("n={n} ml={ml} pen={penalty}: pelt {got} vs brute {want}"));
    }
    Ok(())
}

/// `D(f, f) = 0`, `D(c·f, f) = 0` and `D(f1, f2) ≥ −1e-8·mass(f1)`.
pub fn kl_identities(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let size = [16, 32, 64, 128, 512][r.random_range(0..5)];
    let g = Arc::new(make_grid::<f64>(size).unwrap());
    let est = |v: Vec<f64>| SpectralEstimate::from_values(g.clone(), v, 1, 1);
    let f1 = est(random_positive(size, &mut r));
    let f2 = est(random_positive(size, &mut r));
    let c = 10f64.powf(r.random_range(-4.0..4.0));
    let self_d = kl_divergence(&f2, &f2).map_err(|e| e.to_string())?;
    let scaled_d = kl_divergence(&f2.scaled(c), &f2).map_err(|e| e.to_string())?;
    let d = kl_divergence(&f1, &f2).map_err(|e| e.to_string())?;
    if self_d.abs() > 1e-12 * f2.mass() {
        return Err(format!("D(f, f) = {self_d}"));
    }
    if scaled_d.abs() > 1e-12 * c * f2.mass() {
        return Err(format!("D({c}·f, f) = {scaled_d}"));
    }
    if d < -1e-8 * f1.mass() {
        return Err(format!("D(f1, f2) = {d} < 0"));
    }
    Ok(())
}

/// A series that is hard on the estimator: heavy tails, spikes, long flat
/// stretches, strong trends.
pub fn awkward_series(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let t = StudentT::new(1.5).unwrap();
    let trend = r.random_range(-1.0..1.0);
    (0..n)
        .map(|i| match r.random_range(0..10) {
            0 => 0.0,
            1 => 1e4 * t.sample(&mut r),
            _ => t.sample(&mut r) + trend * i as f64,
        })
        .collect()
}

/// Every value of a random segment spectrum is non-negative.
pub fn spectrum_nonnegative(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.random_range(8..=600);
    let size = [16, 64, 256][r.random_range(0..3)];
    let g = Arc::new(make_grid::<f64>(size).unwrap());
    let x = awkward_series(n, seed ^ 0xface);
    let s = center_series(&x).map_err(|e| e.to_string())?;
    let t = build_dft_table(&s, g);
    let a = r.random_range(0..n - 1);
    let b = r.random_range(a + 2..=n);
    let alpha = r.random_range(0.25..0.5);
    match segment_spectrum(&t, a, b, alpha) {
        Ok(f) => match f.values().iter().position(|v| !(*v >= 0.0)) {
            Some(i) => Err(format!("({a}, {b}] value {} at {i}", f.values()[i])),
            None => Ok(()),
        },
        Err(Error::ZeroSegment { .. }) => Ok(()),
        Err(e) => Err(e.to_string()),
    }
}

/// Two AR(1) regimes with a clear spectral gap.
pub fn two_regime(n: usize, seed: u64) -> (Vec<f64>, usize) {
    let mut r = rng(seed);
    let split = r.random_range(n / 3..=2 * n / 3);
    let phi = r.random_range(0.5..0.9);
    let p = PiecewiseSpec::new(vec![
        (split, LinearProcessSpec::ar(&[phi])),
        (n - split, LinearProcessSpec::ar(&[-phi])),
    ]);
    (simulate_piecewise(&p, seed).unwrap().values, split)
}

/// `detect(X)` and `detect(10·X)` return the same boundaries.
pub fn scale_invariant(seed: u64) -> Result<(), String> {
    let (x, _) = two_regime(600, seed);
    let cfg = DetectorConfig {
        ml: 100,
        k_max: 4,
        grid_size: 128,
        solver: Solver::Screening,
        ..DetectorConfig::default()
    };
    let scaled: Vec<f64> = x.iter().map(|v| 10.0 * v).collect();
    let a = detect(&x, &cfg, None).map_err(|e| e.to_string())?;
    let b = detect(&scaled, &cfg, None).map_err(|e| e.to_string())?;
    if a.segmentation.boundaries != b.segmentation.boundaries {
        return Err(format!("{:?} vs {:?}", a.segmentation.boundaries, b.segmentation.boundaries));
    }
    Ok(())
}

/// Worst pointwise relative gap between the averaged normalized pooled
/// spectrum of Case-1-shaped series of length `n` and the length-weighted
/// mixture of the regimes' true spectra, each smoothed by the same Fejér
/// kernel.
pub fn pooled_decomposition_gap(n: usize, reps: u64) -> f64 {
    let spec = case_spec(1, NoiseKind::Gaussian).unwrap().rescaled(n);
    let g = Arc::new(make_grid::<f64>(512).unwrap());
    let mut mean = vec![0.0; g.len()];
    let mut m = 0;
    for seed in 0..reps {
        let sim = simulate_piecewise(&spec, 9000 + seed).unwrap();
        let t = build_dft_table(&center_series(&sim.values).unwrap(), g.clone());
        let pooled = pooled_baseline(&t, 1.0 / 3.0).unwrap();
        m = pooled.bandwidth_m();
        for (acc, v) in mean.iter_mut().zip(normalize(&pooled).unwrap()) {
            *acc += v / reps as f64;
        }
    }
    let mixture: Vec<f64> = g
        .points()
        .iter()
        .map(|&l| {
            spec.segments
                .iter()
                .map(|s| {
                    let w = s.length as f64 / n as f64;
                    w * fejer_smoothed(|u| arma_density(&s.process.ar, &s.process.ma, u), m, l, 8192)
                })
                .sum()
        })
        .collect();
    let mass = g.weight() * mixture.iter().sum::<f64>();
    mean.iter()
        .zip(&mixture)
        .map(|(&est, &truth)| (est / (truth / mass) - 1.0).abs())
        .fold(0.0, f64::max)
}
