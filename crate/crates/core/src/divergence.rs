//! Generalized Kullback-Leibler divergence between non-negative spectra and
//! the segmentation objective built from it.
//!
//! For non-negative `f1`, `f2` with masses `F1`, `F2`,
//! `D(f1‖f2) = ∫ f1 · log(st(f1)/st(f2))` where `st(f) = f / F`. The integrand
//! keeps `f1` unnormalized, so a segment's divergence scales with its power.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::scalar::Scalar;
use crate::segmentation::Segmentation;
use crate::spectral::{DftTable, FoldedSpectrum, Folding, SpectralEstimate};

/// Reference values are clamped below at this fraction of their maximum
/// before taking logs.
pub const LOG_FLOOR: f64 = 1e-12;

/// `st(f) = f / F`.
pub fn normalize<T: Scalar>(f: &SpectralEstimate<T>) -> Result<Vec<T>> {
    if !(f.mass() > T::zero()) {
        return Err(Error::ZeroMass);
    }
    let inv = T::one() / f.mass();
    Ok(f.values().iter().map(|&v| v * inv).collect())
}

/// `log st(f2)` precomputed once so many spectra can be compared against it.
#[derive(Debug, Clone)]
pub struct LogReference<T> {
    grid: Arc<FrequencyGrid<T>>,
    log_st: Vec<T>,
    vanishing: Vec<usize>,
    /// `log st(f2)` per mirror slot, when `f2` is even on the grid.
    folded: Option<FoldedLog<T>>,
}

#[derive(Debug, Clone)]
struct FoldedLog<T> {
    folding: Folding<T>,
    log_st: Vec<T>,
}

impl<T: Scalar> LogReference<T> {
    pub fn new(reference: &SpectralEstimate<T>) -> Result<Self> {
        let mass = reference.mass();
        if !(mass > T::zero()) {
            return Err(Error::ZeroMass);
        }
        let max = reference
            .values()
            .iter()
            .copied()
            .fold(T::zero(), T::max);
        let floor = max * T::of(LOG_FLOOR);
        let log_mass = mass.ln();
        let mut vanishing = Vec::new();
        let log_st = reference
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v <= T::zero() {
                    vanishing.push(i);
                }
                v.max(floor).ln() - log_mass
            })
            .collect::<Vec<T>>();
        let folding = Folding::new(reference.grid());
        let folded = folding.fold(&log_st).map(|log_st| FoldedLog { folding, log_st });
        Ok(Self {
            grid: reference.grid().clone(),
            log_st,
            vanishing,
            folded,
        })
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid<T>> {
        &self.grid
    }

    /// `D(f‖reference)` by Riemann sum in ascending grid order.
    pub fn divergence(&self, f: &SpectralEstimate<T>) -> Result<T> {
        if !Arc::ptr_eq(f.grid(), &self.grid) && **f.grid() != *self.grid {
            return Err(Error::GridMismatch);
        }
        let mass = f.mass();
        if !(mass > T::zero()) {
            return Err(Error::ZeroMass);
        }
        if let Some(&index) = self.vanishing.iter().find(|&&i| f.values()[i] > T::zero()) {
            return Err(Error::SupportMismatch { index });
        }
        let log_mass = mass.ln();
        let mut acc = T::zero();
        for (&v, &r) in f.values().iter().zip(&self.log_st) {
            if v > T::zero() {
                acc += v * (v.ln() - log_mass - r);
            }
        }
        Ok(acc * self.grid.weight())
    }

    /// `D(f‖reference)` for a spectrum given per mirror slot of this grid.
    /// `None` when the reference is not even on the grid.
    pub fn divergence_folded(&self, f: &FoldedSpectrum<T>) -> Option<Result<T>> {
        let folded = self.folded.as_ref()?;
        Some(self.folded_sum(folded, f))
    }

    fn folded_sum(&self, folded: &FoldedLog<T>, f: &FoldedSpectrum<T>) -> Result<T> {
        if !(f.mass > T::zero()) {
            return Err(Error::ZeroMass);
        }
        let slot_of = folded.folding.slot_of();
        if let Some(&index) = self.vanishing.iter().find(|&&i| f.values[slot_of[i]] > T::zero()) {
            return Err(Error::SupportMismatch { index });
        }
        let log_mass = f.mass.ln();
        let mut acc = T::zero();
        for ((&v, &r), &mult) in f.values.iter().zip(&folded.log_st).zip(folded.folding.multiplicities()) {
            if v > T::zero() {
                acc += mult * v * (v.ln() - log_mass - r);
            }
        }
        Ok(acc * self.grid.weight())
    }
}

/// Generalized K-L divergence `D(f1‖f2)` on their shared grid.
pub fn kl_divergence<T: Scalar>(f1: &SpectralEstimate<T>, f2: &SpectralEstimate<T>) -> Result<T> {
    if !Arc::ptr_eq(f1.grid(), f2.grid()) && **f1.grid() != **f2.grid() {
        return Err(Error::GridMismatch);
    }
    LogReference::new(f2)?.divergence(f1)
}

/// One summand of the objective: `(b − a) · D(f̂_{a+1,b} ‖ baseline)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentScore<T> {
    pub a: usize,
    pub b: usize,
    pub score: T,
}

/// Divergence of the spectrum of `(a, b]` from a prepared reference.
pub fn segment_divergence<T: Scalar>(
    t: &DftTable<T>,
    a: usize,
    b: usize,
    reference: &LogReference<T>,
    alpha: f64,
) -> Result<T> {
    let same_grid = Arc::ptr_eq(t.grid(), &reference.grid) || **t.grid() == *reference.grid;
    if same_grid {
        if let Some(folded) = &reference.folded {
            return reference.folded_sum(folded, &t.folded_spectrum(a, b, alpha)?);
        }
    }
    reference.divergence(&t.segment_spectrum(a, b, alpha)?)
}

pub fn segment_score<T: Scalar>(
    t: &DftTable<T>,
    a: usize,
    b: usize,
    baseline: &SpectralEstimate<T>,
    alpha: f64,
) -> Result<SegmentScore<T>> {
    let reference = LogReference::new(baseline)?;
    let d = segment_divergence(t, a, b, &reference, alpha)?;
    Ok(SegmentScore {
        a,
        b,
        score: T::of_usize(b - a) * d,
    })
}

/// Objective `R`: the sum of segment scores, left to right.
pub fn objective<T: Scalar>(
    t: &DftTable<T>,
    s: &Segmentation<T>,
    baseline: &SpectralEstimate<T>,
    alpha: f64,
) -> Result<T> {
    let reference = LogReference::new(baseline)?;
    let mut total = T::zero();
    for (a, b) in s.segments() {
        total += T::of_usize(b - a) * segment_divergence(t, a, b, &reference, alpha)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::series::center_series;
    use crate::spectral::{build_dft_table, white_noise_baseline};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(size: usize) -> Arc<FrequencyGrid<f64>> {
        Arc::new(make_grid(size).unwrap())
    }

    fn random_estimate(g: &Arc<FrequencyGrid<f64>>, rng: &mut ChaCha8Rng) -> SpectralEstimate<f64> {
        let values = (0..g.len()).map(|_| rng.random::<f64>() * 4.0 + 0.01).collect();
        SpectralEstimate::from_values(g.clone(), values, 0, 1)
    }

    fn ar1_spectrum(g: &FrequencyGrid<f64>, phi: f64) -> Vec<f64> {
        g.points()
            .iter()
            .map(|&l| 1.0 / (2.0 * PI * (1.0 - 2.0 * phi * l.cos() + phi * phi)))
            .collect()
    }

    #[test]
    fn folded_and_full_paths_agree() {
        let g = grid(256);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x: Vec<f64> = (0..800).map(|_| rng.random::<f64>() - 0.5).collect();
        let t = build_dft_table(&center_series(&x).unwrap(), g.clone());
        let pooled = crate::spectral::pooled_baseline(&t, 0.3).unwrap();
        let reference = LogReference::new(&pooled).unwrap();
        for (a, b) in [(0, 300), (123, 800), (400, 450)] {
            let full = reference.divergence(&t.segment_spectrum(a, b, 0.3).unwrap()).unwrap();
            let folded = segment_divergence(&t, a, b, &reference, 0.3).unwrap();
            assert!((full - folded).abs() <= 1e-12 * (1.0 + full.abs()), "{full} vs {folded}");
        }
        // an uneven reference takes the full path
        let uneven = random_estimate(&g, &mut rng);
        let r2 = LogReference::new(&uneven).unwrap();
        let f = t.folded_spectrum(0, 300, 0.3).unwrap();
        assert!(r2.divergence_folded(&f).is_none());
        let d = segment_divergence(&t, 0, 300, &r2, 0.3).unwrap();
        assert_eq!(d, r2.divergence(&t.segment_spectrum(0, 300, 0.3).unwrap()).unwrap());
    }

    #[test]
    fn normalization() {
        let g = grid(512);
        let w = white_noise_baseline(&g);
        for (a, b) in normalize(&w).unwrap().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_estimate(&g, &mut rng);
        let f5 = f.scaled(5.0);
        let (n1, n5) = (normalize(&f).unwrap(), normalize(&f5).unwrap());
        for (a, b) in n1.iter().zip(&n5) {
            assert!((a - b).abs() < 1e-12);
        }
        let total: f64 = n1.iter().sum::<f64>() * g.weight();
        assert!((total - 1.0).abs() < 1e-10);
        let zero = SpectralEstimate::from_values(g.clone(), vec![0.0; 512], 0, 1);
        assert_eq!(normalize(&zero), Err(Error::ZeroMass));
    }

    #[test]
    fn divergence_vanishes_on_proportional_spectra() {
        let g = grid(256);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let f = random_estimate(&g, &mut rng);
            assert!(kl_divergence(&f, &f).unwrap().abs() < 1e-10);
            assert!(kl_divergence(&f.scaled(7.3), &f).unwrap().abs() < 1e-10);
            let other = random_estimate(&g, &mut rng);
            assert!(kl_divergence(&f, &other).unwrap() > 0.0);
        }
    }

    #[test]
    fn ar1_against_flat_matches_fine_quadrature() {
        let g = grid(512);
        let f1 = SpectralEstimate::from_values(g.clone(), ar1_spectrum(&g, 0.9), 0, 1);
        let flat = white_noise_baseline(&g);
        let d = kl_divergence(&f1, &flat).unwrap();

        // independent evaluation on a 16384-point grid with plain loops
        let n = 16384;
        let step = 2.0 * PI / n as f64;
        let f: Vec<f64> = (0..n)
            .map(|k| {
                let l = -PI + k as f64 * step;
                1.0 / (2.0 * PI * (1.0 - 1.8 * l.cos() + 0.81))
            })
            .collect();
        let mass: f64 = f.iter().sum::<f64>() * step;
        let oracle: f64 = f.iter().map(|&v| v * ((v / mass) / (1.0 / (2.0 * PI))).ln()).sum::<f64>() * step;
        assert!((d - oracle).abs() < 1e-3 * oracle.abs(), "{d} vs {oracle}");
    }

    #[test]
    fn mismatched_grids_and_support() {
        let a = white_noise_baseline(&grid(64));
        let b = white_noise_baseline(&grid(128));
        assert_eq!(kl_divergence(&a, &b), Err(Error::GridMismatch));

        let g = grid(64);
        let mut vals = vec![1.0; 64];
        vals[5] = 0.0;
        let holey = SpectralEstimate::from_values(g.clone(), vals, 0, 1);
        let full = SpectralEstimate::from_values(g.clone(), vec![1.0; 64], 0, 1);
        assert_eq!(kl_divergence(&full, &holey), Err(Error::SupportMismatch { index: 5 }));
        // zeros in f1 contribute nothing
        assert!(kl_divergence(&holey, &full).unwrap() > 0.0);
    }

    #[test]
    fn tiny_reference_values_are_floored() {
        let g = grid(64);
        let mut vals = vec![1.0; 64];
        vals[9] = 1e-200;
        let tiny = SpectralEstimate::from_values(g.clone(), vals, 0, 1);
        let full = SpectralEstimate::from_values(g, vec![1.0; 64], 0, 1);
        let d = kl_divergence(&full, &tiny).unwrap();
        assert!(d.is_finite() && d > 0.0);
    }

    fn series(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = 0.0;
        (0..n)
            .map(|i| {
                let e: f64 = rng.sample(rand_distr::StandardNormal);
                x = if i < n / 2 { 0.8 * x + e } else { -0.5 * x + e };
                x
            })
            .collect()
    }

    #[test]
    fn objective_is_the_sum_of_scores() {
        let g = grid(256);
        let s = center_series(&series(4, 900)).unwrap();
        let t = build_dft_table(&s, g.clone());
        let base = white_noise_baseline(&g);
        let whole = segment_score(&t, 0, 900, &base, 0.3).unwrap();
        let k0 = Segmentation::new(vec![0, 900], 0.0);
        assert_eq!(objective(&t, &k0, &base, 0.3).unwrap(), whole.score);

        let left = segment_score(&t, 0, 400, &base, 0.3).unwrap().score;
        let right = segment_score(&t, 400, 900, &base, 0.3).unwrap().score;
        let k1 = Segmentation::new(vec![0, 400, 900], 0.0);
        assert_eq!(objective(&t, &k1, &base, 0.3).unwrap(), left + right);
        assert_eq!(segment_score(&t, 0, 400, &base, 0.3).unwrap().score, left);
    }
}
