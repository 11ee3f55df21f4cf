use super::SegmentScorer;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// BIC penalty per change point, `C_N = me_bic · N^c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySchedule<T> {
    /// Median divergence over sliding windows of length `ml`.
    pub me_bic: T,
    pub c: f64,
    pub c_n: T,
}

impl<T: Scalar> PenaltySchedule<T> {
    /// A schedule with a given per-change-point penalty and no calibration.
    pub fn fixed(c_n: T) -> Self {
        Self {
            me_bic: c_n,
            c: 0.0,
            c_n,
        }
    }

    /// Same median, different exponent.
    pub fn with_exponent(&self, c: f64, n: usize) -> Self {
        Self {
            me_bic: self.me_bic,
            c,
            c_n: self.me_bic * T::of((n as f64).powf(c)),
        }
    }
}

/// Median with the midpoint rule for even lengths. `None` when empty or any
/// value is NaN.
pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / T::of(2.0)
    })
}

/// Calibrates `C_N` from the median per-sample divergence of windows of
/// length `window` placed every `window / 2` samples.
pub fn calibrate_penalty<T: Scalar, S: SegmentScorer<T>>(
    scorer: &S,
    window: usize,
    c: f64,
) -> Result<PenaltySchedule<T>> {
    let n = scorer.len();
    if window == 0 || n < 2 * window {
        return Err(Error::Infeasible {
            k: 0,
            n,
            ml: window,
        });
    }
    let stride = (window / 2).max(1);
    let values = (0..=n - window)
        .step_by(stride)
        .map(|a| scorer.divergence(a, a + window))
        .collect::<Result<Vec<T>>>()?;
    // Quadrature noise can push a divergence a hair below zero.
    let me_bic = median(&values)
        .ok_or_else(|| Error::DegenerateData("window divergences are undefined".into()))?
        .max(T::zero());
    if !(me_bic > T::zero()) {
        return Err(Error::DegenerateData(
            "median window divergence is zero, the series has no spectral structure to penalize against".into(),
        ));
    }
    Ok(PenaltySchedule {
        me_bic,
        c,
        c_n: me_bic * T::of((n as f64).powf(c)),
    })
}
