use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{bandwidth_for, BandwidthRule};

/// Reference spectrum the segment spectra are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    /// Smoothed periodogram of the whole series.
    Pooled,
    /// The flat spectrum `1/(2π)`.
    WhiteNoise,
}

/// Search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Dynamic programming over every grid point for a known number of change points.
    DpKnownK,
    /// Screening pass to nominate candidates, then DP (known K) or BIC over them.
    Screening,
    /// Penalized search over the grid points with optional pruning.
    Pelt,
    /// BIC model selection with DP over every grid point.
    BicExhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Minimum segment length in samples.
    pub ml: usize,
    /// Largest number of change points BIC considers.
    pub k_max: usize,
    /// Bandwidth exponent: spectra are smoothed with `m = round(length^alpha)`.
    pub alpha: f64,
    /// Whether `length` in the bandwidth is the series or the segment length.
    pub bandwidth: BandwidthRule,
    pub baseline: Baseline,
    /// Number of points in the full frequency grid.
    pub grid_size: usize,
    /// Change points are only searched at multiples of this unit.
    pub n_su: usize,
    /// Exponent `c` of the BIC penalty `me_bic · N^c`.
    pub penalty_exponent: f64,
    pub solver: Solver,
    /// Screening window length; `None` means `ml`.
    pub screen_window: Option<usize>,
    /// Enables candidate pruning in the PELT solver.
    pub pelt_pruning: bool,
    /// Optional restriction of the frequency grid to `[lo, hi]`.
    pub band: Option<(f64, f64)>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            ml: 350,
            k_max: 6,
            alpha: 1.0 / 3.0,
            bandwidth: BandwidthRule::Series,
            baseline: Baseline::Pooled,
            grid_size: 512,
            n_su: 1,
            penalty_exponent: 0.73,
            solver: Solver::Screening,
            screen_window: None,
            pelt_pruning: true,
            band: None,
        }
    }
}

impl DetectorConfig {
    pub fn screen_window(&self) -> usize {
        self.screen_window.unwrap_or(self.ml)
    }

    /// Largest change-point count that fits `n` samples with segments of at least `ml`.
    pub fn feasible_k_max(&self, n: usize) -> usize {
        if self.ml == 0 {
            return self.k_max;
        }
        (n / self.ml).saturating_sub(1).min(self.k_max)
    }

    /// Checks the configuration against a series of length `n`.
    ///
    /// `k_max · ml ≤ n` is not enforced: BIC skips change-point counts that
    /// cannot fit, see [`DetectorConfig::feasible_k_max`].
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.ml < 2 {
            return bad(format!("ml must be at least 2, got {}", self.ml));
        }
        if !(0.25..0.5).contains(&self.alpha) {
            return bad(format!("alpha must lie in [1/4, 1/2), got {}", self.alpha));
        }
        // m(L) = round(L^alpha) grows slower than L, so with segment-local
        // bandwidths checking L = ml covers every admissible segment.
        let m = match self.bandwidth {
            BandwidthRule::Series => bandwidth_for(n, self.alpha),
            BandwidthRule::Segment => bandwidth_for(self.ml, self.alpha),
        };
        if m >= self.ml {
            return bad(format!("ml = {} does not exceed its bandwidth {m}", self.ml));
        }
        if self.n_su == 0 {
            return bad("n_su must be at least 1".into());
        }
        if !(self.penalty_exponent.is_finite() && self.penalty_exponent > 0.0) {
            return bad(format!(
                "penalty exponent must be positive, got {}",
                self.penalty_exponent
            ));
        }
        if self.screen_window() < self.ml {
            return bad(format!(
                "screen window {} is shorter than ml = {}",
                self.screen_window(),
                self.ml
            ));
        }
        if n < 2 * self.ml {
            return Err(Error::Infeasible {
                k: 0,
                n,
                ml: self.ml,
            });
        }
        Ok(())
    }
}
