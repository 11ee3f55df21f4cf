//! Multiple change-point detection for piecewise-stationary time series.
//!
//! Each candidate segment is summarized by a Fejér-smoothed periodogram and
//! scored by its Kullback-Leibler divergence from a reference spectrum
//! (pooled over the whole series, or white noise). The segmentation that
//! maximizes the length-weighted sum of scores is found by dynamic
//! programming, optionally over candidates nominated by a screening pass, and
//! the number of change points is picked by a BIC-type penalty.
//!
//! ```
//! use specseg::{case_spec, detect, simulate_piecewise, DetectorConfig, NoiseKind, Solver};
//!
//! let spec = case_spec(1, NoiseKind::Gaussian).unwrap();
//! let sim = simulate_piecewise(&spec, 7).unwrap();
//! let cfg = DetectorConfig { solver: Solver::DpKnownK, grid_size: 128, n_su: 16, ..Default::default() };
//! let found = detect(&sim.values, &cfg, Some(2)).unwrap();
//! assert_eq!(found.k_hat, 2);
//! ```
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root name the common instantiations.

pub mod config;
pub mod detect;
pub mod divergence;
pub mod error;
pub mod evaluate;
pub mod grid;
pub mod scalar;
pub mod segmentation;
pub mod series;
pub mod simulate;
pub mod solvers;
pub mod spectral;

pub use config::{Baseline, DetectorConfig, Solver};
pub use detect::{detect, Detection, Prepared};
pub use divergence::{kl_divergence, normalize, objective, segment_divergence, segment_score, LogReference, SegmentScore};
pub use error::{Error, Result};
pub use evaluate::{
    parse_tsv_row, rho, rho_cell, run_replications, table_report, tsv_row, Replications, ReplicateOutcome,
    ReplicationSummary, Report, RuntimeStats,
};
pub use grid::{make_grid, FrequencyGrid};
pub use scalar::Scalar;
pub use segmentation::{validate_boundaries, validate_segmentation, Segmentation, SegmentationViolation};
pub use series::{center_series, Series};
pub use simulate::{
    case_spec, draw_noise, is_causal, simulate_linear, simulate_piecewise, LinearProcessSpec, NoiseKind,
    PiecewiseSpec, SegmentSpec, Simulated,
};
pub use solvers::{
    bic_select, calibrate_penalty, dp_layers, dp_solve, grid_candidates, pelt_solve, pelt_solve_with_penalty,
    screen, BicOutcome, CandidateSet, PeltOutcome, PenaltySchedule, ScoreOracle, SegmentScorer,
};
pub use spectral::{
    bandwidth_for, build_dft_table, fejer_kernel_value, periodogram, pooled_baseline, segment_spectrum, smooth,
    white_noise_baseline, BandwidthRule, DftTable, FoldedSpectrum, Folding, Smoother, SpectralEstimate,
};

pub type Series64 = Series<f64>;
pub type Series32 = Series<f32>;
pub type Grid64 = FrequencyGrid<f64>;
pub type Grid32 = FrequencyGrid<f32>;
pub type SpectralEstimate64 = SpectralEstimate<f64>;
pub type SpectralEstimate32 = SpectralEstimate<f32>;
pub type DftTable64 = DftTable<f64>;
pub type DftTable32 = DftTable<f32>;
pub type Segmentation64 = Segmentation<f64>;
pub type Segmentation32 = Segmentation<f32>;
pub type Detection64 = Detection<f64>;
pub type Detection32 = Detection<f32>;
