//! End-to-end change-point detection on one series.

use std::sync::Arc;

use crate::config::{Baseline, DetectorConfig, Solver};
use crate::error::{Error, Result};
use crate::grid::make_grid;
use crate::scalar::Scalar;
use crate::segmentation::Segmentation;
use crate::series::{center_series, Series};
use crate::solvers::{
    bic_select, calibrate_penalty, dp_solve, grid_candidates, pelt_solve, screen, CandidateSet,
    PenaltySchedule, ScoreOracle,
};
use crate::spectral::{build_dft_table, pooled_baseline, white_noise_baseline, DftTable, SpectralEstimate};

/// A centered series with its DFT table and reference spectrum, ready for
/// any number of solver runs.
#[derive(Debug)]
pub struct Prepared<T: Scalar> {
    series: Series<T>,
    table: DftTable<T>,
    baseline: SpectralEstimate<T>,
    alpha: f64,
}

impl<T: Scalar> Prepared<T> {
    pub fn new(raw: &[T], cfg: &DetectorConfig) -> Result<Self> {
        cfg.validate(raw.len())?;
        let series = center_series(raw)?;
        let mut grid = make_grid::<T>(cfg.grid_size)?;
        if let Some((lo, hi)) = cfg.band {
            grid = grid.restrict(lo, hi)?;
        }
        let grid = Arc::new(grid);
        let table = build_dft_table(&series, grid.clone()).with_bandwidth_rule(cfg.bandwidth);
        let baseline = match cfg.baseline {
            Baseline::Pooled => pooled_baseline(&table, cfg.alpha).map_err(|e| match e {
                Error::ZeroSegment { .. } => Error::DegenerateData("the centered series is identically zero".into()),
                other => other,
            })?,
            Baseline::WhiteNoise => white_noise_baseline(&grid),
        };
        Ok(Self {
            series,
            table,
            baseline,
            alpha: cfg.alpha,
        })
    }

    pub fn series(&self) -> &Series<T> {
        &self.series
    }

    pub fn table(&self) -> &DftTable<T> {
        &self.table
    }

    pub fn baseline(&self) -> &SpectralEstimate<T> {
        &self.baseline
    }

    /// Score oracle with minimum segment length `ml`.
    pub fn oracle(&self, ml: usize) -> Result<ScoreOracle<'_, T>> {
        ScoreOracle::new(&self.table, &self.baseline, self.alpha, ml)
    }

    /// Runs the configured solver. `known_k` fixes the number of change
    /// points; otherwise it is chosen by BIC (or the PELT penalty).
    pub fn detect(&self, cfg: &DetectorConfig, known_k: Option<usize>) -> Result<Detection<T>> {
        let n = self.series.len();
        cfg.validate(n)?;
        let oracle = self.oracle(cfg.ml)?;
        let cands = match cfg.solver {
            Solver::Screening => screen(&oracle, cfg.screen_window(), cfg.n_su, cfg.alpha)?,
            _ => grid_candidates(n, cfg.ml, cfg.n_su),
        };
        let mut det = Detection {
            segmentation: Segmentation::new(vec![0, n], T::zero()),
            k_hat: 0,
            solver: cfg.solver,
            candidates: cands.indices().to_vec(),
            penalty: None,
            layer_values: None,
            pruned: None,
            evaluations: 0,
        };
        match (cfg.solver, known_k) {
            (Solver::Pelt, Some(_)) => {
                return Err(Error::InvalidConfig(
                    "the PELT solver chooses the number of change points itself".into(),
                ))
            }
            (Solver::DpKnownK, None) => {
                return Err(Error::InvalidConfig("the dp solver needs a known number of change points".into()))
            }
            (_, Some(k)) => {
                det.segmentation = dp_solve(&oracle, k, &cands)?;
                det.k_hat = k;
            }
            (Solver::Pelt, None) => {
                let pen = self.penalty(&oracle, cfg)?;
                let out = pelt_solve(&oracle, &cands, &pen, cfg.pelt_pruning)?;
                det.segmentation = out.segmentation;
                det.k_hat = out.k_hat;
                det.pruned = Some(out.pruned);
                det.penalty = Some(pen);
            }
            (_, None) => {
                let pen = self.penalty(&oracle, cfg)?;
                let out = bic_select(&oracle, &cands, cfg.k_max, &pen)?;
                det.segmentation = out.segmentation;
                det.k_hat = out.k_hat;
                det.layer_values = Some(out.layer_values);
                det.penalty = Some(pen);
            }
        }
        det.evaluations = oracle.evaluations();
        Ok(det)
    }

    fn penalty(&self, oracle: &ScoreOracle<'_, T>, cfg: &DetectorConfig) -> Result<PenaltySchedule<T>> {
        calibrate_penalty(oracle, cfg.ml, cfg.penalty_exponent)
    }
}

/// Outcome of one detection run.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection<T> {
    /// Boundaries and the objective `R` they achieve.
    pub segmentation: Segmentation<T>,
    pub k_hat: usize,
    pub solver: Solver,
    /// Change-point locations the solver was allowed to use.
    pub candidates: Vec<usize>,
    /// Set whenever the number of change points was selected by penalty.
    pub penalty: Option<PenaltySchedule<T>>,
    /// `max R` for each change-point count, from BIC runs.
    pub layer_values: Option<Vec<Option<T>>>,
    /// Whether PELT pruned; `None` for other solvers.
    pub pruned: Option<bool>,
    /// Distinct segments scored.
    pub evaluations: usize,
}

impl<T: Scalar> Detection<T> {
    pub fn change_points(&self) -> &[usize] {
        self.segmentation.change_points()
    }

    pub fn candidate_set(&self) -> CandidateSet {
        CandidateSet::new(self.candidates.iter().copied())
    }
}

/// Centers `raw`, builds its table and runs the configured solver.
pub fn detect<T: Scalar>(raw: &[T], cfg: &DetectorConfig, known_k: Option<usize>) -> Result<Detection<T>> {
    Prepared::new(raw, cfg)?.detect(cfg, known_k)
}
