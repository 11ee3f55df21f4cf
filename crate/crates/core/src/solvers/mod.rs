//! Search over segmentations: exact dynamic programming, screening, PELT and
//! BIC model selection.
//!
//! Every solver talks to the data through [`SegmentScorer`], so the same code
//! runs on real spectra ([`ScoreOracle`]) and on synthetic score tables in
//! tests.

mod dp;
mod pelt;
mod penalty;
mod screen;

pub use dp::{bic_select, dp_layers, dp_solve, select_k, BicOutcome};
pub use pelt::{pelt_solve, pelt_solve_with_penalty, PeltOutcome};
pub use penalty::{calibrate_penalty, median, PenaltySchedule};
pub use screen::{screen, screen_min_split};

use dashmap::DashMap;

use crate::divergence::{segment_divergence, LogReference};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spectral::{DftTable, SpectralEstimate};

/// Source of segment scores for the solvers.
pub trait SegmentScorer<T: Scalar>: Sync {
    /// Series length `N`.
    fn len(&self) -> usize;

    /// Minimum admissible segment length.
    fn min_len(&self) -> usize;

    /// Score of segment `(a, b]`; larger is better.
    fn score(&self, a: usize, b: usize) -> Result<T>;

    /// Score per sample of `(a, b]`.
    fn divergence(&self, a: usize, b: usize) -> Result<T> {
        Ok(self.score(a, b)? / T::of_usize(b - a))
    }
}

/// Memoized segment scores `(b − a) · D(f̂_{a+1,b} ‖ baseline)` over one
/// series.
///
/// The memo stores the per-sample divergence; concurrent callers racing on
/// the same key compute identical values, so whichever insert wins is
/// bit-identical to the other.
pub struct ScoreOracle<'a, T: Scalar> {
    table: &'a DftTable<T>,
    reference: LogReference<T>,
    alpha: f64,
    ml: usize,
    memo: DashMap<(usize, usize), T>,
}

impl<'a, T: Scalar> ScoreOracle<'a, T> {
    pub fn new(
        table: &'a DftTable<T>,
        baseline: &SpectralEstimate<T>,
        alpha: f64,
        ml: usize,
    ) -> Result<Self> {
        Ok(Self {
            table,
            reference: LogReference::new(baseline)?,
            alpha,
            ml,
            memo: DashMap::new(),
        })
    }

    pub fn table(&self) -> &DftTable<T> {
        self.table
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of distinct segments evaluated so far.
    pub fn evaluations(&self) -> usize {
        self.memo.len()
    }
}

impl<T: Scalar> std::fmt::Debug for ScoreOracle<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScoreOracle")
            .field("n", &self.table.len())
            .field("alpha", &self.alpha)
            .field("ml", &self.ml)
            .field("memo", &self.memo.len())
            .finish()
    }
}

impl<T: Scalar> SegmentScorer<T> for ScoreOracle<'_, T> {
    fn len(&self) -> usize {
        self.table.len()
    }

    fn min_len(&self) -> usize {
        self.ml
    }

    fn score(&self, a: usize, b: usize) -> Result<T> {
        Ok(T::of_usize(b - a) * self.divergence(a, b)?)
    }

    fn divergence(&self, a: usize, b: usize) -> Result<T> {
        if let Some(d) = self.memo.get(&(a, b)) {
            return Ok(*d);
        }
        let d = segment_divergence(self.table, a, b, &self.reference, self.alpha)?;
        Ok(*self.memo.entry((a, b)).or_insert(d))
    }
}

/// Sorted, deduplicated admissible change-point locations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSet {
    indices: Vec<usize>,
}

impl CandidateSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Every multiple of `n_su` in `[ml, n − ml]`.
pub fn grid_candidates(n: usize, ml: usize, n_su: usize) -> CandidateSet {
    let n_su = n_su.max(1);
    if n < 2 * ml {
        return CandidateSet::default();
    }
    let first = ml.div_ceil(n_su).max(1) * n_su;
    CandidateSet {
        indices: (first..=n - ml).step_by(n_su).collect(),
    }
}

/// Candidate positions a solver may use, bracketed by `0` and `n`.
pub(crate) fn positions(cands: &CandidateSet, n: usize, ml: usize) -> Vec<usize> {
    let mut pos = Vec::with_capacity(cands.len() + 2);
    pos.push(0);
    pos.extend(
        cands
            .indices()
            .iter()
            .copied()
            .filter(|&c| c >= ml && c + ml <= n),
    );
    pos.push(n);
    pos
}
