use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{CandidateSet, SegmentScorer};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::bandwidth_for;

/// Shortest sub-segment a screening split may leave on either side of a
/// window of length `window`.
pub fn screen_min_split(window: usize, alpha: f64) -> usize {
    (2 * bandwidth_for(window, alpha)).max(32)
}

/// Nominates candidate change points by sliding a window of length `window`
/// along the series in steps of `n_su` and recording, for each placement
/// `(j, j + window]`, the split `p` maximizing
/// `score(j, p) + score(p, j + window)`.
///
/// Splits are restricted to multiples of `n_su` and leave at least
/// [`screen_min_split`] samples on each side. The union of the recorded
/// splits is clipped to `[ml, n − ml]`.
pub fn screen<T: Scalar, S: SegmentScorer<T>>(
    scorer: &S,
    window: usize,
    n_su: usize,
    alpha: f64,
) -> Result<CandidateSet> {
    let n = scorer.len();
    let ml = scorer.min_len();
    let n_su = n_su.max(1);
    let min_split = screen_min_split(window, alpha);
    let required = ml.max(4 * bandwidth_for(window, alpha)).max(2 * min_split);
    if window < required {
        return Err(Error::WindowTooSmall { window, required });
    }
    if window > n {
        return Ok(CandidateSet::default());
    }

    let starts: Vec<usize> = (0..=n - window).step_by(n_su).collect();
    let splits: Vec<Option<usize>> = starts
        .into_par_iter()
        .map(|j| {
            let end = j + window;
            let first = (j + min_split).div_ceil(n_su) * n_su;
            let mut best: Option<(T, usize)> = None;
            for p in (first..=end - min_split).step_by(n_su) {
                let v = scorer.score(j, p)? + scorer.score(p, end)?;
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, p));
                }
            }
            Ok(best.map(|(_, p)| p))
        })
        .collect::<Result<_>>()?;

    let picked: BTreeSet<usize> = splits
        .into_iter()
        .flatten()
        .filter(|&p| p >= ml && p + ml <= n)
        .collect();
    Ok(CandidateSet::new(picked))
}
