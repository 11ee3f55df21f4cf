use std::cmp::Ordering;

use rayon::prelude::*;

use super::{positions, CandidateSet, PenaltySchedule, SegmentScorer};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::segmentation::Segmentation;

/// Best value of a prefix `(0, pos[t]]` split by `j` change points, with the
/// change points that achieve it.
#[derive(Clone)]
struct State<T> {
    value: T,
    path: Vec<usize>,
}

/// `a` beats `b`: higher value, ties to the lexicographically smaller path.
fn better<T: Scalar>(value: T, path: &[usize], current: &Option<State<T>>) -> bool {
    match current {
        None => true,
        Some(cur) => match value.partial_cmp(&cur.value) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => path < cur.path.as_slice(),
            _ => false,
        },
    }
}

/// Best segmentation for each change-point count `0..=k_max`, or `None` where
/// no admissible segmentation exists.
///
/// Change points are restricted to `cands` and every segment is at least the
/// scorer's minimum length. Equal objectives resolve to the lexicographically
/// smallest boundary vector.
pub fn dp_layers<T: Scalar, S: SegmentScorer<T>>(
    scorer: &S,
    cands: &CandidateSet,
    k_max: usize,
) -> Result<Vec<Option<Segmentation<T>>>> {
    let n = scorer.len();
    let ml = scorer.min_len();
    let pos = positions(cands, n, ml);
    let last = pos.len() - 1;

    // Layer 0: no change point before pos[t].
    let mut layer: Vec<Option<State<T>>> = (0..=last)
        .into_par_iter()
        .map(|t| {
            if t == 0 || pos[t] < ml {
                return Ok(None);
            }
            Ok(Some(State {
                value: scorer.score(0, pos[t])?,
                path: Vec::new(),
            }))
        })
        .collect::<Result<_>>()?;

    let finish = |layer: &[Option<State<T>>]| {
        layer[last].as_ref().map(|st| {
            let mut b = Vec::with_capacity(st.path.len() + 2);
            b.push(0);
            b.extend_from_slice(&st.path);
            b.push(n);
            Segmentation::new(b, st.value)
        })
    };

    let mut out = vec![finish(&layer)];
    for j in 1..=k_max {
        // Only the terminal position matters on the last layer.
        let targets: Vec<usize> = if j == k_max { vec![last] } else { (1..=last).collect() };
        let computed: Vec<(usize, Option<State<T>>)> = targets
            .into_par_iter()
            .map(|t| {
                let mut best: Option<State<T>> = None;
                let mut path = Vec::with_capacity(j);
                for s in 1..t {
                    if pos[t] - pos[s] < ml {
                        break;
                    }
                    let Some(prev) = &layer[s] else { continue };
                    let value = prev.value + scorer.score(pos[s], pos[t])?;
                    path.clear();
                    path.extend_from_slice(&prev.path);
                    path.push(pos[s]);
                    if better(value, &path, &best) {
                        best = Some(State {
                            value,
                            path: path.clone(),
                        });
                    }
                }
                Ok((t, best))
            })
            .collect::<Result<_>>()?;
        let mut next: Vec<Option<State<T>>> = vec![None; last + 1];
        for (t, st) in computed {
            next[t] = st;
        }
        layer = next;
        out.push(finish(&layer));
    }
    Ok(out)
}

/// Exact maximizer of the objective with exactly `k` change points.
pub fn dp_solve<T: Scalar, S: SegmentScorer<T>>(
    scorer: &S,
    k: usize,
    cands: &CandidateSet,
) -> Result<Segmentation<T>> {
    let n = scorer.len();
    let ml = scorer.min_len();
    if (k + 1) * ml > n {
        return Err(Error::Infeasible { k, n, ml });
    }
    dp_layers(scorer, cands, k)?
        .pop()
        .flatten()
        .ok_or(Error::Infeasible { k, n, ml })
}

/// Result of BIC model selection.
#[derive(Debug, Clone, PartialEq)]
pub struct BicOutcome<T> {
    pub k_hat: usize,
    pub segmentation: Segmentation<T>,
    /// `max R` for each change-point count, `None` where infeasible.
    pub layer_values: Vec<Option<T>>,
}

impl<T: Scalar> BicOutcome<T> {
    /// Re-selects `K` for a different penalty per change point with the DP
    /// values held fixed.
    pub fn select_with(&self, c_n: T) -> usize {
        select_k(&self.layer_values, c_n)
    }
}

/// `argmin_L −R_L + L·c_n`, ties to the smaller `L`.
pub fn select_k<T: Scalar>(layer_values: &[Option<T>], c_n: T) -> usize {
    let mut best: Option<(usize, T)> = None;
    for (l, v) in layer_values.iter().enumerate() {
        let Some(v) = v else { continue };
        let bic = if l == 0 { -*v } else { -*v + T::of_usize(l) * c_n };
        if best.is_none_or(|(_, b)| bic < b) {
            best = Some((l, bic));
        }
    }
    best.map(|(l, _)| l).unwrap_or(0)
}

/// Runs DP for `L = 0..=k_max` and keeps the `L` minimizing
/// `BIC_L = −max R_L + L·C_N`. Infeasible `L` are skipped.
pub fn bic_select<T: Scalar, S: SegmentScorer<T>>(
    scorer: &S,
    cands: &CandidateSet,
    k_max: usize,
    pen: &PenaltySchedule<T>,
) -> Result<BicOutcome<T>> {
    let n = scorer.len();
    let ml = scorer.min_len();
    let feasible = if ml == 0 { k_max } else { (n / ml).saturating_sub(1).min(k_max) };
    let mut layers = dp_layers(scorer, cands, feasible)?;
    let layer_values: Vec<Option<T>> = layers
        .iter()
        .map(|s| s.as_ref().map(|s| s.objective))
        .chain(std::iter::repeat_n(None, k_max - feasible))
        .collect();
    let k_hat = select_k(&layer_values, pen.c_n);
    let segmentation = layers
        .swap_remove(k_hat)
        .ok_or(Error::Infeasible { k: 0, n, ml })?;
    Ok(BicOutcome {
        k_hat,
        segmentation,
        layer_values,
    })
}
