use std::cmp::Ordering;

use super::{positions, CandidateSet, PenaltySchedule, SegmentScorer};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::segmentation::Segmentation;

/// Result of the penalized search.
#[derive(Debug, Clone, PartialEq)]
pub struct PeltOutcome<T> {
    pub k_hat: usize,
    pub segmentation: Segmentation<T>,
    /// Whether pruning was on. The divergence cost is not known to satisfy
    /// the inequality that makes pruning exact, so a pruned result may differ
    /// from the exhaustive optimum.
    pub pruned: bool,
    /// Number of `(s, t)` pairs scored.
    pub evaluations: usize,
}

pub fn pelt_solve<T: Scalar, S: SegmentScorer<T>>(
    scorer: &S,
    cands: &CandidateSet,
    pen: &PenaltySchedule<T>,
    pruning: bool,
) -> Result<PeltOutcome<T>> {
    pelt_solve_with_penalty(scorer, cands, pen.c_n, pruning)
}

/// Minimizes `Σ −score + penalty · K` over segmentations with change points
/// in `cands`.
///
/// With `pruning` off this is the exhaustive penalized optimum. With it on,
/// a start `s` is dropped at `t` once `F(s) − score(s, t) ≥ F(t)`.
pub fn pelt_solve_with_penalty<T: Scalar, S: SegmentScorer<T>>(
    scorer: &S,
    cands: &CandidateSet,
    penalty: T,
    pruning: bool,
) -> Result<PeltOutcome<T>> {
    let n = scorer.len();
    let ml = scorer.min_len();
    if n < ml {
        return Err(Error::Infeasible { k: 0, n, ml });
    }
    let pos = positions(cands, n, ml);
    let last = pos.len() - 1;

    // cost[t]: optimal penalized cost of (0, pos[t]] without the penalty for
    // a change at pos[t] itself. paths[t]: the change points achieving it.
    let mut cost: Vec<Option<T>> = vec![None; last + 1];
    let mut paths: Vec<Vec<usize>> = vec![Vec::new(); last + 1];
    cost[0] = Some(T::zero());
    let mut alive: Vec<usize> = vec![0];
    let mut evaluations = 0;

    for t in 1..=last {
        let mut best: Option<(T, usize)> = None;
        let mut seg_costs: Vec<(usize, T)> = Vec::with_capacity(alive.len());
        for &s in &alive {
            if pos[t] - pos[s] < ml {
                continue;
            }
            let Some(fs) = cost[s] else { continue };
            let seg = -scorer.score(pos[s], pos[t])?;
            evaluations += 1;
            seg_costs.push((s, seg));
            let total = if s == 0 { fs + seg } else { fs + penalty + seg };
            let take = match &best {
                None => true,
                Some((b, bs)) => match total.partial_cmp(b) {
                    Some(Ordering::Less) => true,
                    Some(Ordering::Equal) => {
                        let mut cand = paths[s].clone();
                        if s > 0 {
                            cand.push(pos[s]);
                        }
                        let mut cur = paths[*bs].clone();
                        if *bs > 0 {
                            cur.push(pos[*bs]);
                        }
                        cand < cur
                    }
                    _ => false,
                },
            };
            if take {
                best = Some((total, s));
            }
        }
        if let Some((v, s)) = best {
            cost[t] = Some(v);
            let mut p = paths[s].clone();
            if s > 0 {
                p.push(pos[s]);
            }
            paths[t] = p;
        }
        if t == last {
            break;
        }
        if pruning {
            if let Some(ft) = cost[t] {
                alive.retain(|&s| {
                    let Some(&(_, seg)) = seg_costs.iter().find(|(x, _)| *x == s) else {
                        return true;
                    };
                    let fs = cost[s].expect("evaluated starts have a cost");
                    // Start 0 carries no change-point penalty; shift it onto
                    // the same footing as the others.
                    let lhs = if s == 0 { fs + seg - penalty } else { fs + seg };
                    lhs < ft
                });
            }
        }
        alive.push(t);
    }

    if cost[last].is_none() {
        return Err(Error::Infeasible { k: 0, n, ml });
    }
    let path = std::mem::take(&mut paths[last]);
    let k_hat = path.len();
    let mut b = Vec::with_capacity(k_hat + 2);
    b.push(0);
    b.extend(path);
    b.push(n);
    // Report the objective R, not the penalized cost.
    let objective = b
        .windows(2)
        .try_fold(T::zero(), |acc, w| scorer.score(w[0], w[1]).map(|s| acc + s))?;
    Ok(PeltOutcome {
        k_hat,
        segmentation: Segmentation::new(b, objective),
        pruned: pruning,
        evaluations,
    })
}
