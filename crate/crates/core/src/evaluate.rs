//! Accuracy metrics and the Monte-Carlo replication harness.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::DetectorConfig;
use crate::detect::Prepared;
use crate::error::{Error, Result};
use crate::simulate::{simulate_piecewise, PiecewiseSpec};
use crate::solvers::select_k;

/// One-sided set distance `sup_{b ∈ covered} inf_{a ∈ covering} |a − b|`:
/// how far the worst-covered point of `covered` is from `covering`.
///
/// An empty `covered` set is covered perfectly (0). A non-empty set that
/// nothing covers scores `n`, the largest possible miss.
pub fn rho(covering: &[usize], covered: &[usize], n: usize) -> usize {
    if covered.is_empty() {
        return 0;
    }
    if covering.is_empty() {
        return n;
    }
    covered
        .iter()
        .map(|&b| covering.iter().map(|&a| a.abs_diff(b)).min().expect("non-empty"))
        .max()
        .expect("non-empty")
}

/// Per-replicate metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub index: usize,
    pub seed: u64,
    pub k_hat: usize,
    pub change_points: Vec<usize>,
    /// `ρ(estimate ‖ truth)`: how well the estimates cover the true points.
    pub rho_est_to_true: usize,
    /// `ρ(truth ‖ estimate)`: how well the true points cover the estimates.
    pub rho_true_to_est: usize,
    pub seconds: f64,
    /// DP values per change-point count, kept for penalty re-selection.
    pub layer_values: Option<Vec<Option<f64>>>,
    pub me_bic: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub total: f64,
}

/// Aggregate over completed replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    /// Completed replicates.
    pub reps: usize,
    pub failures: usize,
    /// Series length used for normalization.
    pub n: usize,
    pub mean_rho_est_to_true: f64,
    pub mean_rho_est_to_true_norm: f64,
    pub mean_rho_true_to_est: f64,
    pub mean_rho_true_to_est_norm: f64,
    /// Fraction of replicates with exactly the true number of change points.
    pub k_accuracy: f64,
    pub mean_k_hat: f64,
    pub runtime: RuntimeStats,
}

impl ReplicationSummary {
    /// Aggregates outcomes in the given order.
    pub fn from_outcomes(outcomes: &[ReplicateOutcome], true_k: usize, n: usize, failures: usize) -> Self {
        let reps = outcomes.len();
        let mean = |f: &dyn Fn(&ReplicateOutcome) -> f64| {
            if reps == 0 {
                0.0
            } else {
                outcomes.iter().map(f).sum::<f64>() / reps as f64
            }
        };
        let est_true = mean(&|o| o.rho_est_to_true as f64);
        let true_est = mean(&|o| o.rho_true_to_est as f64);
        let secs = || outcomes.iter().map(|o| o.seconds);
        Self {
            reps,
            failures,
            n,
            mean_rho_est_to_true: est_true,
            mean_rho_est_to_true_norm: est_true / n as f64,
            mean_rho_true_to_est: true_est,
            mean_rho_true_to_est_norm: true_est / n as f64,
            k_accuracy: mean(&|o| f64::from(u8::from(o.k_hat == true_k))),
            mean_k_hat: mean(&|o| o.k_hat as f64),
            runtime: RuntimeStats {
                mean: mean(&|o| o.seconds),
                min: if reps == 0 { 0.0 } else { secs().fold(f64::INFINITY, f64::min) },
                max: secs().fold(0.0, f64::max),
                total: secs().sum(),
            },
        }
    }
}

/// Outcomes of a replication run plus their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Replications {
    pub outcomes: Vec<ReplicateOutcome>,
    pub summary: ReplicationSummary,
    pub true_change_points: Vec<usize>,
}

impl Replications {
    /// Mean `K̂` when the BIC penalty exponent is changed to each of `cs`,
    /// reusing the stored DP values. Replicates without DP values are skipped.
    pub fn penalty_sweep(&self, cs: &[f64]) -> Vec<(f64, f64)> {
        let n = self.summary.n as f64;
        cs.iter()
            .map(|&c| {
                let ks: Vec<usize> = self
                    .outcomes
                    .iter()
                    .filter_map(|o| {
                        let lv = o.layer_values.as_ref()?;
                        Some(select_k(lv, o.me_bic? * n.powf(c)))
                    })
                    .collect();
                let mean = if ks.is_empty() {
                    f64::NAN
                } else {
                    ks.iter().sum::<usize>() as f64 / ks.len() as f64
                };
                (c, mean)
            })
            .collect()
    }
}

fn run_one(
    spec: &PiecewiseSpec,
    cfg: &DetectorConfig,
    index: usize,
    seed: u64,
    known_k: Option<usize>,
) -> Result<ReplicateOutcome> {
    let start = Instant::now();
    let sim = simulate_piecewise(spec, seed)?;
    let n = sim.values.len();
    let det = Prepared::new(&sim.values, cfg)?.detect(cfg, known_k)?;
    let est = det.change_points().to_vec();
    Ok(ReplicateOutcome {
        index,
        seed,
        k_hat: det.k_hat,
        rho_est_to_true: rho(&est, &sim.change_points, n),
        rho_true_to_est: rho(&sim.change_points, &est, n),
        change_points: est,
        seconds: start.elapsed().as_secs_f64(),
        layer_values: det.layer_values,
        me_bic: det.penalty.map(|p| p.me_bic),
    })
}

/// Simulates `reps` series from `spec` with seeds `seed0, seed0 + 1, …`,
/// detects change points in each and aggregates the metrics.
///
/// Failed replicates are left out of the means; more than 1% failures
/// aborts the run.
pub fn run_replications(
    spec: &PiecewiseSpec,
    cfg: &DetectorConfig,
    reps: usize,
    seed0: u64,
    known_k: Option<usize>,
) -> Result<Replications> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    spec.validate()?;
    let n = spec.total_len();
    let truth = spec.change_points();
    let results: Vec<Result<ReplicateOutcome>> = (0..reps)
        .into_par_iter()
        .map(|i| run_one(spec, cfg, i, seed0.wrapping_add(i as u64), known_k))
        .collect();
    let mut outcomes = Vec::with_capacity(reps);
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err(e) => errors.push(e),
        }
    }
    if errors.len() * 100 > reps {
        return Err(Error::TooManyFailures {
            failed: errors.len(),
            reps,
            first: errors[0].to_string(),
        });
    }
    let summary = ReplicationSummary::from_outcomes(&outcomes, truth.len(), n, errors.len());
    Ok(Replications {
        outcomes,
        summary,
        true_change_points: truth,
    })
}

/// Table text plus tab-separated machine-readable rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub tsv: String,
}

const TSV_HEADER: &str = "label\treps\tfailures\tn\trho_est_true\trho_est_true_norm\trho_true_est\trho_true_est_norm\tk_accuracy\tmean_k_hat\truntime_mean\truntime_min\truntime_max\truntime_total";

/// `"22.99 (0.011)"`: raw distance with the normalized one in parentheses.
pub fn rho_cell(raw: f64, normalized: f64) -> String {
    format!("{raw:.2} ({normalized:.3})")
}

/// Renders labelled summaries as an aligned text table and as TSV rows.
pub fn table_report(rows: &[(String, ReplicationSummary)]) -> Report {
    let header = ["configuration", "ρ(Ĝ‖G)", "ρ(G‖Ĝ)", "K̂ = K", "mean K̂", "reps"];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|(label, s)| {
            [
                label.clone(),
                rho_cell(s.mean_rho_est_to_true, s.mean_rho_est_to_true_norm),
                rho_cell(s.mean_rho_true_to_est, s.mean_rho_true_to_est_norm),
                format!("{:.1}%", 100.0 * s.k_accuracy),
                format!("{:.3}", s.mean_k_hat),
                if s.failures > 0 {
                    format!("{} ({} failed)", s.reps, s.failures)
                } else {
                    s.reps.to_string()
                },
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut text = String::new();
    let mut line = |cols: Vec<&str>| {
        let padded: Vec<String> = cols
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(text, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in &cells {
        line(row.iter().map(String::as_str).collect());
    }

    let mut tsv = String::from(TSV_HEADER);
    tsv.push('\n');
    for (label, s) in rows {
        tsv.push_str(&tsv_row(label, s));
        tsv.push('\n');
    }
    Report { text, tsv }
}

/// One machine-readable row; floats use the shortest round-tripping form.
pub fn tsv_row(label: &str, s: &ReplicationSummary) -> String {
    let label = label.replace(['\t', '\n'], " ");
    format!(
        "{label}\t{}\t{}\t{}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}",
        s.reps,
        s.failures,
        s.n,
        s.mean_rho_est_to_true,
        s.mean_rho_est_to_true_norm,
        s.mean_rho_true_to_est,
        s.mean_rho_true_to_est_norm,
        s.k_accuracy,
        s.mean_k_hat,
        s.runtime.mean,
        s.runtime.min,
        s.runtime.max,
        s.runtime.total,
    )
}

/// Inverse of [`tsv_row`].
pub fn parse_tsv_row(row: &str) -> Result<(String, ReplicationSummary)> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let f: Vec<&str> = row.trim_end_matches(['\n', '\r']).split('\t').collect();
    if f.len() != 14 {
        return Err(bad(format!("expected 14 fields, found {}", f.len())));
    }
    let int = |i: usize| f[i].parse::<usize>().map_err(|e| bad(format!("field {i}: {e}")));
    let real = |i: usize| f[i].parse::<f64>().map_err(|e| bad(format!("field {i}: {e}")));
    Ok((
        f[0].to_string(),
        ReplicationSummary {
            reps: int(1)?,
            failures: int(2)?,
            n: int(3)?,
            mean_rho_est_to_true: real(4)?,
            mean_rho_est_to_true_norm: real(5)?,
            mean_rho_true_to_est: real(6)?,
            mean_rho_true_to_est_norm: real(7)?,
            k_accuracy: real(8)?,
            mean_k_hat: real(9)?,
            runtime: RuntimeStats {
                mean: real(10)?,
                min: real(11)?,
                max: real(12)?,
                total: real(13)?,
            },
        },
    ))
}
