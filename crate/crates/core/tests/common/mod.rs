//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

pub mod checks;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specseg::{Error, Result, SegmentScorer};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|θ(e^{-iλ})|² / |1 − Σ φ_j e^{-ijλ}|²`, the ARMA spectral density up to
/// the factor `σ²/(2π)`.
pub fn arma_density(ar: &[f64], ma: &[f64], lambda: f64) -> f64 {
    let poly = |c: &[f64], lead: Option<f64>| {
        let (mut re, mut im) = (lead.unwrap_or(0.0), 0.0);
        for (j, &v) in c.iter().enumerate() {
            let k = if lead.is_some() { j + 1 } else { j } as f64;
            let s = if lead.is_some() { -v } else { v };
            re += s * (k * lambda).cos();
            im -= s * (k * lambda).sin();
        }
        re * re + im * im
    };
    poly(ma, None) / poly(ar, Some(1.0))
}

/// Arbitrary segment scores looked up in a dense table.
pub struct TableScorer {
    pub n: usize,
    pub ml: usize,
    pub scores: Vec<f64>,
}

impl TableScorer {
    pub fn random(n: usize, ml: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        let scores = (0..(n + 1) * (n + 1)).map(|_| r.random_range(-2.0..8.0)).collect();
        Self { n, ml, scores }
    }

    /// Scores `(b − a) · c_ab` with `c_ab ≥ 0`, like real divergences.
    pub fn length_weighted(n: usize, ml: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        let mut scores = vec![0.0; (n + 1) * (n + 1)];
        for a in 0..=n {
            for b in a..=n {
                scores[a * (n + 1) + b] = (b - a) as f64 * r.random_range(0.0..1.0);
            }
        }
        Self { n, ml, scores }
    }
}

impl SegmentScorer<f64> for TableScorer {
    fn len(&self) -> usize {
        self.n
    }
    fn min_len(&self) -> usize {
        self.ml
    }
    fn score(&self, a: usize, b: usize) -> Result<f64> {
        if a >= b || b > self.n || b - a < self.ml {
            return Err(Error::InvalidConfig(format!("inadmissible segment ({a}, {b}]")));
        }
        Ok(self.scores[a * (self.n + 1) + b])
    }
}

/// Every admissible boundary vector `[0, c_1, …, c_k, n]` with change points
/// from `cands`.
pub fn enumerate(n: usize, ml: usize, k: usize, cands: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0];
    fn rec(n: usize, ml: usize, left: usize, cands: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *cur.last().unwrap();
        if left == 0 {
            if n >= last + ml {
                let mut b = cur.clone();
                b.push(n);
                out.push(b);
            }
            return;
        }
        for &c in cands.iter().filter(|&&c| c >= last + ml && c < n) {
            cur.push(c);
            rec(n, ml, left - 1, cands, cur, out);
            cur.pop();
        }
    }
    rec(n, ml, k, cands, &mut cur, &mut out);
    out
}

pub fn total(s: &impl SegmentScorer<f64>, bounds: &[usize]) -> f64 {
    bounds.windows(2).map(|w| s.score(w[0], w[1]).unwrap()).sum()
}

/// Brute-force `max Σ score − penalty·K` over every admissible segmentation
/// with change points from `cands`.
pub fn best_penalized(s: &TableScorer, cands: &[usize], penalty: f64) -> f64 {
    fn rec(s: &TableScorer, cands: &[usize], penalty: f64, last: usize, acc: f64, best: &mut f64) {
        if s.n >= last + s.ml {
            *best = best.max(acc + s.score(last, s.n).unwrap());
        }
        for &c in cands.iter().filter(|&&c| c >= last + s.ml && c + s.ml <= s.n) {
            rec(s, cands, penalty, c, acc + s.score(last, c).unwrap() - penalty, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(s, cands, penalty, 0, 0.0, &mut best);
    best
}

/// Positive values with a random shape, spanning a few orders of magnitude.
pub fn random_positive(len: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| 10f64.powf(r.random_range(-3.0..3.0))).collect()
}

/// `sin²(mu/2) / (2π m sin²(u/2))`.
pub fn fejer(u: f64, m: usize) -> f64 {
    let m = m as f64;
    let s = (u / 2.0).sin();
    if s.abs() < 1e-12 {
        return m / (2.0 * std::f64::consts::PI);
    }
    (m * u / 2.0).sin().powi(2) / (2.0 * std::f64::consts::PI * m * s * s)
}

/// `∫ fejer(λ − u) g(u) du` by the midpoint rule on `fine` points.
pub fn fejer_smoothed(g: impl Fn(f64) -> f64, m: usize, lambda: f64, fine: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let h = 2.0 * pi / fine as f64;
    (0..fine)
        .map(|i| {
            let u = -pi + (i as f64 + 0.5) * h;
            fejer(lambda - u, m) * g(u)
        })
        .sum::<f64>()
        * h
}
