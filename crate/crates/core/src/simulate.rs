//! Piecewise-stationary linear process generator.
//!
//! Noise comes from ChaCha8 (a counter-based stream cipher RNG) seeded with a
//! `u64`; segment `i` of a piecewise process reads stream `i` of that seed, so
//! draws are reproducible across platforms and segments never share noise.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// Standard normal innovations.
    #[default]
    Gaussian,
    /// Student t with 4 degrees of freedom divided by √2, so the variance is 1.
    ScaledT4,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::ScaledT4 => "t4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Some(Self::Gaussian),
            "t4" | "scaledt4" | "scaled_t4" => Some(Self::ScaledT4),
            _ => None,
        }
    }

    fn fill(self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        match self {
            Self::Gaussian => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            Self::ScaledT4 => {
                let t = StudentT::new(4.0).expect("4 degrees of freedom is valid");
                let scale = std::f64::consts::FRAC_1_SQRT_2;
                (0..n).map(|_| t.sample(rng) * scale).collect()
            }
        }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` i.i.d. innovations, deterministic in `seed`.
pub fn draw_noise(kind: NoiseKind, n: usize, seed: u64) -> Vec<f64> {
    kind.fill(&mut stream_rng(seed, 0), n)
}

/// ARMA recursion `X_t − Σ φ_i X_{t−i} = Σ θ_k ξ_{t−k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProcessSpec {
    /// `φ_1..φ_p`.
    pub ar: Vec<f64>,
    /// `θ_0..θ_q`; non-invertible polynomials are allowed.
    pub ma: Vec<f64>,
    pub noise: NoiseKind,
}

impl LinearProcessSpec {
    pub fn ar(ar: &[f64]) -> Self {
        Self {
            ar: ar.to_vec(),
            ma: vec![1.0],
            noise: NoiseKind::Gaussian,
        }
    }

    pub fn ma(ma: &[f64]) -> Self {
        Self {
            ar: Vec::new(),
            ma: ma.to_vec(),
            noise: NoiseKind::Gaussian,
        }
    }

    pub fn arma(ar: &[f64], ma: &[f64]) -> Self {
        Self {
            ar: ar.to_vec(),
            ma: ma.to_vec(),
            noise: NoiseKind::Gaussian,
        }
    }

    pub fn with_noise(mut self, noise: NoiseKind) -> Self {
        self.noise = noise;
        self
    }

    /// Samples discarded before the output window.
    pub fn burn_in(&self) -> usize {
        let q = self.ma.len().saturating_sub(1);
        if self.ar.is_empty() {
            q
        } else {
            500.max(20 * self.ar.len()).max(q)
        }
    }

    pub fn check(&self) -> Result<()> {
        if !is_causal(&self.ar) {
            return Err(Error::NonCausalAr(self.ar.clone()));
        }
        if self.ma.is_empty() {
            return Err(Error::InvalidConfig("MA polynomial needs at least θ_0".into()));
        }
        Ok(())
    }

    fn generate(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        self.check()?;
        let burn = self.burn_in();
        let q = self.ma.len() - 1;
        let e = self.noise.fill(rng, burn + n);
        let mut x = vec![0.0; burn + n];
        for t in q..burn + n {
            let mut v: f64 = self.ma.iter().enumerate().map(|(k, th)| th * e[t - k]).sum();
            for (i, phi) in self.ar.iter().enumerate() {
                if t > i {
                    v += phi * x[t - i - 1];
                }
            }
            x[t] = v;
        }
        x.drain(..burn);
        Ok(x)
    }
}

/// Schur-Cohn step-down test: all roots of `1 − Σ φ_i z^i` lie strictly
/// outside the unit circle.
pub fn is_causal(ar: &[f64]) -> bool {
    // a holds the coefficients of 1 + Σ a_i z^i.
    let mut a: Vec<f64> = ar.iter().map(|p| -p).collect();
    while let Some(&k) = a.last() {
        if !k.is_finite() || k.abs() >= 1.0 {
            return false;
        }
        let p = a.len();
        let denom = 1.0 - k * k;
        a = (0..p - 1).map(|i| (a[i] - k * a[p - 2 - i]) / denom).collect();
    }
    true
}

/// `n` samples of a stationary linear process.
pub fn simulate_linear(spec: &LinearProcessSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    spec.generate(n, &mut stream_rng(seed, 0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub length: usize,
    pub process: LinearProcessSpec,
}

/// Concatenation of independent stationary segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSpec {
    pub segments: Vec<SegmentSpec>,
}

/// A simulated series with the change points that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub values: Vec<f64>,
    pub change_points: Vec<usize>,
}

impl PiecewiseSpec {
    pub fn new(segments: Vec<(usize, LinearProcessSpec)>) -> Self {
        Self {
            segments: segments
                .into_iter()
                .map(|(length, process)| SegmentSpec { length, process })
                .collect(),
        }
    }

    pub fn total_len(&self) -> usize {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Cumulative lengths, excluding 0 and `N`.
    pub fn change_points(&self) -> Vec<usize> {
        let mut acc = 0;
        let mut out = Vec::new();
        for s in &self.segments[..self.segments.len().saturating_sub(1)] {
            acc += s.length;
            out.push(acc);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidConfig("piecewise spec has no segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if s.length == 0 {
                return Err(Error::InvalidConfig(format!("segment {i} has zero length")));
            }
            s.process.check()?;
        }
        Ok(())
    }

    /// Same processes with lengths rescaled proportionally to sum to `total`.
    pub fn rescaled(&self, total: usize) -> Self {
        let old = self.total_len() as f64;
        let mut acc_old = 0usize;
        let mut prev_new = 0usize;
        let segments = self
            .segments
            .iter()
            .map(|s| {
                acc_old += s.length;
                let end = (acc_old as f64 * total as f64 / old).round() as usize;
                let length = end - prev_new;
                prev_new = end;
                SegmentSpec {
                    length,
                    process: s.process.clone(),
                }
            })
            .collect();
        Self { segments }
    }

    pub fn with_noise(mut self, noise: NoiseKind) -> Self {
        for s in &mut self.segments {
            s.process.noise = noise;
        }
        self
    }

    /// Renders the plain-text spec format read by [`PiecewiseSpec::parse`].
    pub fn to_spec_string(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        for s in &self.segments {
            let _ = writeln!(out, "[segment]");
            let _ = writeln!(out, "length = {}", s.length);
            if !s.process.ar.is_empty() {
                let _ = writeln!(out, "ar = {}", join(&s.process.ar));
            }
            let _ = writeln!(out, "ma = {}", join(&s.process.ma));
            let _ = writeln!(out, "noise = {}", s.process.noise.name());
            out.push('\n');
        }
        out
    }

    /// Parses the plain-text spec format.
    ///
    /// ```text
    /// # comments start with '#'
    /// [segment]
    /// length = 1024        # required
    /// ar = 1.69, -0.81     # φ_1..φ_p, optional
    /// ma = 1, 0.8          # θ_0..θ_q, optional, defaults to 1
    /// noise = gaussian     # gaussian | t4, optional
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        struct Partial {
            line: usize,
            length: Option<usize>,
            process: LinearProcessSpec,
        }
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut segments = Vec::new();
        let mut current: Option<Partial> = None;
        let finish = |p: Partial| -> Result<SegmentSpec> {
            let length = p
                .length
                .ok_or_else(|| err(p.line, "segment is missing `length`".into()))?;
            Ok(SegmentSpec {
                length,
                process: p.process,
            })
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content == "[segment]" {
                if let Some(p) = current.take() {
                    segments.push(finish(p)?);
                }
                current = Some(Partial {
                    line,
                    length: None,
                    process: LinearProcessSpec::ma(&[1.0]),
                });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
            let seg = current
                .as_mut()
                .ok_or_else(|| err(line, "key outside a [segment] block".into()))?;
            let numbers = |v: &str| -> Result<Vec<f64>> {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|e| err(line, format!("bad number `{s}`: {e}"))))
                    .collect()
            };
            match key.trim() {
                "length" => {
                    let n = value
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| err(line, format!("bad length: {e}")))?;
                    seg.length = Some(n);
                }
                "ar" => seg.process.ar = numbers(value)?,
                "ma" => seg.process.ma = numbers(value)?,
                "noise" => {
                    seg.process.noise = NoiseKind::parse(value)
                        .ok_or_else(|| err(line, format!("unknown noise `{}`", value.trim())))?;
                }
                other => return Err(err(line, format!("unknown key `{other}`"))),
            }
        }
        if let Some(p) = current.take() {
            segments.push(finish(p)?);
        }
        let spec = Self { segments };
        spec.validate()?;
        Ok(spec)
    }
}

/// Independent segment simulations, concatenated.
pub fn simulate_piecewise(p: &PiecewiseSpec, seed: u64) -> Result<Simulated> {
    p.validate()?;
    let mut values = Vec::with_capacity(p.total_len());
    for (i, s) in p.segments.iter().enumerate() {
        let mut rng = stream_rng(seed, i as u64);
        values.extend(s.process.generate(s.length, &mut rng)?);
    }
    Ok(Simulated {
        values,
        change_points: p.change_points(),
    })
}

/// The four benchmark processes.
///
/// 1. AR: `φ = 0.9` (1024), `(1.69, −0.81)` (512), `(1.32, −0.81)` (512).
/// 2. ARMA: `(1, −0.25 | 1, 0.8)` (500), `(0.5)` (600),
///    `(1.7, −0.9, 0.168 | 1, −1.6, 0.79, −0.12)` (700).
/// 3. Invertible MA: `(3+B)(2−B)`, `(3−B)(2−B)`, `(3+B)(2−B)` over 500/600/700.
/// 4. Non-invertible MA: `1+2B+B²+5B³`, `1−2B+2B²−5B³`, `1+2B−B²+5B³` over 500/600/700.
pub fn case_spec(id: u32, noise: NoiseKind) -> Result<PiecewiseSpec> {
    type P = LinearProcessSpec;
    let segments = match id {
        1 => vec![
            (1024, P::ar(&[0.9])),
            (512, P::ar(&[1.69, -0.81])),
            (512, P::ar(&[1.32, -0.81])),
        ],
        2 => vec![
            (500, P::arma(&[1.0, -0.25], &[1.0, 0.8])),
            (600, P::ar(&[0.5])),
            (700, P::arma(&[1.7, -0.9, 0.168], &[1.0, -1.6, 0.79, -0.12])),
        ],
        3 => vec![
            (500, P::ma(&[6.0, -1.0, -1.0])),
            (600, P::ma(&[6.0, -5.0, 1.0])),
            (700, P::ma(&[6.0, -1.0, -1.0])),
        ],
        4 => vec![
            (500, P::ma(&[1.0, 2.0, 1.0, 5.0])),
            (600, P::ma(&[1.0, -2.0, 2.0, -5.0])),
            (700, P::ma(&[1.0, 2.0, -1.0, 5.0])),
        ],
        other => return Err(Error::UnknownCase(other)),
    };
    let spec = PiecewiseSpec::new(segments).with_noise(noise);
    spec.validate()?;
    Ok(spec)
}
