//! Segment periodograms on a shared frequency grid and their Fejér-smoothed
//! spectral estimates.
//!
//! A [`DftTable`] stores running sums over one series so that the transform
//! and the autocovariances of any segment `(a, b]` are row differences.
//! Segment spectra are the periodogram convolved with the Fejér (Bartlett)
//! kernel over the whole circle, evaluated on the grid through the lag form of
//! that integral; the result is non-negative. [`smooth`] is the Riemann-sum
//! version of the same convolution for a periodogram known only on the grid.
//!
//! The two agree while the segment is shorter than about one grid period.
//! Beyond that the grid undersamples the periodogram and the Riemann sum
//! folds distant autocovariances back in, so segment spectra never go
//! through it.

use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::scalar::Scalar;
use crate::series::Series;

/// Masses below this are treated as an identically zero segment.
const ZERO_MASS: f64 = 1e-300;

/// Radius around `u = 0` where the kernel switches to its analytic limit.
const KERNEL_SINGULAR_RADIUS: f64 = 1e-8;

/// Smoothed spectral estimate on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate<T> {
    grid: Arc<FrequencyGrid<T>>,
    values: Vec<T>,
    mass: T,
    seg_len: usize,
    bandwidth_m: usize,
}

impl<T: Scalar> SpectralEstimate<T> {
    /// Wraps precomputed values; the mass is recomputed from them.
    pub fn from_values(
        grid: Arc<FrequencyGrid<T>>,
        values: Vec<T>,
        seg_len: usize,
        bandwidth_m: usize,
    ) -> Self {
        assert_eq!(grid.len(), values.len(), "one value per grid point");
        let mass = grid.weight() * values.iter().copied().sum::<T>();
        Self {
            grid,
            values,
            mass,
            seg_len,
            bandwidth_m,
        }
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Quadrature integral of the estimate over the grid.
    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn seg_len(&self) -> usize {
        self.seg_len
    }

    pub fn bandwidth_m(&self) -> usize {
        self.bandwidth_m
    }

    /// Multiplies every value (and the mass) by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self::from_values(
            self.grid.clone(),
            self.values.iter().map(|&v| v * c).collect(),
            self.seg_len,
            self.bandwidth_m,
        )
    }
}

/// Fejér kernel `sin²(mu/2) / (2π m sin²(u/2))`, extended 2π-periodically.
pub fn fejer_kernel_value<T: Scalar>(u: T, m: usize) -> T {
    let two_pi = T::PI() + T::PI();
    let u = u - two_pi * (u / two_pi).round();
    let mf = T::of_usize(m);
    if u.abs() < T::of(KERNEL_SINGULAR_RADIUS) {
        return mf / two_pi;
    }
    let half = u / T::of(2.0);
    let num = (mf * half).sin();
    let den = half.sin();
    num * num / (two_pi * mf * den * den)
}

/// Bandwidth `max(2, round(seg_len^alpha))` for a segment of the given length.
pub fn bandwidth_for(seg_len: usize, alpha: f64) -> usize {
    ((seg_len as f64).powf(alpha).round() as usize).max(2)
}

/// Which length sets the smoothing bandwidth `m = max(2, round(length^alpha))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// The whole series length `N`: every segment shares one bandwidth.
    #[default]
    Series,
    /// Each segment's own length.
    Segment,
}

impl BandwidthRule {
    pub fn bandwidth(self, series_len: usize, seg_len: usize, alpha: f64) -> usize {
        match self {
            Self::Series => bandwidth_for(series_len, alpha),
            Self::Segment => bandwidth_for(seg_len, alpha),
        }
    }
}

/// Fejér kernel sampled at every offset of a full grid, plus its transform.
struct KernelRow<T> {
    /// `row[d]` is the kernel at `2πd/size`.
    row: Vec<T>,
    /// Transform of `row`, pre-scaled by `weight / size` for the inverse pass.
    spectrum: Vec<Complex<T>>,
}

/// Periodic convolution of periodograms with the Fejér kernel on one grid.
///
/// Kernel rows are built once per bandwidth and shared between threads.
pub struct Smoother<T: Scalar> {
    grid: Arc<FrequencyGrid<T>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    rows: DashMap<usize, Arc<KernelRow<T>>>,
}

impl<T: Scalar> std::fmt::Debug for Smoother<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Smoother")
            .field("grid_len", &self.grid.len())
            .field("cached_rows", &self.rows.len())
            .finish()
    }
}

impl<T: Scalar> Smoother<T> {
    pub fn new(grid: Arc<FrequencyGrid<T>>) -> Self {
        let mut planner = FftPlanner::new();
        let size = grid.base_size();
        Self {
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
            grid,
            rows: DashMap::new(),
        }
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid<T>> {
        &self.grid
    }

    fn kernel_row(&self, m: usize) -> Arc<KernelRow<T>> {
        if let Some(row) = self.rows.get(&m) {
            return row.clone();
        }
        let size = self.grid.base_size();
        let two_pi = T::PI() + T::PI();
        let row: Vec<T> = (0..size)
            .map(|d| {
                let d = d.min(size - d);
                fejer_kernel_value(two_pi * T::of_usize(d) / T::of_usize(size), m)
            })
            .collect();
        let mut spectrum: Vec<Complex<T>> = row.iter().map(|&r| Complex::new(r, T::zero())).collect();
        self.forward.process(&mut spectrum);
        let scale = self.grid.weight() / T::of_usize(size);
        for z in &mut spectrum {
            *z = *z * scale;
        }
        let built = Arc::new(KernelRow { row, spectrum });
        self.rows.entry(m).or_insert(built).clone()
    }

    /// Smooths a periodogram given on this grid with bandwidth `m`.
    ///
    /// `values[i] = weight · Σ_j K_m(λ_i − λ_j) · i_vals[j]`.
    pub fn smooth(&self, i_vals: &[T], m: usize, seg_len: usize) -> SpectralEstimate<T> {
        assert_eq!(i_vals.len(), self.grid.len(), "one periodogram value per grid point");
        let m = m.max(1);
        let kernel = self.kernel_row(m);
        let values = if self.grid.is_full() {
            let mut buf: Vec<Complex<T>> =
                i_vals.iter().map(|&v| Complex::new(v, T::zero())).collect();
            self.forward.process(&mut buf);
            for (z, k) in buf.iter_mut().zip(&kernel.spectrum) {
                *z = *z * *k;
            }
            self.inverse.process(&mut buf);
            // Round-off can leave exact zeros slightly negative.
            buf.iter().map(|z| z.re.max(T::zero())).collect()
        } else {
            self.smooth_direct(i_vals, &kernel.row)
        };
        SpectralEstimate::from_values(self.grid.clone(), values, seg_len, m)
    }

    fn smooth_direct(&self, i_vals: &[T], row: &[T]) -> Vec<T> {
        let size = self.grid.base_size();
        let idx = self.grid.indices();
        let w = self.grid.weight();
        idx.iter()
            .map(|&ki| {
                let acc: T = idx
                    .iter()
                    .zip(i_vals)
                    .map(|(&kj, &v)| row[(ki + size - kj) % size] * v)
                    .sum();
                w * acc
            })
            .collect()
    }
}

/// Free-standing form of [`Smoother::smooth`] for one-off use.
pub fn smooth<T: Scalar>(i_vals: &[T], m: usize, grid: &Arc<FrequencyGrid<T>>) -> SpectralEstimate<T> {
    Smoother::new(grid.clone()).smooth(i_vals, m, 0)
}

/// Grid points grouped into mirror pairs `λ ↔ −λ`. The smoothed spectrum of
/// a real series is even, so it only needs evaluating once per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Folding<T> {
    slot_of: Vec<usize>,
    /// Base-grid index representing each slot.
    slots: Vec<usize>,
    /// Number of grid points in each slot (1 or 2).
    mult: Vec<T>,
}

impl<T: Scalar> Folding<T> {
    pub fn new(grid: &FrequencyGrid<T>) -> Self {
        let size = grid.base_size();
        let mut slot_by_base = vec![usize::MAX; size];
        let mut slot_of = Vec::with_capacity(grid.len());
        let mut slots = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for &k in grid.indices() {
            // −λ_k is λ_{size−k}; λ_0 = −π pairs with itself modulo 2π.
            let mirror = (size - k) % size;
            let slot = match slot_by_base[mirror] {
                usize::MAX => {
                    slots.push(k);
                    counts.push(0);
                    slots.len() - 1
                }
                s => s,
            };
            slot_by_base[k] = slot;
            counts[slot] += 1;
            slot_of.push(slot);
        }
        Self {
            slot_of,
            slots,
            mult: counts.into_iter().map(T::of_usize).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Slot of each grid point.
    pub fn slot_of(&self) -> &[usize] {
        &self.slot_of
    }

    pub fn multiplicities(&self) -> &[T] {
        &self.mult
    }

    /// Spreads per-slot values back onto the grid.
    pub fn expand(&self, slot_values: &[T]) -> Vec<T> {
        self.slot_of.iter().map(|&s| slot_values[s]).collect()
    }

    /// Per-slot values if `values` is constant on every slot.
    pub fn fold(&self, values: &[T]) -> Option<Vec<T>> {
        let mut out: Vec<Option<T>> = vec![None; self.len()];
        for (&s, &v) in self.slot_of.iter().zip(values) {
            match out[s] {
                None => out[s] = Some(v),
                Some(prev) if prev == v => {}
                Some(_) => return None,
            }
        }
        out.into_iter().collect()
    }
}

/// A smoothed spectrum evaluated once per mirror slot.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedSpectrum<T> {
    pub values: Vec<T>,
    pub mass: T,
    pub bandwidth_m: usize,
}

/// Running DFT sums `cumsum[t][i] = Σ_{j ≤ t} X_j e^{−i j λ_i}` for
/// `t = 0..=N`, and running lagged products for autocovariances of any
/// segment.
///
/// The DFT sums back [`DftTable::periodogram`] and are built on first use.
/// Smoothed segment spectra come from the lagged products.
pub struct DftTable<T: Scalar> {
    x: Vec<T>,
    n: usize,
    grid: Arc<FrequencyGrid<T>>,
    rule: BandwidthRule,
    cumsum: OnceLock<Vec<Complex<T>>>,
    smoother: OnceLock<Smoother<T>>,
    /// `lag_sums[v][t] = Σ_{s < t} x_s x_{s+v}`, accumulated in f64.
    lag_sums: Vec<Vec<f64>>,
    folding: Folding<T>,
    /// `cos(v λ)` at each slot for `v = 1..=lag_sums.len() − 1`, row-major.
    cosines: Vec<T>,
    /// `cos(2πj/size)`, exactly symmetric in `j ↔ size − j`.
    unit_cos: Vec<T>,
}

impl<T: Scalar> std::fmt::Debug for DftTable<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftTable")
            .field("n", &self.n)
            .field("grid_len", &self.grid.len())
            .field("max_lag", &(self.lag_sums.len() - 1))
            .finish()
    }
}

/// `e^{−2πik/size}` with exact conjugate symmetry between `k` and `size − k`.
fn twiddles<T: Scalar>(size: usize) -> Vec<Complex<T>> {
    let mut tw = vec![Complex::new(T::one(), T::zero()); size];
    let two_pi = T::PI() + T::PI();
    for k in 1..=size / 2 {
        let theta = two_pi * T::of_usize(k) / T::of_usize(size);
        tw[k] = Complex::new(theta.cos(), -theta.sin());
        tw[size - k] = tw[k].conj();
    }
    tw
}

/// Builds the table of a (centered) series on a grid, with bandwidths set
/// by the series length.
pub fn build_dft_table<T: Scalar>(s: &Series<T>, grid: Arc<FrequencyGrid<T>>) -> DftTable<T> {
    let x = s.values().to_vec();
    let n = x.len();
    // Bandwidths are round(L^alpha) with alpha < 1/2, so lags up to √N cover
    // every segment; longer lags fall back to direct sums.
    let max_lag = ((n as f64).sqrt().round() as usize).max(2).min(n.saturating_sub(1));
    let xf: Vec<f64> = x.iter().map(|v| v.as_f64()).collect();
    let lag_sums = (0..=max_lag)
        .map(|v| {
            let mut acc = 0.0;
            let mut row = Vec::with_capacity(n - v + 1);
            row.push(0.0);
            for t in 0..n - v {
                acc += xf[t] * xf[t + v];
                row.push(acc);
            }
            row
        })
        .collect::<Vec<_>>();

    let size = grid.base_size();
    let unit_cos: Vec<T> = twiddles::<T>(size).iter().map(|z| z.re).collect();
    let folding = Folding::new(&grid);
    let mut cosines = Vec::with_capacity(max_lag * folding.len());
    for v in 1..=max_lag {
        cosines.extend(folding.slots.iter().map(|&k| lag_cosine(&unit_cos, v, k)));
    }
    DftTable {
        x,
        n,
        grid,
        rule: BandwidthRule::default(),
        cumsum: OnceLock::new(),
        smoother: OnceLock::new(),
        lag_sums,
        folding,
        cosines,
        unit_cos,
    }
}

/// `cos(v λ_k)` on a grid of `unit_cos.len()` points, where
/// `λ_k = 2πk/size − π` gives `(−1)^v cos(2π(vk mod size)/size)`.
fn lag_cosine<T: Scalar>(unit_cos: &[T], v: usize, k: usize) -> T {
    let c = unit_cos[(v * k) % unit_cos.len()];
    if v % 2 == 1 {
        -c
    } else {
        c
    }
}

impl<T: Scalar> DftTable<T> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid<T>> {
        &self.grid
    }

    pub fn with_bandwidth_rule(mut self, rule: BandwidthRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn bandwidth_rule(&self) -> BandwidthRule {
        self.rule
    }

    /// Smoothing bandwidth for a segment of length `seg_len`.
    pub fn bandwidth(&self, seg_len: usize, alpha: f64) -> usize {
        self.rule.bandwidth(self.n, seg_len, alpha)
    }

    pub fn folding(&self) -> &Folding<T> {
        &self.folding
    }

    pub fn smoother(&self) -> &Smoother<T> {
        self.smoother.get_or_init(|| Smoother::new(self.grid.clone()))
    }

    fn cumsum(&self) -> &[Complex<T>] {
        self.cumsum.get_or_init(|| {
            let width = self.grid.len();
            let size = self.grid.base_size();
            let tw = twiddles::<T>(size);
            let steps = self.grid.indices();
            // λ_k = 2πk/size − π, so e^{−ijλ_k} = (−1)^j · tw[jk mod size].
            let mut phase = vec![0_usize; width];
            let mut cumsum = vec![Complex::new(T::zero(), T::zero()); (self.n + 1) * width];
            for (t, &x) in self.x.iter().enumerate() {
                let j = t + 1;
                let signed = if j % 2 == 1 { -x } else { x };
                let (prev, rest) = cumsum.split_at_mut(j * width);
                let prev = &prev[t * width..];
                let cur = &mut rest[..width];
                for i in 0..width {
                    let p = phase[i] + steps[i];
                    phase[i] = if p >= size { p - size } else { p };
                    cur[i] = prev[i] + tw[phase[i]] * signed;
                }
            }
            cumsum
        })
    }

    /// Row `t` of the running DFT sums.
    pub fn row(&self, t: usize) -> &[Complex<T>] {
        let width = self.grid.len();
        &self.cumsum()[t * width..(t + 1) * width]
    }

    fn check_range(&self, a: usize, b: usize) -> Result<()> {
        if a >= b || b > self.n {
            return Err(Error::BadRange { a, b, n: self.n });
        }
        Ok(())
    }

    /// Periodogram `|Σ_{j=a+1}^{b} X_j e^{−ijλ}|² / (b − a)` at every grid point.
    pub fn periodogram(&self, a: usize, b: usize) -> Result<Vec<T>> {
        self.check_range(a, b)?;
        let inv_len = T::one() / T::of_usize(b - a);
        Ok(self
            .row(b)
            .iter()
            .zip(self.row(a))
            .map(|(hi, lo)| (*hi - *lo).norm_sqr() * inv_len)
            .collect())
    }

    /// Sample autocovariance `(1/L) Σ x_s x_{s+v}` of segment `(a, b]`.
    fn autocovariance(&self, a: usize, b: usize, v: usize) -> f64 {
        let len = b - a;
        if v >= len {
            return 0.0;
        }
        let sum = match self.lag_sums.get(v) {
            Some(row) => row[b - v] - row[a],
            None => (a..b - v).map(|s| self.x[s].as_f64() * self.x[s + v].as_f64()).sum(),
        };
        sum / len as f64
    }

    /// Smoothed spectrum of `(a, b]` at each mirror slot.
    ///
    /// Evaluates `f̂(λ) = ∫ K_m(λ − u) I(u) du` exactly through its lag form
    /// `Σ_{|v|<m} (1 − |v|/m) γ̂(v) e^{−ivλ}`, with `m` from [`DftTable::bandwidth`].
    pub fn folded_spectrum(&self, a: usize, b: usize, alpha: f64) -> Result<FoldedSpectrum<T>> {
        self.check_range(a, b)?;
        let len = b - a;
        let m = self.bandwidth(len, alpha);
        let slots = self.folding.len();
        let mut acc = vec![T::of(self.autocovariance(a, b, 0)); slots];
        let stored = self.lag_sums.len() - 1;
        for v in 1..m.min(len) {
            let w = T::of(2.0 * (1.0 - v as f64 / m as f64) * self.autocovariance(a, b, v));
            if v <= stored {
                let row = &self.cosines[(v - 1) * slots..v * slots];
                for (s, &c) in acc.iter_mut().zip(row) {
                    *s += w * c;
                }
            } else {
                for (s, &k) in acc.iter_mut().zip(&self.folding.slots) {
                    *s += w * lag_cosine(&self.unit_cos, v, k);
                }
            }
        }
        let mut total = T::zero();
        for (s, &mult) in acc.iter_mut().zip(&self.folding.mult) {
            // Round-off can leave exact zeros slightly negative.
            *s = s.max(T::zero());
            total += mult * *s;
        }
        let mass = total * self.grid.weight();
        if mass <= T::of(ZERO_MASS) {
            return Err(Error::ZeroSegment { a, b });
        }
        Ok(FoldedSpectrum {
            values: acc,
            mass,
            bandwidth_m: m,
        })
    }

    /// Smoothed spectrum of `(a, b]`.
    pub fn segment_spectrum(&self, a: usize, b: usize, alpha: f64) -> Result<SpectralEstimate<T>> {
        let f = self.folded_spectrum(a, b, alpha)?;
        Ok(SpectralEstimate::from_values(
            self.grid.clone(),
            self.folding.expand(&f.values),
            b - a,
            f.bandwidth_m,
        ))
    }
}

pub fn periodogram<T: Scalar>(t: &DftTable<T>, a: usize, b: usize) -> Result<Vec<T>> {
    t.periodogram(a, b)
}

pub fn segment_spectrum<T: Scalar>(
    t: &DftTable<T>,
    a: usize,
    b: usize,
    alpha: f64,
) -> Result<SpectralEstimate<T>> {
    t.segment_spectrum(a, b, alpha)
}

/// Spectrum of the whole series, the default reference in the objective.
pub fn pooled_baseline<T: Scalar>(t: &DftTable<T>, alpha: f64) -> Result<SpectralEstimate<T>> {
    t.segment_spectrum(0, t.len(), alpha)
}

/// Flat spectrum `1/(2π)`.
pub fn white_noise_baseline<T: Scalar>(g: &Arc<FrequencyGrid<T>>) -> SpectralEstimate<T> {
    let level = T::one() / (T::PI() + T::PI());
    SpectralEstimate::from_values(g.clone(), vec![level; g.len()], 0, 1)
}
