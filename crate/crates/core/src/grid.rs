use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The frequency set on which every spectrum in a run is evaluated.
///
/// A grid is a subset of the `size` equispaced points
/// `λ_k = π(2k − size)/size`, `k = 0..size`, covering `[−π, π)`. The full grid
/// keeps all of them; a band-restricted grid keeps a contiguous run. Sharing
/// one grid across segments of every length is what lets spectra of
/// different segments be compared pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid<T> {
    size: usize,
    indices: Vec<usize>,
    points: Vec<T>,
    weight: T,
}

pub const MIN_GRID_SIZE: usize = 16;

/// Builds the full equispaced grid with `grid_size` points.
pub fn make_grid<T: Scalar>(grid_size: usize) -> Result<FrequencyGrid<T>> {
    if grid_size < MIN_GRID_SIZE || grid_size % 2 != 0 {
        return Err(Error::InvalidGridSize(grid_size));
    }
    let indices: Vec<usize> = (0..grid_size).collect();
    Ok(FrequencyGrid::from_indices(grid_size, indices))
}

impl<T: Scalar> FrequencyGrid<T> {
    fn from_indices(size: usize, indices: Vec<usize>) -> Self {
        let points = indices.iter().map(|&k| base_point(size, k)).collect();
        Self {
            size,
            indices,
            points,
            weight: T::PI() * T::of(2.0) / T::of_usize(size),
        }
    }

    /// Keeps only the frequencies in `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let pi = std::f64::consts::PI;
        let bad = |reason: &str| Error::InvalidBand {
            lo,
            hi,
            reason: reason.to_owned(),
        };
        if !(lo.is_finite() && hi.is_finite()) || lo < -pi || hi > pi || lo >= hi {
            return Err(bad("need -pi <= lo < hi <= pi"));
        }
        let indices: Vec<usize> = self
            .indices
            .iter()
            .copied()
            .filter(|&k| {
                let p = base_point::<f64>(self.size, k);
                p >= lo && p <= hi
            })
            .collect();
        if indices.len() < MIN_GRID_SIZE {
            return Err(bad(&format!(
                "keeps {} grid points, need at least {MIN_GRID_SIZE}",
                indices.len()
            )));
        }
        Ok(Self::from_indices(self.size, indices))
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Quadrature step `2π / size`.
    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points of the underlying full grid.
    pub fn base_size(&self) -> usize {
        self.size
    }

    /// Position of each point within the full grid.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// True when no band restriction has been applied, so the grid is a full
    /// period and circulant tricks apply.
    pub fn is_full(&self) -> bool {
        self.indices.len() == self.size
    }
}

fn base_point<T: Scalar>(size: usize, k: usize) -> T {
    // 2k - size is an exact integer, so the midpoint lands on 0 exactly.
    let numer = 2 * k as i64 - size as i64;
    T::PI() * T::of(numer as f64) / T::of_usize(size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sixteen_point_grid() {
        let g = make_grid::<f64>(16).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.points()[0], -PI);
        for w in g.points().windows(2) {
            assert!((w[1] - w[0] - PI / 8.0).abs() < 1e-15);
        }
        assert!((g.weight() - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn weights_close_the_period() {
        for size in [16, 64, 512, 1000] {
            let g = make_grid::<f64>(size).unwrap();
            let total: f64 = g.points().iter().map(|_| g.weight()).sum();
            assert!((total - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_is_exact_zero() {
        let g = make_grid::<f64>(512).unwrap();
        assert_eq!(g.points()[256], 0.0);
        let g32 = make_grid::<f32>(512).unwrap();
        assert_eq!(g32.points()[256], 0.0);
    }

    #[test]
    fn points_strictly_increase_within_period() {
        let g = make_grid::<f64>(512).unwrap();
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert!(*g.points().last().unwrap() < PI);
        assert!(g.is_full());
    }

    #[test]
    fn invalid_sizes() {
        for size in [0, 8, 15, 17, 513] {
            assert_eq!(make_grid::<f64>(size), Err(Error::InvalidGridSize(size)));
        }
    }

    #[test]
    fn band_restriction() {
        let g = make_grid::<f64>(512).unwrap();
        let r = g.restrict(0.0, PI).unwrap();
        assert!(!r.is_full());
        assert_eq!(r.len(), 256);
        assert_eq!(r.points()[0], 0.0);
        assert_eq!(r.weight(), g.weight());
        assert!(g.restrict(0.5, 0.4).is_err());
        assert!(g.restrict(-4.0, 0.0).is_err());
        // too narrow
        assert!(g.restrict(0.0, 0.1).is_err());
    }
}
