use std::fmt;

use serde::{Deserialize, Serialize};

/// Boundaries `0 = τ_0 < τ_1 < … < τ_{K+1} = N` together with the objective
/// value they achieve. Segment `j` covers samples `(τ_{j−1}, τ_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation<T = f64> {
    pub boundaries: Vec<usize>,
    pub objective: T,
}

impl<T: Copy> Segmentation<T> {
    pub fn new(boundaries: Vec<usize>, objective: T) -> Self {
        Self {
            boundaries,
            objective,
        }
    }

    /// Number of change points.
    pub fn k(&self) -> usize {
        self.boundaries.len().saturating_sub(2)
    }

    /// Interior boundaries only.
    pub fn change_points(&self) -> &[usize] {
        let n = self.boundaries.len();
        if n <= 2 {
            &[]
        } else {
            &self.boundaries[1..n - 1]
        }
    }

    /// `(a, b]` pairs in order.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.boundaries.windows(2).map(|w| (w[0], w[1]))
    }

    /// Change points as fractions of the series length.
    pub fn fractions(&self) -> Vec<f64> {
        let n = *self.boundaries.last().unwrap_or(&1) as f64;
        self.change_points().iter().map(|&t| t as f64 / n).collect()
    }
}

/// What is wrong with a proposed segmentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentationViolation {
    TooFewBoundaries { found: usize },
    BadStart { found: usize },
    BadEnd { found: usize, expected: usize },
    NotIncreasing { index: usize },
    TooShort { index: usize, gap: usize, ml: usize },
}

impl fmt::Display for SegmentationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewBoundaries { found } => {
                write!(f, "need at least 2 boundaries, found {found}")
            }
            Self::BadStart { found } => write!(f, "first boundary must be 0, found {found}"),
            Self::BadEnd { found, expected } => {
                write!(f, "last boundary must be {expected}, found {found}")
            }
            Self::NotIncreasing { index } => {
                write!(f, "boundary {index} does not exceed its predecessor")
            }
            Self::TooShort { index, gap, ml } => {
                write!(f, "segment ending at boundary {index} has length {gap} < {ml}")
            }
        }
    }
}

impl std::error::Error for SegmentationViolation {}

/// Checks endpoints, monotonicity and the minimum segment length.
pub fn validate_segmentation<T: Copy>(
    s: &Segmentation<T>,
    n: usize,
    ml: usize,
) -> Result<(), SegmentationViolation> {
    validate_boundaries(&s.boundaries, n, ml)
}

pub fn validate_boundaries(
    boundaries: &[usize],
    n: usize,
    ml: usize,
) -> Result<(), SegmentationViolation> {
    let (first, last) = match boundaries {
        [first, .., last] => (*first, *last),
        _ => {
            return Err(SegmentationViolation::TooFewBoundaries {
                found: boundaries.len(),
            })
        }
    };
    if first != 0 {
        return Err(SegmentationViolation::BadStart { found: first });
    }
    for (i, w) in boundaries.windows(2).enumerate() {
        let index = i + 1;
        if w[1] <= w[0] {
            return Err(SegmentationViolation::NotIncreasing { index });
        }
        let gap = w[1] - w[0];
        if gap < ml {
            return Err(SegmentationViolation::TooShort { index, gap, ml });
        }
    }
    if last != n {
        return Err(SegmentationViolation::BadEnd {
            found: last,
            expected: n,
        });
    }
    Ok(())
}
