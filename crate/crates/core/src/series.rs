use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An observed series `X_1..X_N`.
///
/// Detection always runs on a centered series: the sample mean is removed
/// once, globally, before any spectral estimate is formed.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    values: Vec<T>,
    centered: bool,
}

impl<T: Scalar> Series<T> {
    /// Wraps raw observations without touching them.
    pub fn raw(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::EmptyInput(values.len()));
        }
        Ok(Self {
            values,
            centered: false,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn mean(&self) -> T {
        mean(&self.values)
    }

    /// Multiplies every observation by `c`. Centering is preserved.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            values: self.values.iter().map(|&x| x * c).collect(),
            centered: self.centered,
        }
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::of_usize(values.len())
}

/// Subtracts the sample mean and marks the result as centered.
pub fn center_series<T: Scalar>(raw: &[T]) -> Result<Series<T>> {
    if raw.len() < 2 {
        return Err(Error::EmptyInput(raw.len()));
    }
    let mu = mean(raw);
    Ok(Series {
        values: raw.iter().map(|&x| x - mu).collect(),
        centered: true,
    })
}
