//! Box-constrained parameter spaces.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// A `d`-dimensional box: one `[lower, upper)` pair per component.
///
/// Every vector the optimizer produces stays inside the box; mutants that
/// leave it are clamped onto the violated boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParameterSpace {
    /// Builds a space from per-component bounds. Requires `d >= 1` and
    /// `lower[n] < upper[n]` for every component.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ConfigError> {
        if lower.len() != upper.len() {
            return Err(ConfigError::BoundsLengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(ConfigError::EmptySpace);
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(ConfigError::InvertedBounds {
                    index,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// A hypercube `[lo, hi]^d`.
    pub fn symmetric(dimension: usize, lo: f64, hi: f64) -> Result<Self, ConfigError> {
        Self::new(vec![lo; dimension], vec![hi; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Width `upper - lower` of component `n`.
    pub fn range(&self, n: usize) -> f64 {
        self.upper[n] - self.lower[n]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((&v, &lo), &hi)| v >= lo && v <= hi)
    }

    /// Clamps each component onto the violated boundary, in place.
    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(lo, hi);
        }
    }

    /// Draws one vector with each component uniform over its bounds.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| rng.gen_range(lo..hi))
            .collect()
    }
}
