use serde::{Deserialize, Serialize};

use crate::error::{MfgError, Result};

/// Absolute tolerance on the total mass of a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A probability vector over a finite set.
///
/// Construction validates nonnegativity and unit mass; inputs are never
/// renormalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(MfgError::input("probability vector is empty"));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(MfgError::input(format!("weight {i} is {w}, expected a finite value >= 0")));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(MfgError::input(format!("weights sum to {total}, expected 1 within {SIMPLEX_TOL:e}")));
        }
        Ok(ProbVector(weights))
    }

    /// Point mass at `i`.
    pub fn dirac(n: usize, i: usize) -> Self {
        assert!(i < n, "dirac index {i} out of range for dimension {n}");
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        ProbVector(w)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        ProbVector(vec![1.0 / n as f64; n])
    }

    /// Wraps weights produced by convex combinations of valid vectors.
    pub(crate) fn from_mixture(weights: Vec<f64>) -> Self {
        debug_assert!(weights.iter().all(|&w| w >= 0.0));
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        ProbVector(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = MfgError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVector::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Vec<f64> {
        p.0
    }
}

/// Total variation distance `½·Σ|μ_i − ν_i|`.
pub fn tv_distance(mu: &ProbVector, nu: &ProbVector) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(MfgError::dim(format!("tv_distance between lengths {} and {}", mu.len(), nu.len())));
    }
    Ok(tv(mu.as_slice(), nu.as_slice()))
}

/// Unchecked TV on raw slices of equal length.
pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
