use serde::{Deserialize, Serialize};

use super::{MfgInstance, ProbVector};
use crate::error::{MfgError, Result};

/// State-measure flow `μ_0, …, μ_T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFlow {
    pub mu: Vec<ProbVector>,
}

impl MeasureFlow {
    pub fn new(mu: Vec<ProbVector>) -> Result<Self> {
        if mu.len() < 2 {
            return Err(MfgError::input("a measure flow needs horizon T >= 1"));
        }
        let n = mu[0].len();
        if mu.iter().any(|m| m.len() != n) {
            return Err(MfgError::dim("measure flow entries have different lengths"));
        }
        Ok(MeasureFlow { mu })
    }

    /// The flow `μ_t ≡ μ0`.
    pub fn constant(mu0: &ProbVector, horizon: usize) -> Self {
        assert!(horizon >= 1);
        MeasureFlow { mu: vec![mu0.clone(); horizon + 1] }
    }

    /// `μ0` followed by uniform measures.
    pub fn uniform_after(mu0: &ProbVector, horizon: usize) -> Self {
        assert!(horizon >= 1);
        let mut mu = vec![ProbVector::uniform(mu0.len()); horizon + 1];
        mu[0] = mu0.clone();
        MeasureFlow { mu }
    }

    pub fn horizon(&self) -> usize {
        self.mu.len() - 1
    }

    pub fn n_states(&self) -> usize {
        self.mu[0].len()
    }

    /// Checks the flow against an instance: dimensions and `μ_0 = mu0`.
    pub fn check_against(&self, inst: &MfgInstance) -> Result<()> {
        if self.n_states() != inst.n_states {
            return Err(MfgError::dim(format!(
                "flow has {} states, instance has {}",
                self.n_states(),
                inst.n_states
            )));
        }
        if self.mu[0] != inst.mu0 {
            return Err(MfgError::input("flow entry 0 differs from the instance mu0"));
        }
        Ok(())
    }

    /// Per-time TV distances for `t = 1..=T`.
    pub fn tv_vector(&self, other: &MeasureFlow) -> Vec<f64> {
        self.mu[1..]
            .iter()
            .zip(&other.mu[1..])
            .map(|(a, b)| super::tv(a.as_slice(), b.as_slice()))
            .collect()
    }

    /// `λ·self + (1−λ)·other`, entrywise.
    pub fn mix(&self, other: &MeasureFlow, lambda: f64) -> MeasureFlow {
        let mu = self
            .mu
            .iter()
            .zip(&other.mu)
            .map(|(a, b)| {
                let w = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
                ProbVector::from_mixture(w)
            })
            .collect();
        MeasureFlow { mu }
    }
}
