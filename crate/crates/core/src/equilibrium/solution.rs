use std::path::Path;

use serde::{Deserialize, Serialize};

use super::finite::{apply_h, forward_from_q, push_forward};
use crate::dp::{backward_induction, Table};
use crate::error::{MfgError, Result};
use crate::model::{tv, MeasureFlow, MfgInstance, ProbVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Horizon {
    Finite(usize),
    Stationary,
}

/// Norm in which the fixed-point residual is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// `max_t TV(H(μ)_t, μ_t)`.
    MaxTv,
    /// `Σ_t r_t·TV(H(μ)_t, μ_t)` with `r` the left Perron vector of `A_T`.
    PerronWeighted,
    /// `max_t ‖h_t − h̃_t‖∞` for the Q-flow iteration.
    QSup,
}

/// An equilibrium pair together with its value tables and residual.
///
/// Finite-horizon solutions hold `T+1` entries per sequence, stationary ones
/// a single entry. `residual` is measured at the stored measures (or, for
/// [`NormKind::QSup`], the stored Q-flow), so
/// [`MfeSolution::recompute_residual`] reproduces it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfeSolution {
    pub horizon: Horizon,
    pub measures: Vec<ProbVector>,
    pub policies: Vec<Vec<ProbVector>>,
    pub q: Vec<Table>,
    pub residual: f64,
    pub iterations: usize,
    pub norm_used: NormKind,
    /// Weights of the Perron-weighted norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Marks a long-horizon truncation used as an infinite-horizon proxy.
    #[serde(default)]
    pub reference: bool,
    #[serde(default)]
    pub residual_history: Vec<f64>,
}

impl MfeSolution {
    pub fn finite_horizon(&self) -> Option<usize> {
        match self.horizon {
            Horizon::Finite(t) => Some(t),
            Horizon::Stationary => None,
        }
    }

    pub fn measure_flow(&self) -> Result<MeasureFlow> {
        MeasureFlow::new(self.measures.clone())
    }

    /// Recomputes the residual from the stored data.
    pub fn recompute_residual(&self, inst: &MfgInstance) -> Result<f64> {
        match (self.horizon, self.norm_used) {
            (Horizon::Stationary, _) => {
                let mu = self.measures[0].as_slice();
                let next = push_forward(inst, mu, &self.policies[0], mu);
                Ok(tv(&next, mu))
            }
            (Horizon::Finite(_), NormKind::QSup) => {
                let (measures, _) = forward_from_q(inst, &self.q);
                let flow = MeasureFlow::new(measures)?;
                let bp = backward_induction(inst, &flow)?;
                Ok(bp.q.h.iter().zip(&self.q).map(|(a, b)| sup(a, b)).fold(0.0, f64::max))
            }
            (Horizon::Finite(_), norm) => {
                let flow = self.measure_flow()?;
                let gaps = apply_h(inst, &flow)?.tv_vector(&flow);
                match norm {
                    NormKind::PerronWeighted => {
                        let w = self
                            .weights
                            .as_ref()
                            .ok_or_else(|| MfgError::input("perron-weighted solution without weights"))?;
                        Ok(w.iter().zip(&gaps).map(|(a, b)| a * b).sum())
                    }
                    _ => Ok(gaps.into_iter().fold(0.0, f64::max)),
                }
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| MfgError::input(format!("solution: {e}")))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| MfgError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn sup(a: &Table, b: &Table) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
