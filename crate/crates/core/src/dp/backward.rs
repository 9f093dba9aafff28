use serde::{Deserialize, Serialize};

use super::{soft_min_raw, softmax_raw};
use crate::error::{MfgError, Result};
use crate::model::{MeasureFlow, MfgInstance, ProbVector};

/// State-action table indexed `[state][action]`.
pub type Table = Vec<Vec<f64>>;

/// Linear parts `h_t` of the state-action functions, `t = 0..=T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QFlow {
    pub h: Vec<Table>,
}

/// Softmax policies `π_t(·|x)`, `t = 0..=T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyFlow {
    pub pi: Vec<Vec<ProbVector>>,
}

/// Soft-min values `V_t(x)`, `t = 0..=T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueFlow {
    pub v: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackwardPass {
    pub q: QFlow,
    pub policy: PolicyFlow,
    pub value: ValueFlow,
}

impl QFlow {
    pub fn horizon(&self) -> usize {
        self.h.len() - 1
    }

    /// `max_t ‖h_t − g_t‖∞`.
    pub fn max_sup_distance(&self, other: &QFlow) -> f64 {
        self.h.iter().zip(&other.h).map(|(a, b)| table_sup_distance(a, b)).fold(0.0, f64::max)
    }

    pub fn policies(&self, tau: f64) -> PolicyFlow {
        PolicyFlow { pi: self.h.iter().map(|t| policy_table(t, tau)).collect() }
    }
}

impl PolicyFlow {
    pub fn horizon(&self) -> usize {
        self.pi.len() - 1
    }
}

pub(crate) fn table_sup_distance(a: &Table, b: &Table) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub(crate) fn policy_table(h: &Table, tau: f64) -> Vec<ProbVector> {
    h.iter()
        .map(|row| {
            let mut out = vec![0.0; row.len()];
            softmax_raw(row, tau, &mut out);
            ProbVector::from_mixture(out)
        })
        .collect()
}

pub(crate) fn soft_values(h: &Table, tau: f64) -> Vec<f64> {
    h.iter().map(|row| soft_min_raw(row, tau)).collect()
}

/// `c(x,a,μ) + β·Σ_y v(y)·p(y|x,a,μ)`; with `v = None` only the cost.
pub(crate) fn bellman_table(inst: &MfgInstance, mu: &[f64], v: Option<&[f64]>) -> Table {
    let n = inst.n_states;
    let mut scratch = vec![0.0; n];
    (0..n)
        .map(|x| {
            (0..inst.n_actions)
                .map(|a| {
                    let c = inst.cost(x, a, mu);
                    match v {
                        None => c,
                        Some(v) => {
                            inst.transition_into(x, a, mu, &mut scratch);
                            c + inst.beta * scratch.iter().zip(v).map(|(p, w)| p * w).sum::<f64>()
                        }
                    }
                })
                .collect()
        })
        .collect()
}

/// Backward recursion for a fixed measure flow.
///
/// ```text
/// h_T(x,a) = c(x,a,μ_T)
/// h_t(x,a) = c(x,a,μ_t) + β·Σ_y V_{t+1}(y)·p(y|x,a,μ_t),   V_s = soft_min(h_s)
/// ```
///
/// Time 0 always uses the instance's `mu0`.
pub fn backward_induction(inst: &MfgInstance, flow: &MeasureFlow) -> Result<BackwardPass> {
    if flow.n_states() != inst.n_states {
        return Err(MfgError::dim(format!(
            "flow over {} states for an instance with {}",
            flow.n_states(),
            inst.n_states
        )));
    }
    let horizon = flow.horizon();
    if horizon < 1 {
        return Err(MfgError::input("backward induction needs T >= 1"));
    }
    let measure = |t: usize| if t == 0 { inst.mu0.as_slice() } else { flow.mu[t].as_slice() };

    let mut h = vec![Vec::new(); horizon + 1];
    let mut v = vec![Vec::new(); horizon + 1];
    h[horizon] = bellman_table(inst, measure(horizon), None);
    v[horizon] = soft_values(&h[horizon], inst.tau);
    for t in (0..horizon).rev() {
        h[t] = bellman_table(inst, measure(t), Some(&v[t + 1]));
        v[t] = soft_values(&h[t], inst.tau);
    }
    let q = QFlow { h };
    let policy = q.policies(inst.tau);
    Ok(BackwardPass { q, policy, value: ValueFlow { v } })
}
