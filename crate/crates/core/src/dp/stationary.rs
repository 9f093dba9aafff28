use super::backward::{bellman_table, policy_table, soft_values, table_sup_distance, Table};
use crate::error::{MfgError, Result};
use crate::model::{MfgInstance, ProbVector};

/// Output of stationary value iteration under a frozen measure.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryValue {
    pub h: Table,
    pub value: Vec<f64>,
    pub policy: Vec<ProbVector>,
    pub iterations: usize,
    /// Sup-norm change of `h` per sweep.
    pub residuals: Vec<f64>,
}

/// Fixed point of `h ↦ c(·,·,μ) + β·Σ_y soft_min(h(y,·))·p(y|·,·,μ)`.
///
/// Starts from `h = c(·,·,μ)`; stops at the first sweep whose change is at
/// most `tol` and returns the updated table.
pub fn value_iteration_stationary(
    inst: &MfgInstance,
    mu: &ProbVector,
    tol: f64,
    max_iter: usize,
) -> Result<StationaryValue> {
    if mu.len() != inst.n_states {
        return Err(MfgError::dim(format!("measure of length {} for {} states", mu.len(), inst.n_states)));
    }
    if !(tol > 0.0) {
        return Err(MfgError::input(format!("tol = {tol} must be positive")));
    }
    let mu = mu.as_slice();
    let mut h = bellman_table(inst, mu, None);
    let mut residuals = Vec::new();
    for it in 1..=max_iter {
        let v = soft_values(&h, inst.tau);
        let next = bellman_table(inst, mu, Some(&v));
        let res = table_sup_distance(&next, &h);
        residuals.push(res);
        h = next;
        if res <= tol {
            let value = soft_values(&h, inst.tau);
            let policy = policy_table(&h, inst.tau);
            return Ok(StationaryValue { h, value, policy, iterations: it, residuals });
        }
    }
    let last = residuals.last().copied().unwrap_or(f64::INFINITY);
    Err(MfgError::NonConvergence {
        iterations: max_iter,
        residual: last,
        history: residuals,
        detail: " in stationary value iteration".into(),
    })
}
