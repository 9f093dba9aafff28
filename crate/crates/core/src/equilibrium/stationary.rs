use super::finite::push_forward;
use super::{Horizon, MfeSolution, NormKind};
use crate::contraction::infinite_radius;
use crate::dp::value_iteration_stationary;
use crate::error::{MfgError, Result};
use crate::model::{compute_lipschitz_profile, tv, MfgInstance, ProbVector};

const INNER_MAX_ITER: usize = 1_000_000;

/// Stationary equilibrium by alternating value iteration under a frozen `μ`
/// (inner tolerance `tol/10`) with the push-forward
/// `μ' = Σ_x p(·|x, u*_μ(x), μ)·μ(x)`. Stops when `TV(μ', μ) ≤ tol` and
/// returns `μ` with its own policy and table.
pub fn solve_stationary_mfe(inst: &MfgInstance, tol: f64, max_iter: usize) -> Result<MfeSolution> {
    if !(tol > 0.0) {
        return Err(MfgError::input(format!("tol = {tol} must be positive")));
    }
    let mut mu = inst.mu0.clone();
    let mut history = Vec::new();
    for k in 0..=max_iter {
        let vi = value_iteration_stationary(inst, &mu, tol / 10.0, INNER_MAX_ITER)?;
        let next = push_forward(inst, mu.as_slice(), &vi.policy, mu.as_slice());
        let res = tv(&next, mu.as_slice());
        history.push(res);
        if res <= tol {
            return Ok(MfeSolution {
                horizon: Horizon::Stationary,
                measures: vec![mu],
                policies: vec![vi.policy],
                q: vec![vi.h],
                residual: res,
                iterations: k,
                norm_used: NormKind::MaxTv,
                weights: None,
                reference: false,
                residual_history: history,
            });
        }
        if k < max_iter {
            mu = ProbVector::from_mixture(next);
        }
    }
    let radius = match compute_lipschitz_profile(inst) {
        Ok(p) => format!("infinite radius barK + K1*barL/(rho(1-beta)) = {:.6}", infinite_radius(&p)),
        Err(e) => format!("infinite radius undefined: {e}"),
    };
    Err(MfgError::NonConvergence {
        iterations: max_iter,
        residual: *history.last().unwrap(),
        history,
        detail: format!(" in the stationary iteration; {radius}"),
    })
}
