use serde::{Deserialize, Serialize};

use super::{Horizon, MfeSolution, NormKind};
use crate::contraction::{build_a_t, spectral_radius_power, POWER_MAX_ITER, POWER_TOL};
use crate::dp::{backward_induction, softmax_raw, BackwardPass, Table};
use crate::error::{MfgError, Result};
use crate::model::{compute_lipschitz_profile, LipschitzProfile, MeasureFlow, MfgInstance, ProbVector};

/// One-step push-forward
/// `ν(y) = Σ_x μ(x)·Σ_a π(a|x)·p(y|x,a,m)`, where `m` enters the transition.
pub fn push_forward(inst: &MfgInstance, mu: &[f64], pi: &[ProbVector], m: &[f64]) -> Vec<f64> {
    let n = inst.n_states;
    let mut out = vec![0.0; n];
    let mut row = vec![0.0; n];
    for x in 0..n {
        if mu[x] == 0.0 {
            continue;
        }
        for a in 0..inst.n_actions {
            let w = mu[x] * pi[x][a];
            if w == 0.0 {
                continue;
            }
            inst.transition_into(x, a, m, &mut row);
            for (o, r) in out.iter_mut().zip(&row) {
                *o += w * r;
            }
        }
    }
    out
}

/// The operator `H` together with the backward pass it is built from.
pub fn apply_h_with_pass(inst: &MfgInstance, flow: &MeasureFlow) -> Result<(MeasureFlow, BackwardPass)> {
    flow.check_against(inst)?;
    let bp = backward_induction(inst, flow)?;
    let horizon = flow.horizon();
    let mut mu = Vec::with_capacity(horizon + 1);
    mu.push(inst.mu0.clone());
    for t in 0..horizon {
        let m = flow.mu[t].as_slice();
        mu.push(ProbVector::from_mixture(push_forward(inst, m, &bp.policy.pi[t], m)));
    }
    Ok((MeasureFlow { mu }, bp))
}

/// `H(μ)_{t+1} = Σ_x p(·|x, u*_t(x), μ_t)·μ_t(x)` with `u*` the softmax policies
/// of the backward pass on the input flow; `H(μ)_0 = μ0`.
pub fn apply_h(inst: &MfgInstance, flow: &MeasureFlow) -> Result<MeasureFlow> {
    Ok(apply_h_with_pass(inst, flow)?.0)
}

/// Starting flow of the measure iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// `μ_t ≡ μ0`.
    #[default]
    Constant,
    /// `μ0` followed by uniform measures.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Averaging weight: `μ ← λ·μ + (1−λ)·H(μ)`.
    pub lambda: f64,
    pub norm: NormKind,
    pub init: InitKind,
    /// Profile for the Perron-weighted norm; computed from the instance if
    /// absent.
    pub profile: Option<LipschitzProfile>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 10_000,
            lambda: 0.0,
            norm: NormKind::MaxTv,
            init: InitKind::Constant,
            profile: None,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions { tol, ..Default::default() }
    }
}

fn perron_weights(inst: &MfgInstance, horizon: usize, profile: Option<&LipschitzProfile>) -> Result<Vec<f64>> {
    let unavailable = |why: String| {
        MfgError::Condition(format!("Perron vector of A_T unavailable ({why}); use the max-tv norm instead"))
    };
    let owned;
    let p = match profile {
        Some(p) => p,
        None => {
            owned = compute_lipschitz_profile(inst).map_err(|e| unavailable(e.to_string()))?;
            &owned
        }
    };
    let a = build_a_t(p, horizon)?;
    let r = spectral_radius_power(&a, POWER_TOL, POWER_MAX_ITER).map_err(|e| unavailable(e.to_string()))?;
    if r.degenerate || r.left.iter().any(|&w| w <= 0.0) {
        return Err(unavailable("A_T is reducible".into()));
    }
    Ok(r.left)
}

/// Finite-horizon equilibrium by (averaged) fixed-point iteration of `H`.
///
/// `iterations` counts flow updates; the returned measures are the iterate at
/// which the residual fell below `tol`, with policies from its backward pass.
pub fn solve_finite_mfe(inst: &MfgInstance, horizon: usize, opts: &SolveOptions) -> Result<MfeSolution> {
    if horizon < 1 {
        return Err(MfgError::input("horizon T must be >= 1"));
    }
    if !(opts.tol > 0.0) {
        return Err(MfgError::input(format!("tol = {} must be positive", opts.tol)));
    }
    if !(0.0..1.0).contains(&opts.lambda) {
        return Err(MfgError::input(format!("lambda = {} outside [0, 1)", opts.lambda)));
    }
    let weights = match opts.norm {
        NormKind::MaxTv => None,
        NormKind::PerronWeighted => Some(perron_weights(inst, horizon, opts.profile.as_ref())?),
        NormKind::QSup => return Err(MfgError::input("q-sup is the norm of the Q-flow iteration")),
    };
    let mut flow = match opts.init {
        InitKind::Constant => MeasureFlow::constant(&inst.mu0, horizon),
        InitKind::Uniform => MeasureFlow::uniform_after(&inst.mu0, horizon),
    };
    let mut history = Vec::new();
    for k in 0..=opts.max_iter {
        let (next, bp) = apply_h_with_pass(inst, &flow)?;
        let gaps = next.tv_vector(&flow);
        let res = match &weights {
            Some(w) => w.iter().zip(&gaps).map(|(a, b)| a * b).sum(),
            None => gaps.iter().cloned().fold(0.0, f64::max),
        };
        history.push(res);
        if res <= opts.tol {
            return Ok(MfeSolution {
                horizon: Horizon::Finite(horizon),
                measures: flow.mu,
                policies: bp.policy.pi,
                q: bp.q.h,
                residual: res,
                iterations: k,
                norm_used: opts.norm,
                weights,
                reference: false,
                residual_history: history,
            });
        }
        if k == opts.max_iter {
            break;
        }
        flow = if opts.lambda == 0.0 { next } else { flow.mix(&next, opts.lambda) };
    }
    Err(MfgError::NonConvergence {
        iterations: opts.max_iter,
        residual: *history.last().unwrap(),
        history,
        detail: format!(" in the finite-horizon iteration (T = {horizon})"),
    })
}

/// Measures and policies generated from `μ0` by the softmax policies of `h`.
pub fn forward_from_q(inst: &MfgInstance, h: &[Table]) -> (Vec<ProbVector>, Vec<Vec<ProbVector>>) {
    let policies: Vec<Vec<ProbVector>> = h
        .iter()
        .map(|table| {
            table
                .iter()
                .map(|row| {
                    let mut out = vec![0.0; row.len()];
                    softmax_raw(row, inst.tau, &mut out);
                    ProbVector::from_mixture(out)
                })
                .collect()
        })
        .collect();
    let mut measures = Vec::with_capacity(h.len());
    measures.push(inst.mu0.clone());
    for t in 0..h.len() - 1 {
        let m = measures[t].as_slice().to_vec();
        measures.push(ProbVector::from_mixture(push_forward(inst, &m, &policies[t], &m)));
    }
    (measures, policies)
}

/// Finite-horizon equilibrium by iterating on Q-flows: propagate measures
/// forward under `softmax(h̃)`, then run the backward recursion on them.
/// Starts from the Q-flow of the constant flow `μ_t ≡ μ0`.
pub fn solve_finite_mfe_q_iteration(
    inst: &MfgInstance,
    horizon: usize,
    tol: f64,
    max_iter: usize,
) -> Result<MfeSolution> {
    if horizon < 1 {
        return Err(MfgError::input("horizon T must be >= 1"));
    }
    if !(tol > 0.0) {
        return Err(MfgError::input(format!("tol = {tol} must be positive")));
    }
    let mut h = backward_induction(inst, &MeasureFlow::constant(&inst.mu0, horizon))?.q.h;
    let mut history = Vec::new();
    for k in 0..=max_iter {
        let (measures, policies) = forward_from_q(inst, &h);
        let flow = MeasureFlow { mu: measures };
        let next = backward_induction(inst, &flow)?.q.h;
        let res = next
            .iter()
            .zip(&h)
            .map(|(a, b)| a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        history.push(res);
        if res <= tol {
            return Ok(MfeSolution {
                horizon: Horizon::Finite(horizon),
                measures: flow.mu,
                policies,
                q: h,
                residual: res,
                iterations: k,
                norm_used: NormKind::QSup,
                weights: None,
                reference: false,
                residual_history: history,
            });
        }
        h = next;
    }
    Err(MfgError::NonConvergence {
        iterations: max_iter,
        residual: *history.last().unwrap(),
        history,
        detail: format!(" in the Q-flow iteration (T = {horizon})"),
    })
}

/// Policy and measure at time `t` of the extension that repeats the terminal
/// entries after the horizon.
pub fn extend_finite_mfe(sol: &MfeSolution, t: usize) -> (Vec<ProbVector>, ProbVector) {
    let i = t.min(sol.measures.len() - 1);
    (sol.policies[i].clone(), sol.measures[i].clone())
}

/// Long-horizon truncation standing in for the infinite-horizon
/// non-stationary equilibrium.
pub fn nonstationary_reference(inst: &MfgInstance, t_ref: usize, tol: f64) -> Result<MfeSolution> {
    let opts = SolveOptions { tol, max_iter: 100_000, ..Default::default() };
    let mut sol = solve_finite_mfe(inst, t_ref, &opts)?;
    sol.reference = true;
    Ok(sol)
}
