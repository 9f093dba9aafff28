use super::study::{Flag, Inequality, StudyKind, StudyResult};
use crate::contraction::infinite_radius;
use crate::equilibrium::{solve_finite_mfe, solve_stationary_mfe, SolveOptions};
use crate::error::{MfgError, Result};
use crate::model::{compute_lipschitz_profile, MfgInstance, ProbVector};

pub const PERTURBATION_COLUMNS: [&str; 3] = ["t", "joint_tv", "measure_tv"];

/// TV distance between the joint measures `π⊗μ` and `π̃⊗μ̃` on `X×A`.
pub fn joint_tv(mu: &ProbVector, pi: &[ProbVector], mu2: &ProbVector, pi2: &[ProbVector]) -> f64 {
    let mut s = 0.0;
    for x in 0..mu.len() {
        for a in 0..pi[x].len() {
            s += (mu[x] * pi[x][a] - mu2[x] * pi2[x][a]).abs();
        }
    }
    0.5 * s
}

fn require_contractive(inst: &MfgInstance, which: &str) -> Result<()> {
    let c = infinite_radius(&compute_lipschitz_profile(inst)?);
    if c >= 1.0 {
        return Err(MfgError::Condition(format!(
            "instance {which}: infinite radius barK + K1*barL/(rho(1-beta)) = {c:.6} >= 1"
        )));
    }
    Ok(())
}

/// Compares how far apart the equilibria of two games are at a finite
/// horizon and in the stationary setting.
///
/// `eps_fin = max_{0≤t≤T}` joint TV of the two finite-horizon equilibria,
/// `eps_stat` the joint TV of the stationary ones; the flag `three_epsilon`
/// checks `eps_stat ≤ 3·eps_fin + tol`.
pub fn perturbation_study(a: &MfgInstance, b: &MfgInstance, horizon: usize, tol: f64) -> Result<StudyResult> {
    if a.n_states != b.n_states || a.n_actions != b.n_actions {
        return Err(MfgError::dim(format!(
            "instances have shapes ({}, {}) and ({}, {})",
            a.n_states, a.n_actions, b.n_states, b.n_actions
        )));
    }
    if horizon < 1 {
        return Err(MfgError::input("horizon T must be >= 1"));
    }
    if !(tol > 0.0) {
        return Err(MfgError::input(format!("tol = {tol} must be positive")));
    }
    require_contractive(a, "A")?;
    require_contractive(b, "B")?;

    let solver_tol = (tol * 1e-3).max(1e-14);
    let opts = SolveOptions { tol: solver_tol, max_iter: 100_000, ..Default::default() };
    let fa = solve_finite_mfe(a, horizon, &opts)?;
    let fb = solve_finite_mfe(b, horizon, &opts)?;
    let sa = solve_stationary_mfe(a, solver_tol, 100_000)?;
    let sb = solve_stationary_mfe(b, solver_tol, 100_000)?;

    let mut out = StudyResult::new(StudyKind::Perturbation, &PERTURBATION_COLUMNS);
    out.param("T", horizon as f64);
    out.param("tol", tol);
    out.param("solver_tol", solver_tol);
    let mut eps_fin = 0.0f64;
    for t in 0..=horizon {
        let j = joint_tv(&fa.measures[t], &fa.policies[t], &fb.measures[t], &fb.policies[t]);
        let m = crate::model::tv(fa.measures[t].as_slice(), fb.measures[t].as_slice());
        eps_fin = eps_fin.max(j);
        out.push_row(vec![Some(t as f64), Some(j), Some(m)]);
    }
    let eps_stat = joint_tv(&sa.measures[0], &sa.policies[0], &sb.measures[0], &sb.policies[0]);
    out.diag("eps_fin", Some(eps_fin));
    out.diag("eps_stat", Some(eps_stat));
    out.diag("eps_stat_measure", Some(crate::model::tv(sa.measures[0].as_slice(), sb.measures[0].as_slice())));
    out.flags.push(Flag::from_checks(
        "three_epsilon",
        [Inequality { at: horizon as f64, lhs: eps_stat, rhs: 3.0 * eps_fin, allowance: tol }],
    ));
    Ok(out)
}
