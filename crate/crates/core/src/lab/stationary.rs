use super::study::{Flag, Inequality, StudyKind, StudyResult};
use crate::contraction::infinite_radius;
use crate::equilibrium::{extend_finite_mfe, nonstationary_reference, solve_stationary_mfe};
use crate::error::{MfgError, Result};
use crate::model::{compute_lipschitz_profile, tv, MfgInstance};

pub const RATE_ALLOWANCE: f64 = 1e-9;
/// Gaps below this level are left out of the per-step ratio.
pub const RATIO_FLOOR: f64 = 1e-12;

pub const STATIONARY_COLUMNS: [&str; 5] = ["t", "gap_mu", "gap_q", "envelope_mu", "q_bound"];

fn sup_norm(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Convergence of a long truncation towards the stationary equilibrium.
///
/// With `C = infinite_radius` and `G = sup_k gap_mu(k)`, the flags check
/// for `t ≤ T_ref/2`:
/// - `rate`: `sup_{t ≤ k ≤ T_ref} gap_mu(k) ≤ C^t·G`;
/// - `q_bound`: `gap_q(t) ≤ β^(s−t)·M'/(1−β) + barL·(1−β^(s−t))/(1−β)·C^t·G`
///   with `s = min(t + ⌈ln tol/ln β⌉, T_ref)` and `M' = M + τ·ln|A|`;
/// - `step_ratio`: `gap_mu(t+1)/gap_mu(t) ≤ C` for `1 ≤ t < T_ref/2` above
///   the floor.
///
/// `tail_interior` and `tail_full` compare the extended truncation on
/// `[T_ref/2, 3T_ref/4]` and `[T_ref/2, T_ref]` with `μ` at `2·tol`; the
/// full window includes the steps next to the terminal time.
pub fn stationary_gap_study(inst: &MfgInstance, t_ref: usize, tol: f64) -> Result<StudyResult> {
    if t_ref < 2 {
        return Err(MfgError::input(format!("T_ref = {t_ref} must be >= 2")));
    }
    if !(tol > 0.0) {
        return Err(MfgError::input(format!("tol = {tol} must be positive")));
    }
    let p = compute_lipschitz_profile(inst)?;
    let c = infinite_radius(&p);
    if c >= 1.0 {
        return Err(MfgError::Condition(format!(
            "infinite radius barK + K1*barL/(rho(1-beta)) = {c:.6} >= 1; the stationary study needs contraction"
        )));
    }
    let stat = solve_stationary_mfe(inst, tol, 100_000)?;
    let reference = nonstationary_reference(inst, t_ref, tol)?;
    let mu = stat.measures[0].as_slice();
    let h = &stat.q[0];

    let gap_mu: Vec<f64> = (0..=t_ref).map(|t| tv(mu, reference.measures[t].as_slice())).collect();
    let gap_q: Vec<f64> = (0..=t_ref).map(|t| sup_norm(h, &reference.q[t])).collect();
    let g = gap_mu.iter().cloned().fold(0.0, f64::max);

    let beta = p.beta;
    let m_prime = inst.cost_bound() + inst.tau * (inst.n_actions as f64).ln();
    let lag = if beta > 0.0 { (tol.ln() / beta.ln()).ceil().max(0.0) as usize } else { 0 };
    let q_bound = |t: usize| {
        let s = (t + lag).min(t_ref);
        let b = beta.powi((s - t) as i32);
        b * m_prime / (1.0 - beta) + p.bar_l * (1.0 - b) / (1.0 - beta) * c.powi(t as i32) * g
    };

    let mut out = StudyResult::new(StudyKind::StationaryGap, &STATIONARY_COLUMNS);
    out.param("T_ref", t_ref as f64);
    out.param("tol", tol);
    for t in 0..=t_ref {
        out.push_row(vec![
            Some(t as f64),
            Some(gap_mu[t]),
            Some(gap_q[t]),
            Some(c.powi(t as i32) * g),
            Some(q_bound(t)),
        ]);
    }

    let half = t_ref / 2;
    let mut suffix_sup = vec![0.0f64; t_ref + 2];
    for t in (0..=t_ref).rev() {
        suffix_sup[t] = suffix_sup[t + 1].max(gap_mu[t]);
    }
    let rate = (0..=half).map(|t| Inequality {
        at: t as f64,
        lhs: suffix_sup[t],
        rhs: c.powi(t as i32) * g,
        allowance: RATE_ALLOWANCE,
    });
    out.flags.push(Flag::from_checks("rate", rate));
    let qb = (0..=half).map(|t| Inequality { at: t as f64, lhs: gap_q[t], rhs: q_bound(t), allowance: RATE_ALLOWANCE });
    out.flags.push(Flag::from_checks("q_bound", qb));

    let mut ratios = Vec::new();
    for t in 1..half {
        if gap_mu[t] > RATIO_FLOOR && gap_mu[t + 1] > RATIO_FLOOR {
            ratios.push(Inequality { at: t as f64, lhs: gap_mu[t + 1] / gap_mu[t], rhs: c, allowance: 0.0 });
        }
    }
    let max_ratio = ratios.iter().map(|r| r.lhs).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    out.flags.push(Flag::from_checks("step_ratio", ratios));

    let tail = |hi: usize| {
        (half..=hi).map(|k| {
            let (_, m) = extend_finite_mfe(&reference, k);
            Inequality { at: k as f64, lhs: tv(m.as_slice(), mu), rhs: 2.0 * tol, allowance: 0.0 }
        })
    };
    out.flags.push(Flag::from_checks("tail_interior", tail(3 * t_ref / 4)));
    out.flags.push(Flag::from_checks("tail_full", tail(t_ref)));

    out.diag("infinite_radius", Some(c));
    out.diag("sup_gap_mu", Some(g));
    out.diag("max_step_ratio", max_ratio);
    out.diag("q_bound_lag", Some(lag as f64));
    out.diag("M_prime", Some(m_prime));
    out.diag("stationary_iterations", Some(stat.iterations as f64));
    out.diag("reference_iterations", Some(reference.iterations as f64));
    Ok(out)
}
