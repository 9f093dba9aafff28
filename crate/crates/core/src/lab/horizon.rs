use std::f64::consts::PI;

use rayon::prelude::*;

use super::pool::with_pool;
use super::study::{check_grid, ls_slope, Flag, Inequality, StudyKind, StudyResult};
use crate::contraction::{build_a_t, check_assumption4, spectral_radius_power, POWER_MAX_ITER, POWER_TOL};
use crate::equilibrium::{nonstationary_reference, solve_finite_mfe, SolveOptions};
use crate::error::{MfgError, Result};
use crate::model::{compute_lipschitz_profile, tv, LipschitzProfile, MfgInstance};

/// Allowance of the nonincreasing-tail flag.
pub const TAIL_ALLOWANCE: f64 = 1e-9;
/// Gaps at or below this level are treated as round-off and left out of the
/// log-slope fit.
pub const GAP_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HorizonStudyOptions {
    /// Time steps `t` at which `TV(μ^{T_ref}_t, μ^T_t)` is measured. The first
    /// probe fits the envelope constant, the others are checked against it.
    pub t_probes: Vec<usize>,
    pub t_list: Vec<usize>,
    /// Reference horizon; defaults to `⌈1.5·max(T_list)⌉ + 20`.
    pub t_ref: Option<usize>,
    /// Bound on the gap at the largest `T`.
    pub tol: f64,
    /// Residual tolerance of every equilibrium solve.
    pub solver_tol: f64,
}

impl HorizonStudyOptions {
    pub fn new(t_probe: usize, t_list: Vec<usize>) -> Self {
        HorizonStudyOptions { t_probes: vec![t_probe], t_list, t_ref: None, tol: 1e-6, solver_tol: 1e-14 }
    }
}

pub fn default_t_ref(t_max: usize) -> usize {
    (3 * t_max).div_ceil(2) + 20
}

/// `(1/t)·(√(hatK/(ρ(A_T)·β)))^t·(2T+1)·β^(T·ε)`; `None` when `ρ(A_T)·β = 0`.
pub fn horizon_envelope(p: &LipschitzProfile, rho_at: f64, t: usize, horizon: usize, eps: f64) -> Option<f64> {
    let denom = rho_at * p.beta;
    if !(denom > 0.0) || t == 0 {
        return None;
    }
    let phi = (p.hat_k / denom).sqrt();
    let tt = horizon as f64;
    Some(phi.powi(t as i32) / t as f64 * (2.0 * tt + 1.0) * p.beta.powf(tt * eps))
}

/// Whether `hatK·cos²(π/(T+1)) > barK`, the horizon condition of the
/// large-`T` error bound.
pub fn in_bound_scope(p: &LipschitzProfile, horizon: usize) -> bool {
    let c = (PI / (horizon as f64 + 1.0)).cos();
    p.hat_k * c * c - p.bar_k > 0.0
}

/// Gap between finite-horizon equilibria and a long truncation, as a
/// function of the horizon.
///
/// Every `T` in `T_list` (and `T_ref`) must satisfy `ρ(A_T) < 1`. Columns:
/// `T`, `rho_AT`, then `gap` and `envelope` per probe (suffixed `_t<probe>`
/// when there are several probes).
pub fn horizon_error_study(inst: &MfgInstance, opts: &HorizonStudyOptions) -> Result<StudyResult> {
    check_grid(&opts.t_list, "T_list")?;
    if opts.t_probes.is_empty() {
        return Err(MfgError::input("need at least one probe time"));
    }
    let t_min = opts.t_list[0];
    let t_max = *opts.t_list.last().unwrap();
    if let Some(&bad) = opts.t_probes.iter().find(|&&t| t == 0 || t >= t_min) {
        return Err(MfgError::input(format!("probe t = {bad} must satisfy 1 <= t < min(T_list) = {t_min}")));
    }
    let t_ref = opts.t_ref.unwrap_or_else(|| default_t_ref(t_max));
    if t_ref <= t_max + 20 {
        return Err(MfgError::input(format!("T_ref = {t_ref} must exceed max(T_list) + 20 = {}", t_max + 20)));
    }
    if !(opts.tol > 0.0 && opts.solver_tol > 0.0) {
        return Err(MfgError::input("tolerances must be positive"));
    }

    let p = compute_lipschitz_profile(inst)?;
    let mut horizons = opts.t_list.clone();
    horizons.push(t_ref);
    let radii = with_pool(|| {
        horizons
            .par_iter()
            .map(|&t| Ok(spectral_radius_power(&build_a_t(&p, t)?, POWER_TOL, POWER_MAX_ITER)?.radius))
            .collect::<Result<Vec<f64>>>()
    })??;
    if let Some((t, r)) = horizons.iter().zip(&radii).find(|(_, &r)| r >= 1.0) {
        return Err(MfgError::Condition(format!("rho(A_T) = {r:.6} >= 1 at T = {t}; the horizon study needs contraction")));
    }

    let reference = nonstationary_reference(inst, t_ref, opts.solver_tol)?;
    let solve_opts = SolveOptions { tol: opts.solver_tol, max_iter: 100_000, ..Default::default() };
    let solutions = with_pool(|| {
        opts.t_list.par_iter().map(|&t| solve_finite_mfe(inst, t, &solve_opts)).collect::<Result<Vec<_>>>()
    })??;

    let eps_sup = check_assumption4(&p);
    let eps = eps_sup.map_or(0.0, |e| e / 2.0);
    let multi = opts.t_probes.len() > 1;
    let sfx = |t: usize| if multi { format!("_t{t}") } else { String::new() };

    let mut columns = vec!["T".to_string(), "rho_AT".to_string()];
    for &t in &opts.t_probes {
        columns.push(format!("gap{}", sfx(t)));
        columns.push(format!("envelope{}", sfx(t)));
    }
    let names: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut out = StudyResult::new(StudyKind::HorizonError, &names);
    out.param("T_ref", t_ref as f64);
    out.param("tol", opts.tol);
    out.param("solver_tol", opts.solver_tol);
    for (i, &t) in opts.t_probes.iter().enumerate() {
        out.param(&format!("t_probe_{i}"), t as f64);
    }

    let floor = GAP_FLOOR.max(100.0 * opts.solver_tol);
    // gaps[probe][row], envelopes[probe][row]
    let mut gaps = vec![Vec::new(); opts.t_probes.len()];
    let mut envs = vec![Vec::new(); opts.t_probes.len()];
    for (k, (&horizon, sol)) in opts.t_list.iter().zip(&solutions).enumerate() {
        let mut row = vec![Some(horizon as f64), Some(radii[k])];
        for (j, &t) in opts.t_probes.iter().enumerate() {
            let g = tv(sol.measures[t].as_slice(), reference.measures[t].as_slice());
            let e = horizon_envelope(&p, radii[k], t, horizon, eps);
            gaps[j].push(g);
            envs[j].push(e);
            row.push(Some(g));
            row.push(e);
        }
        out.push_row(row);
    }

    let n = opts.t_list.len();
    let quartile = n / 4;
    for (j, &t) in opts.t_probes.iter().enumerate() {
        let s = sfx(t);
        let (xs, ys): (Vec<f64>, Vec<f64>) = opts
            .t_list
            .iter()
            .zip(&gaps[j])
            .filter(|(_, &g)| g > floor)
            .map(|(&tt, &g)| (tt as f64, g.ln()))
            .unzip();
        let slope = ls_slope(&xs, &ys);
        out.diag(&format!("log_gap_slope{s}"), slope);
        out.diag(&format!("fit_points{s}"), Some(xs.len() as f64));
        let slope_flag = Flag::from_checks(
            &format!("decay_slope{s}"),
            slope.map(|v| Inequality { at: t as f64, lhs: v, rhs: 0.0, allowance: 0.0 }),
        );
        let slope_flag = if slope.is_none() {
            slope_flag.with_note(format!("fewer than two gaps above {floor:e}"))
        } else {
            slope_flag
        };
        out.flags.push(slope_flag);

        let tail = (quartile.max(1)..n).map(|i| Inequality {
            at: opts.t_list[i] as f64,
            lhs: gaps[j][i],
            rhs: gaps[j][i - 1],
            allowance: TAIL_ALLOWANCE,
        });
        out.flags.push(Flag::from_checks(&format!("tail_monotone{s}"), tail));
        out.flags.push(Flag::from_checks(
            &format!("final_gap{s}"),
            [Inequality { at: t_max as f64, lhs: gaps[j][n - 1], rhs: opts.tol, allowance: 0.0 }],
        ));
    }

    // Envelope constant from the first probe, checked on the others.
    let fitted = gaps[0]
        .iter()
        .zip(&envs[0])
        .filter(|(&g, _)| g > floor)
        .filter_map(|(&g, e)| e.map(|e| g / e))
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    out.diag("fitted_constant", fitted);
    out.diag("envelope_exponent", Some(eps));
    out.diag("assumption4_eps_sup", eps_sup);
    out.diag("scope_min_T", opts.t_list.iter().find(|&&t| in_bound_scope(&p, t)).map(|&t| t as f64));
    out.diag("reference_iterations", Some(reference.iterations as f64));
    if multi {
        let mut checks = Vec::new();
        if let Some(kc) = fitted {
            for j in 1..opts.t_probes.len() {
                for i in 0..n {
                    if let Some(e) = envs[j][i] {
                        checks.push(Inequality { at: opts.t_list[i] as f64, lhs: gaps[j][i], rhs: kc * e, allowance: floor });
                    }
                }
            }
        }
        let mut f = Flag::from_checks("cross_probe_envelope", checks);
        if fitted.is_none() {
            f = f.with_note("no first-probe gap above the floor to fit the constant");
        }
        if eps_sup.is_none() {
            f = f.with_note("decay condition fails; envelope exponent set to 0");
        }
        out.flags.push(f);
    }
    Ok(out)
}
