use rayon::prelude::*;

use super::pool::with_pool;
use super::study::{Flag, Inequality, StudyKind, StudyResult};
use crate::contraction::{
    asymptotic_bounds_at, build_a_t, gershgorin_bound, horizon_independent_bound, infinite_radius, limit_bound_at,
    spectral_radius_detsearch, spectral_radius_power, DET_TOL, POWER_MAX_ITER, POWER_TOL,
};
use crate::error::{MfgError, Result};
use crate::model::LipschitzProfile;

pub const SPECTRUM_COLUMNS: [&str; 6] = ["T", "rho_det", "rho_power", "gershgorin", "asym_lower", "asym_upper"];

/// Allowance on successive radii in the monotonicity flag.
pub const MONOTONE_ALLOWANCE: f64 = 1e-12;
pub const GERSHGORIN_ALLOWANCE: f64 = 1e-9;
pub const CONTAINMENT_ALLOWANCE: f64 = 1e-8;
pub const DUAL_ALLOWANCE: f64 = 1e-8;

struct Cell {
    t: usize,
    det: Option<f64>,
    power: f64,
    gershgorin: f64,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn cell(p: &LipschitzProfile, t: usize) -> Result<Cell> {
    let power = spectral_radius_power(&build_a_t(p, t)?, POWER_TOL, POWER_MAX_ITER)?.radius;
    let det = if p.is_decoupled() { None } else { Some(spectral_radius_detsearch(p, t, DET_TOL)?) };
    let asym = asymptotic_bounds_at(p, t);
    Ok(Cell { t, det, power, gershgorin: gershgorin_bound(p, t), lower: asym.lower, upper: asym.upper })
}

/// `ρ(A_T)` by both estimators over `T = t_min, t_min+step, …, ≤ t_max`,
/// next to the row-sum bound and the large-`T` bounds.
///
/// Flags: `monotone` (power radius nondecreasing in `T`), `gershgorin`,
/// `containment` (where both large-`T` bounds are defined) and
/// `dual_agreement`.
pub fn spectrum_sweep(p: &LipschitzProfile, t_min: usize, t_max: usize, step: usize) -> Result<StudyResult> {
    if t_min < 1 || step < 1 || t_max < t_min {
        return Err(MfgError::input(format!(
            "need 1 <= tmin <= tmax and step >= 1, got tmin = {t_min}, tmax = {t_max}, step = {step}"
        )));
    }
    let grid: Vec<usize> = (t_min..=t_max).step_by(step).collect();
    let cells = with_pool(|| grid.par_iter().map(|&t| cell(p, t)).collect::<Result<Vec<_>>>())??;

    let mut out = StudyResult::new(StudyKind::Spectrum, &SPECTRUM_COLUMNS);
    out.param("T_min", t_min as f64);
    out.param("T_max", t_max as f64);
    out.param("step", step as f64);
    for c in &cells {
        out.push_row(vec![Some(c.t as f64), c.det, Some(c.power), Some(c.gershgorin), c.lower, c.upper]);
    }

    let monotone = cells.windows(2).map(|w| Inequality {
        at: w[1].t as f64,
        lhs: w[0].power,
        rhs: w[1].power,
        allowance: MONOTONE_ALLOWANCE,
    });
    out.flags.push(Flag::from_checks("monotone", monotone));
    let gersh = cells.iter().map(|c| Inequality {
        at: c.t as f64,
        lhs: c.power,
        rhs: c.gershgorin,
        allowance: GERSHGORIN_ALLOWANCE,
    });
    out.flags.push(Flag::from_checks("gershgorin", gersh));
    let mut contain = Vec::new();
    for c in &cells {
        if let (Some(lo), Some(hi)) = (c.lower, c.upper) {
            contain.push(Inequality { at: c.t as f64, lhs: lo, rhs: c.power, allowance: CONTAINMENT_ALLOWANCE });
            contain.push(Inequality { at: c.t as f64, lhs: c.power, rhs: hi, allowance: CONTAINMENT_ALLOWANCE });
        }
    }
    out.flags.push(Flag::from_checks("containment", contain));
    let dual = cells.iter().filter_map(|c| {
        c.det.map(|d| Inequality { at: c.t as f64, lhs: (d - c.power).abs(), rhs: 0.0, allowance: DUAL_ALLOWANCE })
    });
    out.flags.push(Flag::from_checks("dual_agreement", dual));

    let max_diff = cells.iter().filter_map(|c| c.det.map(|d| (d - c.power).abs())).fold(None, |m: Option<f64>, v| {
        Some(m.map_or(v, |m| m.max(v)))
    });
    out.diag("max_dual_difference", max_diff);
    out.diag("limit_bound", Some(limit_bound_at(p)));
    out.diag("horizon_independent_bound", Some(horizon_independent_bound(p)));
    out.diag("infinite_radius", Some(infinite_radius(p)));
    out.diag("first_T_with_asymptotic_bounds", cells.iter().find(|c| c.lower.is_some()).map(|c| c.t as f64));
    Ok(out)
}
