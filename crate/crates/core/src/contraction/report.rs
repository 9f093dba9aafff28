use rayon::prelude::*;
use serde_json::{json, Value};

use super::{
    asymptotic_bounds_at, bounds_bt, build_a_t, build_b_t, check_assumption4, check_prop_qwe, gershgorin_bound,
    infinite_radius, limit_bound_at, spectral_radius_detsearch, spectral_radius_power, DET_TOL, POWER_MAX_ITER,
    POWER_TOL,
};
use crate::error::{MfgError, Result};
use crate::lab::csv::{csv_float, csv_opt};
use crate::model::LipschitzProfile;

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub t: usize,
    pub rho_power: f64,
    /// `None` for decoupled profiles, where the search is not defined.
    pub rho_detsearch: Option<f64>,
    pub gershgorin: f64,
    pub asym_lower: Option<f64>,
    pub asym_upper: Option<f64>,
    pub rho_bt: f64,
    /// `None` unless `0 < barK < 1`.
    pub bt_upper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub profile: LipschitzProfile,
    pub rows: Vec<ReportRow>,
    pub infinite_radius: f64,
    pub contractive_infinite: bool,
    pub limit_bound_at: f64,
    pub assumption4_epsilon: Option<f64>,
    pub prop_qwe_lhs_holds: bool,
    pub prop_qwe_rhs_holds: bool,
}

pub const REPORT_CSV_HEADER: &str = "T,rho_power,rho_detsearch,gershgorin,asym_lower,asym_upper,rho_BT,bt_upper";

fn row(p: &LipschitzProfile, t: usize) -> Result<ReportRow> {
    let rho_power = spectral_radius_power(&build_a_t(p, t)?, POWER_TOL, POWER_MAX_ITER)?.radius;
    let rho_detsearch = if p.is_decoupled() { None } else { Some(spectral_radius_detsearch(p, t, DET_TOL)?) };
    let asym = asymptotic_bounds_at(p, t);
    let rho_bt = spectral_radius_power(&build_b_t(p, t)?, POWER_TOL, POWER_MAX_ITER)?.radius;
    Ok(ReportRow {
        t,
        rho_power,
        rho_detsearch,
        gershgorin: gershgorin_bound(p, t),
        asym_lower: asym.lower,
        asym_upper: asym.upper,
        rho_bt,
        bt_upper: bounds_bt(p, t).ok().map(|b| b.upper),
    })
}

/// Evaluates every row of the report; rows are computed in parallel on the
/// current rayon pool and kept in the order of `horizons`.
pub fn contraction_report(p: &LipschitzProfile, horizons: &[usize]) -> Result<ContractionReport> {
    if horizons.is_empty() {
        return Err(MfgError::input("empty horizon list"));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) || horizons[0] < 1 {
        return Err(MfgError::input("horizons must be ascending and >= 1"));
    }
    let rows = horizons.par_iter().map(|&t| row(p, t)).collect::<Result<Vec<_>>>()?;

    for w in rows.windows(2) {
        if w[1].rho_power < w[0].rho_power - 1e-10 {
            return Err(MfgError::Condition(format!(
                "rho(A_T) decreases from {} at T = {} to {} at T = {}",
                w[0].rho_power, w[0].t, w[1].rho_power, w[1].t
            )));
        }
    }
    if let Some(r) = rows.iter().find(|r| r.rho_power > r.gershgorin + 1e-9) {
        return Err(MfgError::Condition(format!(
            "rho(A_T) = {} exceeds the row-sum bound {} at T = {}",
            r.rho_power, r.gershgorin, r.t
        )));
    }

    let qwe = check_prop_qwe(p);
    let radius = infinite_radius(p);
    Ok(ContractionReport {
        profile: p.clone(),
        rows,
        infinite_radius: radius,
        contractive_infinite: radius < 1.0,
        limit_bound_at: limit_bound_at(p),
        assumption4_epsilon: check_assumption4(p),
        prop_qwe_lhs_holds: qwe.lhs_holds,
        prop_qwe_rhs_holds: qwe.rhs_holds,
    })
}

impl ContractionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.t.to_string(),
                csv_float(r.rho_power),
                csv_opt(r.rho_detsearch),
                csv_float(r.gershgorin),
                csv_opt(r.asym_lower),
                csv_opt(r.asym_upper),
                csv_float(r.rho_bt),
                csv_opt(r.bt_upper),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "T": r.t,
                    "rho_power": r.rho_power,
                    "rho_detsearch": r.rho_detsearch,
                    "gershgorin": r.gershgorin,
                    "asym_lower": r.asym_lower,
                    "asym_upper": r.asym_upper,
                    "rho_BT": r.rho_bt,
                    "bt_upper": r.bt_upper,
                })
            })
            .collect();
        json!({
            "profile": self.profile.to_json_value(),
            "rows": rows,
            "infinite_radius": self.infinite_radius,
            "contractive_infinite": self.contractive_infinite,
            "limit_bound_AT": self.limit_bound_at,
            "assumption4_epsilon": self.assumption4_epsilon,
            "prop_qwe_lhs_holds": self.prop_qwe_lhs_holds,
            "prop_qwe_rhs_holds": self.prop_qwe_rhs_holds,
        })
    }
}
