use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{MfgError, Result};
use crate::model::LipschitzProfile;

/// Row-sum bound on `ρ(A_T)`:
/// `max(barK + c·(1−β^(T−1))/(1−β) + d·β^T, c·(1−β^T)/(1−β) + d·β^T)`
/// with `c = barL·K1/ρ`, `d = L1·K1/ρ`.
pub fn gershgorin_bound(p: &LipschitzProfile, t: usize) -> f64 {
    let (b, c, d) = (p.beta, p.barl_k1_over_rho(), p.l1k1_over_rho());
    let bt = b.powi(t as i32);
    let tail = d * bt;
    let first = p.bar_k + c * (1.0 - b.powi(t as i32 - 1)) / (1.0 - b) + tail;
    let second = c * (1.0 - bt) / (1.0 - b) + tail;
    first.max(second)
}

/// `barK + (K1/ρ)·barL/(1−β)`.
pub fn horizon_independent_bound(p: &LipschitzProfile) -> f64 {
    p.bar_k + p.barl_k1_over_rho() / (1.0 - p.beta)
}

/// Lower and upper large-`T` estimates of `ρ(A_T)`; `None` where the
/// defining square root has a nonpositive argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

fn cosine_form(p: &LipschitzProfile, denom: f64) -> Option<f64> {
    let cs = (PI / denom).cos();
    let inner = p.hat_k * cs * cs - p.bar_k;
    if inner > 0.0 {
        let v = (p.hat_k * p.beta).sqrt() * cs + (inner * p.beta).sqrt();
        Some(v * v)
    } else {
        None
    }
}

/// `[√(hatK·β)·cos θ + √((hatK·cos²θ − barK)·β)]²` with `θ = π/(T+1)` for
/// the lower estimate and `θ = π/(2T+1)` for the upper one.
pub fn asymptotic_bounds_at(p: &LipschitzProfile, t: usize) -> AsymptoticBounds {
    AsymptoticBounds {
        lower: cosine_form(p, t as f64 + 1.0),
        upper: cosine_form(p, 2.0 * t as f64 + 1.0),
    }
}

/// `[√(hatK·β) + √((hatK − barK)·β)]²`, the limit of `ρ(A_T)`.
pub fn limit_bound_at(p: &LipschitzProfile) -> f64 {
    let v = (p.hat_k * p.beta).sqrt() + ((p.hat_k - p.bar_k) * p.beta).sqrt();
    v * v
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BtBounds {
    /// `None` when the discriminant is negative.
    pub lower: Option<f64>,
    pub upper: f64,
}

/// Bounds on `ρ(B_T)`, valid for `0 < barK < 1`.
pub fn bounds_bt(p: &LipschitzProfile, t: usize) -> Result<BtBounds> {
    if !(p.bar_k > 0.0 && p.bar_k < 1.0) {
        return Err(MfgError::Condition(format!("B_T bounds need 0 < barK < 1, got barK = {}", p.bar_k)));
    }
    let kb = p.bar_k * p.beta;
    let g = p.beta * p.barl_k1_over_rho();
    let upper = kb + 2.0 * g.sqrt();
    let cs = (PI / (t as f64 + 2.0)).cos();
    let c2 = cs * cs;
    let lin = 4.0 * kb * c2 - 2.0 * kb;
    let disc = lin * lin - 4.0 * (kb * kb - 4.0 * g * c2);
    let lower = (disc >= 0.0).then(|| (2.0 * kb * c2 - kb) + 0.5 * disc.sqrt());
    Ok(BtBounds { lower, upper })
}

/// Spectral radius of the one-sided infinite Toeplitz operator,
/// `barK + barL·K1/(ρ(1−β))`.
pub fn infinite_radius(p: &LipschitzProfile) -> f64 {
    p.bar_k + p.barl_k1_over_rho() / (1.0 - p.beta)
}

pub fn is_contractive_infinite(p: &LipschitzProfile) -> bool {
    infinite_radius(p) < 1.0
}

/// Supremum of the exponents `ε` with
/// `√hatK/(√hatK + √(hatK − barK)) > β^(1−ε)`, or `None` if no `ε ∈ (0,1)`
/// works. Returns `Some(1.0)` when `hatK = barK` or `β = 0`.
pub fn check_assumption4(p: &LipschitzProfile) -> Option<f64> {
    let gap = p.hat_k - p.bar_k;
    if gap <= 0.0 || p.beta == 0.0 {
        return Some(1.0);
    }
    let ratio = p.hat_k.sqrt() / (p.hat_k.sqrt() + gap.sqrt());
    if ratio > p.beta {
        Some(1.0 - ratio.ln() / p.beta.ln())
    } else {
        None
    }
}

/// Both sides of the equivalence
/// `barK·β + 2√((hatK−barK)·β) ≤ 1  ⇔  √(hatK·β) + √((hatK−barK)·β) ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropQwe {
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub lhs_holds: bool,
    pub rhs_holds: bool,
    pub equivalent: bool,
}

pub fn check_prop_qwe(p: &LipschitzProfile) -> PropQwe {
    let g = (p.hat_k - p.bar_k) * p.beta;
    let lhs_value = p.bar_k * p.beta + 2.0 * g.sqrt();
    let rhs_value = (p.hat_k * p.beta).sqrt() + g.sqrt();
    let lhs_holds = lhs_value <= 1.0;
    let rhs_holds = rhs_value <= 1.0;
    PropQwe { lhs_value, rhs_value, lhs_holds, rhs_holds, equivalent: lhs_holds == rhs_holds }
}
