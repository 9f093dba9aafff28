use crate::error::{MfgError, Result};
use crate::model::ProbVector;

fn check(h: &[f64], tau: f64) -> Result<()> {
    if h.is_empty() {
        return Err(MfgError::input("empty action row"));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(MfgError::input("action row contains a non-finite entry"));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(MfgError::input(format!("tau = {tau} must be positive")));
    }
    Ok(())
}

/// Regularized minimum `−τ·log Σ_a exp(−h(a)/τ)`.
///
/// Satisfies `min(h) − τ·log m ≤ soft_min(h) ≤ min(h)`.
pub fn soft_min(h: &[f64], tau: f64) -> Result<f64> {
    check(h, tau)?;
    Ok(soft_min_raw(h, tau))
}

/// Minimizer of `⟨h, u⟩ + τ·Σ u·log u` over the simplex.
pub fn softmax_policy(h: &[f64], tau: f64) -> Result<ProbVector> {
    check(h, tau)?;
    let mut out = vec![0.0; h.len()];
    softmax_raw(h, tau, &mut out);
    Ok(ProbVector::from_mixture(out))
}

#[inline]
fn row_min(h: &[f64]) -> f64 {
    h.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub(crate) fn soft_min_raw(h: &[f64], tau: f64) -> f64 {
    let lo = row_min(h);
    // the minimizing entry contributes exactly 1, so s ∈ [1, m]
    let s: f64 = h.iter().map(|v| (-(v - lo) / tau).exp()).sum();
    lo - tau * s.ln()
}

pub(crate) fn softmax_raw(h: &[f64], tau: f64, out: &mut [f64]) {
    let lo = row_min(h);
    let mut s = 0.0;
    for (o, v) in out.iter_mut().zip(h) {
        *o = (-(v - lo) / tau).exp();
        s += *o;
    }
    for o in out.iter_mut() {
        *o /= s;
    }
}
