use ndarray::Array2;

use crate::error::{MfgError, Result};
use crate::model::LipschitzProfile;

fn check_horizon(t: usize) -> Result<()> {
    if t < 1 {
        return Err(MfgError::input("horizon T must be >= 1"));
    }
    Ok(())
}

/// The `T×T` matrix bounding one step of the measure-flow operator.
///
/// With `c = barL·K1/ρ`, `d = L1·K1/ρ` (1-based indices):
///
/// ```text
/// A[1][j] = c·β^j            1 ≤ j ≤ T−1
/// A[i][i−1] = hatK           i ≥ 2
/// A[i][j] = c·β^(j−i+1)      i ≥ 2, i ≤ j ≤ T−1
/// A[i][T] = d·β^(T−i+1)
/// ```
pub fn build_a_t(p: &LipschitzProfile, t: usize) -> Result<Array2<f64>> {
    check_horizon(t)?;
    let c = p.barl_k1_over_rho();
    let d = p.l1k1_over_rho();
    let beta = p.beta;
    let mut a = Array2::zeros((t, t));
    for i in 1..=t {
        if i >= 2 {
            a[[i - 1, i - 2]] = p.hat_k;
        }
        let shift = if i == 1 { 0 } else { i - 1 };
        for j in i..t {
            a[[i - 1, j - 1]] = c * beta.powi((j - shift) as i32);
        }
        a[[i - 1, t - 1]] = d * beta.powi((t - shift) as i32);
    }
    Ok(a)
}

/// The `(T+1)×(T+1)` matrix bounding one step of the Q-flow iteration:
/// `β` on the superdiagonal and `barL·barK^(i−1−j)·K1/ρ` below the diagonal.
pub fn build_b_t(p: &LipschitzProfile, t: usize) -> Result<Array2<f64>> {
    check_horizon(t)?;
    let c = p.barl_k1_over_rho();
    let mut b = Array2::zeros((t + 1, t + 1));
    for i in 0..=t {
        if i < t {
            b[[i, i + 1]] = p.beta;
        }
        for j in 0..i {
            b[[i, j]] = c * p.bar_k.powi((i - 1 - j) as i32);
        }
    }
    Ok(b)
}

/// Tridiagonal `T(k)`: diagonal `−barK·β` (last entry `−barK·β + r`),
/// superdiagonal `k·β`, subdiagonal `hatK`.
pub fn companion_tridiagonal(p: &LipschitzProfile, t: usize, k: f64) -> Result<Array2<f64>> {
    check_horizon(t)?;
    let mut m = Array2::zeros((t, t));
    for i in 0..t {
        m[[i, i]] = -p.bar_k * p.beta;
        if i + 1 < t {
            m[[i, i + 1]] = k * p.beta;
            m[[i + 1, i]] = p.hat_k;
        }
    }
    m[[t - 1, t - 1]] += p.r_const;
    Ok(m)
}

pub fn max_row_sum(m: &Array2<f64>) -> f64 {
    m.rows().into_iter().map(|r| r.sum()).fold(0.0, f64::max)
}
