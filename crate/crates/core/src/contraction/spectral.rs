use ndarray::{Array1, Array2, Axis};

use super::matrices::{build_a_t, max_row_sum};
use super::bounds::gershgorin_bound;
use crate::error::{MfgError, Result};
use crate::model::LipschitzProfile;

/// Perron root and vectors of a nonnegative matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronResult {
    pub radius: f64,
    /// Right Perron vector, ℓ1-normalized.
    pub right: Vec<f64>,
    /// Left Perron vector, ℓ1-normalized.
    pub left: Vec<f64>,
    /// Set for the zero matrix, where the vectors are uniform placeholders.
    pub degenerate: bool,
    pub iterations: usize,
    /// `‖A·v − radius·v‖∞` for the right vector scaled to unit max-norm.
    pub residual: f64,
}

fn l1_normalize(v: &mut Array1<f64>) {
    let s: f64 = v.iter().map(|x| x.abs()).sum();
    if s > 0.0 {
        *v /= s;
    }
}

/// Rayleigh quotient and `‖A·v − ρ·v‖∞`, with `v` rescaled to unit max-norm
/// so the residual is comparable across dimensions.
fn rayleigh(a: &Array2<f64>, v: &Array1<f64>) -> (f64, f64) {
    let top = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let u = v / top;
    let au = a.dot(&u);
    let rho = au.dot(&u) / u.dot(&u);
    let res = au.iter().zip(u.iter()).map(|(x, y)| (x - rho * y).abs()).fold(0.0, f64::max);
    (rho, res)
}

/// Power iteration on `A + εI`, `ε = 1e-12·max(A)`.
///
/// The iterate `(A + εI)^(2^k)·1` is formed by repeated squaring, so `k`
/// steps cost `k` matrix products but advance the power method by `2^k`
/// steps. This matters for `A_T` at large `T`, whose subdominant eigenvalues
/// sit within a fraction of a percent of the Perron root. The left vector is
/// read from the same powers (column sums). Once squaring stalls the loop
/// falls back to ordinary power steps. `max_iter` bounds the total number of
/// squarings and power steps.
pub fn spectral_radius_power(mat: &Array2<f64>, tol: f64, max_iter: usize) -> Result<PerronResult> {
    let (n, m) = mat.dim();
    if n != m || n == 0 {
        return Err(MfgError::dim(format!("spectral radius of a {n}x{m} matrix")));
    }
    if mat.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(MfgError::input("spectral_radius_power needs a finite nonnegative matrix"));
    }
    let scale = mat.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        let u = vec![1.0 / n as f64; n];
        return Ok(PerronResult { radius: 0.0, right: u.clone(), left: u, degenerate: true, iterations: 0, residual: 0.0 });
    }
    let a = mat / scale;
    let at = a.t().to_owned();
    let mut s = a.clone();
    for i in 0..n {
        s[[i, i]] += 1e-12;
    }
    let shifted = s.clone();

    // converged when both vectors satisfy the residual test in original units
    let accept = |rho: f64, res: f64| res * scale <= tol * rho * scale + 1e-12;

    let mut right = Array1::zeros(n);
    let mut left = Array1::zeros(n);
    let mut last = (f64::NAN, f64::INFINITY);
    let mut iterations = 0;
    let mut squaring = true;
    while iterations < max_iter {
        iterations += 1;
        if squaring {
            right = s.sum_axis(Axis(1));
            left = s.sum_axis(Axis(0));
        } else {
            right = shifted.dot(&right);
            left = shifted.t().dot(&left);
        }
        l1_normalize(&mut right);
        l1_normalize(&mut left);
        let (rho, res) = rayleigh(&a, &right);
        let (rho_l, res_l) = rayleigh(&at, &left);
        // the residual alone is not enough: with a small spectral gap a tiny
        // residual still allows an eigenvector error of residual/gap
        // the absolute floor lets nilpotent inputs settle at rho ~ 0
        let settled = (rho - last.0).abs() <= tol * rho + 1e-15;
        if settled && accept(rho, res) && accept(rho_l, res_l) {
            return Ok(PerronResult {
                radius: rho * scale,
                right: right.to_vec(),
                left: left.to_vec(),
                degenerate: false,
                iterations,
                residual: res * scale,
            });
        }
        if squaring {
            let next = s.dot(&s);
            let top = next.iter().cloned().fold(0.0, f64::max);
            if !(top.is_finite() && top > 0.0) || iterations >= 64 {
                squaring = false;
            } else {
                s = next / top;
            }
        }
        last = (rho, res);
    }
    Err(MfgError::NonConvergence {
        iterations,
        residual: last.1 * scale,
        history: vec![],
        detail: " in power iteration".into(),
    })
}

/// `det(T(k) − k·I)` by the three-term recurrence
/// `D_i = (d_i − k)·D_{i−1} − k·β·hatK·D_{i−2}`, rescaled to avoid overflow.
/// Only the sign and zero set are meaningful.
pub fn det_shifted(p: &LipschitzProfile, t: usize, k: f64) -> f64 {
    let off = k * p.beta * p.hat_k;
    let diag = |i: usize| if i == t { -p.bar_k * p.beta + p.r_const } else { -p.bar_k * p.beta };
    let mut prev = 1.0f64;
    let mut cur = diag(1) - k;
    for i in 2..=t {
        let next = (diag(i) - k) * cur - off * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs();
        if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
            prev /= mag;
            cur /= mag;
        }
    }
    cur
}

/// Number of eigenvalues of `T(k)` strictly below `k`.
///
/// For `k > 0` the off-diagonal products `k·β·hatK` are positive, so `T(k)`
/// is similar to a symmetric tridiagonal matrix and the pivots
/// `q_i = D_i/D_{i−1}` of the determinant recurrence form a Sturm sequence.
fn count_below(p: &LipschitzProfile, t: usize, k: f64) -> usize {
    let off = k * p.beta * p.hat_k;
    let base = -p.bar_k * p.beta;
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 1..=t {
        let d = if i == t { base + p.r_const } else { base };
        q = if i == 1 { d - k } else { (d - k) - off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + k.abs() + off.sqrt()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest root of `k ↦ det(T(k) − k·I)`, which equals `ρ(A_T)`.
///
/// The scan starts at `max(gershgorin_bound, max row sum of A_T)` and steps
/// down by `bound/(4T)`; bisection then narrows the bracket to `tol`.
/// Brackets are detected with the Sturm count of the recurrence pivots
/// rather than the sign of `D_T` alone: the sign misses pairs of roots that
/// fall inside one scan step, which happens at large `T`.
pub fn spectral_radius_detsearch(p: &LipschitzProfile, t: usize, tol: f64) -> Result<f64> {
    if t < 1 {
        return Err(MfgError::input("horizon T must be >= 1"));
    }
    if p.is_decoupled() {
        return Err(MfgError::Condition("det-search needs a profile with nonzero coupling".into()));
    }
    let bound = gershgorin_bound(p, t).max(max_row_sum(&build_a_t(p, t)?));
    // true iff T(k) has an eigenvalue >= k, i.e. k <= ρ(A_T) near the top root
    let reached = |k: f64| count_below(p, t, k) < t;
    if reached(bound) {
        return Err(MfgError::Search(format!("T(k) has an eigenvalue above the scan start {bound:.6e}")));
    }
    let step = bound / (4.0 * t as f64);
    let mut hi = bound;
    let mut trace = Vec::new();
    for j in 1..=4 * t {
        let lo = (bound - j as f64 * step).max(0.0);
        if trace.len() < 8 {
            trace.push(format!("f({lo:.6e}) = {:.3e}", det_shifted(p, t, lo)));
        }
        if reached(lo) {
            let mut a = lo;
            let mut b = hi;
            while b - a > tol {
                let mid = 0.5 * (a + b);
                if reached(mid) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        hi = lo;
    }
    Err(MfgError::Search(format!("no sign change below {bound:.6e} for T = {t}: {}", trace.join(", "))))
}
