use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ProbVector;
use crate::error::{MfgError, Result};

/// Finite regularized mean-field game.
///
/// Cost and transition depend on the population measure `μ` through
///
/// ```text
/// c(x,a,μ)   = c0[x][a] + Σ_z wc[x][a][z]·μ(z)
/// p(·|x,a,μ) = (1−η)·p0[x][a] + η·Σ_z μ(z)·p1[x][a][z]
/// ```
///
/// The regularizer is `τ·Σ u·log u`, which is `τ`-strongly convex in ℓ1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc")]
pub struct MfgInstance {
    pub n_states: usize,
    pub n_actions: usize,
    pub beta: f64,
    pub tau: f64,
    pub eta_p: f64,
    pub c0: Vec<Vec<f64>>,
    pub wc: Vec<Vec<Vec<f64>>>,
    pub p0: Vec<Vec<ProbVector>>,
    pub p1: Vec<Vec<Vec<ProbVector>>>,
    pub mu0: ProbVector,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n_states: usize,
    n_actions: usize,
    beta: f64,
    tau: f64,
    eta_p: f64,
    c0: Vec<Vec<f64>>,
    wc: Vec<Vec<Vec<f64>>>,
    p0: Vec<Vec<Vec<f64>>>,
    p1: Vec<Vec<Vec<Vec<f64>>>>,
    mu0: Vec<f64>,
}

fn prob(path: &str, w: Vec<f64>, n: usize) -> Result<ProbVector> {
    if w.len() != n {
        return Err(MfgError::input(format!("{path}: length {} but n_states = {n}", w.len())));
    }
    ProbVector::new(w).map_err(|e| MfgError::input(format!("{path}: {e}")))
}

fn check_len<T>(path: &str, v: &[T], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(MfgError::input(format!("{path}: length {} but expected {n}", v.len())));
    }
    Ok(())
}

impl TryFrom<InstanceDoc> for MfgInstance {
    type Error = MfgError;

    fn try_from(d: InstanceDoc) -> Result<Self> {
        let (n, m) = (d.n_states, d.n_actions);
        check_len("c0", &d.c0, n)?;
        check_len("wc", &d.wc, n)?;
        check_len("p0", &d.p0, n)?;
        check_len("p1", &d.p1, n)?;
        for x in 0..n {
            check_len(&format!("c0[{x}]"), &d.c0[x], m)?;
            check_len(&format!("wc[{x}]"), &d.wc[x], m)?;
            check_len(&format!("p0[{x}]"), &d.p0[x], m)?;
            check_len(&format!("p1[{x}]"), &d.p1[x], m)?;
            for a in 0..m {
                check_len(&format!("wc[{x}][{a}]"), &d.wc[x][a], n)?;
                check_len(&format!("p1[{x}][{a}]"), &d.p1[x][a], n)?;
            }
        }
        let mut p0 = Vec::with_capacity(n);
        for (x, rows) in d.p0.into_iter().enumerate() {
            let mut out = Vec::with_capacity(m);
            for (a, w) in rows.into_iter().enumerate() {
                out.push(prob(&format!("p0[{x}][{a}]"), w, n)?);
            }
            p0.push(out);
        }
        let mut p1 = Vec::with_capacity(n);
        for (x, per_a) in d.p1.into_iter().enumerate() {
            let mut out_a = Vec::with_capacity(m);
            for (a, per_z) in per_a.into_iter().enumerate() {
                let mut out_z = Vec::with_capacity(n);
                for (z, w) in per_z.into_iter().enumerate() {
                    out_z.push(prob(&format!("p1[{x}][{a}][{z}]"), w, n)?);
                }
                out_a.push(out_z);
            }
            p1.push(out_a);
        }
        let mu0 = prob("mu0", d.mu0, n)?;
        MfgInstance::new(n, m, d.beta, d.tau, d.eta_p, d.c0, d.wc, p0, p1, mu0)
    }
}

impl MfgInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_states: usize,
        n_actions: usize,
        beta: f64,
        tau: f64,
        eta_p: f64,
        c0: Vec<Vec<f64>>,
        wc: Vec<Vec<Vec<f64>>>,
        p0: Vec<Vec<ProbVector>>,
        p1: Vec<Vec<Vec<ProbVector>>>,
        mu0: ProbVector,
    ) -> Result<Self> {
        let inst = MfgInstance { n_states, n_actions, beta, tau, eta_p, c0, wc, p0, p1, mu0 };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.n_states, self.n_actions);
        if n == 0 || m == 0 {
            return Err(MfgError::input("n_states and n_actions must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(MfgError::input(format!("beta = {} outside [0, 1)", self.beta)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(MfgError::input(format!("tau = {} must be positive", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.eta_p) {
            return Err(MfgError::input(format!("eta_p = {} outside [0, 1]", self.eta_p)));
        }
        let shape_err = |what: &str| MfgError::input(format!("{what} has the wrong shape for n = {n}, m = {m}"));
        if self.c0.len() != n || self.c0.iter().any(|r| r.len() != m) {
            return Err(shape_err("c0"));
        }
        if self.wc.len() != n || self.wc.iter().any(|r| r.len() != m || r.iter().any(|z| z.len() != n)) {
            return Err(shape_err("wc"));
        }
        if self.p0.len() != n || self.p0.iter().any(|r| r.len() != m || r.iter().any(|p| p.len() != n)) {
            return Err(shape_err("p0"));
        }
        if self.p1.len() != n
            || self.p1.iter().any(|r| r.len() != m || r.iter().any(|z| z.len() != n || z.iter().any(|p| p.len() != n)))
        {
            return Err(shape_err("p1"));
        }
        if self.mu0.len() != n {
            return Err(shape_err("mu0"));
        }
        let finite = self.c0.iter().flatten().chain(self.wc.iter().flatten().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(MfgError::input("cost tables contain non-finite entries"));
        }
        Ok(())
    }

    fn check_index(&self, x: usize, a: usize, mu_len: usize) -> Result<()> {
        if x >= self.n_states || a >= self.n_actions {
            return Err(MfgError::input(format!(
                "index (x = {x}, a = {a}) out of range for {} states, {} actions",
                self.n_states, self.n_actions
            )));
        }
        if mu_len != self.n_states {
            return Err(MfgError::dim(format!("measure of length {mu_len} for {} states", self.n_states)));
        }
        Ok(())
    }

    pub fn eval_cost(&self, x: usize, a: usize, mu: &ProbVector) -> Result<f64> {
        self.check_index(x, a, mu.len())?;
        Ok(self.cost(x, a, mu.as_slice()))
    }

    pub fn eval_transition(&self, x: usize, a: usize, mu: &ProbVector) -> Result<ProbVector> {
        self.check_index(x, a, mu.len())?;
        let mut out = vec![0.0; self.n_states];
        self.transition_into(x, a, mu.as_slice(), &mut out);
        Ok(ProbVector::from_mixture(out))
    }

    /// Unchecked cost evaluation.
    #[inline]
    pub(crate) fn cost(&self, x: usize, a: usize, mu: &[f64]) -> f64 {
        self.c0[x][a] + self.wc[x][a].iter().zip(mu).map(|(w, m)| w * m).sum::<f64>()
    }

    /// Unchecked transition evaluation into `out`.
    pub(crate) fn transition_into(&self, x: usize, a: usize, mu: &[f64], out: &mut [f64]) {
        let base = self.p0[x][a].as_slice();
        let keep = 1.0 - self.eta_p;
        for (o, b) in out.iter_mut().zip(base) {
            *o = keep * b;
        }
        if self.eta_p > 0.0 {
            for (z, &mz) in mu.iter().enumerate() {
                if mz == 0.0 {
                    continue;
                }
                let w = self.eta_p * mz;
                for (o, q) in out.iter_mut().zip(self.p1[x][a][z].as_slice()) {
                    *o += w * q;
                }
            }
        }
    }

    /// Cost bound `M = max_{x,a} |c0[x][a]| + Σ_z |wc[x][a][z]|`.
    pub fn cost_bound(&self) -> f64 {
        let mut m = 0.0f64;
        for x in 0..self.n_states {
            for a in 0..self.n_actions {
                let v = self.c0[x][a].abs() + self.wc[x][a].iter().map(|w| w.abs()).sum::<f64>();
                m = m.max(v);
            }
        }
        m
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| MfgError::input(format!("instance: {e}")))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| MfgError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Copy with the cost table `c0` replaced.
    pub fn with_c0(&self, c0: Vec<Vec<f64>>) -> Result<Self> {
        let mut out = self.clone();
        out.c0 = c0;
        out.validate()?;
        Ok(out)
    }

    /// Copy with the initial measure replaced.
    pub fn with_mu0(&self, mu0: ProbVector) -> Result<Self> {
        let mut out = self.clone();
        out.mu0 = mu0;
        out.validate()?;
        Ok(out)
    }
}
