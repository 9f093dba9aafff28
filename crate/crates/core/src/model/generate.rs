use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{compute_lipschitz_profile, LipschitzProfile, MfgInstance, ProbVector};
use crate::error::{MfgError, Result};

/// Contraction condition a generated instance must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `√(hatK·β) + √((hatK − barK)·β) < 1`.
    FiniteHorizon,
    /// `barK + K1·barL/(ρ(1−β)) < 1`.
    InfiniteHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub beta: f64,
    pub tau: f64,
    /// Coupling weight `eta_p` before shrinking.
    pub eta_base: f64,
    /// Magnitude of `c0` and `wc` before shrinking.
    pub cost_scale: f64,
    /// Weight of the random part of each `p0` row.
    pub p0_spread: f64,
    /// Weight of the stay-put part `δ_x` of each `p0` row.
    pub sticky: f64,
    /// Factor applied to the coupling scale at every shrink step.
    pub shrink: f64,
    pub max_steps: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            beta: 0.9,
            tau: 1.0,
            eta_base: 0.5,
            cost_scale: 0.1,
            p0_spread: 0.1,
            sticky: 0.2,
            shrink: 0.8,
            max_steps: 200,
        }
    }
}

fn target_holds(p: &LipschitzProfile, target: Target) -> bool {
    match target {
        Target::FiniteHorizon => (p.hat_k * p.beta).sqrt() + ((p.hat_k - p.bar_k) * p.beta).sqrt() < 1.0,
        Target::InfiniteHorizon => p.bar_k + p.k1 * p.bar_l / (p.rho * (1.0 - p.beta)) < 1.0,
    }
}

fn dirichlet_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Random instance whose profile satisfies `target`, with default settings.
pub fn make_contractive_instance(n: usize, m: usize, seed: u64, target: Target) -> Result<MfgInstance> {
    make_contractive_instance_with(n, m, seed, target, &GeneratorConfig::default())
}

/// Random instance whose profile satisfies `target`.
///
/// Raw tables are drawn once from a seeded ChaCha stream. Each `p0[x][a]` row
/// is `sticky·δ_x + p0_spread·raw + rest·common`, which keeps the chain from
/// mixing in a single step. A scale `s`, starting at 1, multiplies `c0`, `wc`
/// (times `cost_scale`) and `eta_p`; `s` shrinks geometrically until the
/// condition holds.
pub fn make_contractive_instance_with(
    n: usize,
    m: usize,
    seed: u64,
    target: Target,
    cfg: &GeneratorConfig,
) -> Result<MfgInstance> {
    if n == 0 || m == 0 {
        return Err(MfgError::input("make_contractive_instance needs n, m >= 1"));
    }
    if !(cfg.p0_spread >= 0.0 && cfg.sticky >= 0.0 && cfg.p0_spread + cfg.sticky <= 1.0) {
        return Err(MfgError::input("generator needs p0_spread, sticky >= 0 with p0_spread + sticky <= 1"));
    }
    if !(cfg.shrink > 0.0 && cfg.shrink < 1.0) {
        return Err(MfgError::input("generator shrink must lie in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0_raw: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen::<f64>()).collect()).collect();
    let wc_raw: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|_| (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect())
        .collect();
    let common = dirichlet_row(&mut rng, n);
    let p0_raw: Vec<Vec<Vec<f64>>> =
        (0..n).map(|_| (0..m).map(|_| dirichlet_row(&mut rng, n)).collect()).collect();
    let p1: Vec<Vec<Vec<ProbVector>>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| (0..n).map(|_| ProbVector::new(dirichlet_row(&mut rng, n))).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mu0 = ProbVector::new(dirichlet_row(&mut rng, n))?;

    let mut s = 1.0f64;
    for _ in 0..=cfg.max_steps {
        let sc = s * cfg.cost_scale;
        let (sp, st) = (cfg.p0_spread, cfg.sticky);
        let c0 = c0_raw.iter().map(|r| r.iter().map(|v| sc * v).collect()).collect();
        let wc = wc_raw.iter().map(|r| r.iter().map(|z| z.iter().map(|v| sc * v).collect()).collect()).collect();
        let p0 = p0_raw
            .iter()
            .enumerate()
            .map(|(x, r)| {
                r.iter()
                    .map(|row| {
                        let mut v: Vec<f64> =
                            row.iter().zip(&common).map(|(q, c)| (1.0 - sp - st) * c + sp * q).collect();
                        v[x] += st;
                        ProbVector::new(v)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let inst = MfgInstance::new(n, m, cfg.beta, cfg.tau, s * cfg.eta_base, c0, wc, p0, p1.clone(), mu0.clone())?;
        if let Ok(p) = compute_lipschitz_profile(&inst) {
            if target_holds(&p, target) {
                return Ok(inst);
            }
        }
        s *= cfg.shrink;
    }
    Err(MfgError::Generation(format!(
        "no contractive instance for n = {n}, m = {m}, seed = {seed} after {} shrink steps",
        cfg.max_steps
    )))
}
