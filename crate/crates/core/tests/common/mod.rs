#![allow(dead_code)]

use mfglab::model::{LipschitzProfile, MeasureFlow, MfgInstance, ProbVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fig1a() -> LipschitzProfile {
    LipschitzProfile::from_composite(1.0, 0.08, 0.04, 0.2, 0.9).unwrap()
}

pub fn fig1b() -> LipschitzProfile {
    LipschitzProfile::from_composite(1.0, 0.35, 0.2, 0.3, 0.5).unwrap()
}

/// β = 0.9833, barK = 0.6, K1·barL/ρ = 0.01 (the remaining constants do not
/// enter the quantities that are checked).
pub fn separation_profile() -> LipschitzProfile {
    LipschitzProfile::from_composite(1.0, 0.01, 0.01, 0.6, 0.9833).unwrap()
}

pub fn zero_profile() -> LipschitzProfile {
    LipschitzProfile::from_composite(0.0, 0.0, 0.0, 0.0, 0.9).unwrap()
}

pub fn random_prob(rng: &mut ChaCha8Rng, n: usize) -> ProbVector {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    let mut w: Vec<f64> = w.into_iter().map(|v| v / s).collect();
    // push the rounding error into the largest entry
    let total: f64 = w.iter().sum();
    let i = (0..n).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap();
    w[i] += 1.0 - total;
    ProbVector::new(w).unwrap()
}

/// Flow with the instance's `μ0` followed by `horizon` random measures.
pub fn random_flow(rng: &mut ChaCha8Rng, inst: &MfgInstance, horizon: usize) -> MeasureFlow {
    let mut mu = vec![inst.mu0.clone()];
    for _ in 0..horizon {
        mu.push(random_prob(rng, inst.n_states));
    }
    MeasureFlow::new(mu).unwrap()
}

fn rows(v: &[&[f64]]) -> Vec<ProbVector> {
    v.iter().map(|r| ProbVector::new(r.to_vec()).unwrap()).collect()
}

/// Instance without any dependence on the population: `wc = 0`, `η = 0`.
pub fn decoupled(n: usize, m: usize, rng: &mut ChaCha8Rng) -> MfgInstance {
    let c0 = (0..n).map(|_| (0..m).map(|_| rng.gen::<f64>()).collect()).collect();
    let wc = vec![vec![vec![0.0; n]; m]; n];
    let p0 = (0..n).map(|_| (0..m).map(|_| random_prob(rng, n)).collect()).collect();
    let p1 = vec![vec![vec![ProbVector::uniform(n); n]; m]; n];
    MfgInstance::new(n, m, 0.9, 1.0, 0.0, c0, wc, p0, p1, random_prob(rng, n)).unwrap()
}

/// Two states, action `a` moves to state `a`, and the cost of an action is
/// the mass already at its target. With small `τ` the best response flips
/// the population back and forth.
pub fn congestion(tau: f64) -> MfgInstance {
    let c0 = vec![vec![0.0, 0.0]; 2];
    let wc = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]; 2];
    let p0 = vec![rows(&[&[1.0, 0.0], &[0.0, 1.0]]); 2];
    let p1 = vec![vec![vec![ProbVector::uniform(2); 2]; 2]; 2];
    let mu0 = ProbVector::new(vec![0.9, 0.1]).unwrap();
    MfgInstance::new(2, 2, 0.9, tau, 0.0, c0, wc, p0, p1, mu0).unwrap()
}

/// Small two-state, two-action game with mild coupling.
pub fn tiny_2x2() -> MfgInstance {
    let c0 = vec![vec![0.2, 0.5], vec![0.6, 0.1]];
    let wc = vec![vec![vec![0.3, -0.2], vec![0.1, 0.2]], vec![vec![-0.1, 0.4], vec![0.2, 0.0]]];
    let p0 = vec![rows(&[&[0.7, 0.3], &[0.4, 0.6]]), rows(&[&[0.5, 0.5], &[0.2, 0.8]])];
    let p1 = vec![
        vec![rows(&[&[0.9, 0.1], &[0.1, 0.9]]), rows(&[&[0.6, 0.4], &[0.3, 0.7]])],
        vec![rows(&[&[0.8, 0.2], &[0.5, 0.5]]), rows(&[&[0.4, 0.6], &[0.2, 0.8]])],
    ];
    let mu0 = ProbVector::new(vec![0.6, 0.4]).unwrap();
    MfgInstance::new(2, 2, 0.8, 0.5, 0.3, c0, wc, p0, p1, mu0).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
