//! Entropy-regularized Bellman operators.
//!
//! With `Ω(u) = τ·Σ u·log u` the regularized minimum of `⟨h, u⟩ + Ω(u)` over
//! the simplex is the soft-min `−τ·log Σ exp(−h/τ)` and its unique minimizer
//! is `softmax(−h/τ)`.

mod backward;
mod softmin;
mod stationary;

pub use backward::{backward_induction, BackwardPass, PolicyFlow, QFlow, Table, ValueFlow};
pub use softmin::{soft_min, softmax_policy};
pub use stationary::{value_iteration_stationary, StationaryValue};

pub(crate) use softmin::{soft_min_raw, softmax_raw};
