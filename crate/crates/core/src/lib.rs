//! Regularized mean-field games on finite state and action spaces.
//!
//! The crate solves finite-horizon, truncated infinite-horizon and stationary
//! equilibria of entropy-regularized mean-field games, and evaluates the
//! contraction matrices `A_T` / `B_T` that govern the fixed-point iterations.
//!
//! Layout:
//! - [`model`]: instances, probability vectors, Lipschitz profiles, fixtures.
//! - [`dp`]: soft-min Bellman operators and backward induction.
//! - [`equilibrium`]: fixed-point solvers for equilibria.
//! - [`contraction`]: spectral radii, closed-form bounds, condition checks.
//! - [`lab`]: numerical studies that compare solver output with the bounds.
//! - [`cli`]: the `mfglab` command-line front end.

pub mod cli;
pub mod contraction;
pub mod dp;
pub mod equilibrium;
pub mod error;
pub mod lab;
pub mod model;

pub use error::{MfgError, Result};
