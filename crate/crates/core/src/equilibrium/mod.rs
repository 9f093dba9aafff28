//! Mean-field equilibrium solvers.
//!
//! The finite-horizon solvers iterate the operator `H` that maps a measure
//! flow to the flow generated by its own softmax best responses; the
//! stationary solver alternates value iteration with a one-step push-forward.

mod finite;
mod solution;
mod stationary;

pub use finite::{
    apply_h, apply_h_with_pass, extend_finite_mfe, forward_from_q, nonstationary_reference, push_forward,
    solve_finite_mfe, solve_finite_mfe_q_iteration, InitKind, SolveOptions,
};
pub use solution::{Horizon, MfeSolution, NormKind};
pub use stationary::solve_stationary_mfe;
