//! Numerical studies: spectrum sweeps, horizon-error decay, convergence to
//! the stationary equilibrium and sensitivity to perturbations. Each study
//! returns a [`StudyResult`] whose flags record the checked inequalities.

pub mod csv;
mod horizon;
mod perturb;
mod pool;
mod spectrum;
mod stationary;
mod study;

pub use horizon::{
    default_t_ref, horizon_envelope, horizon_error_study, in_bound_scope, HorizonStudyOptions, GAP_FLOOR,
    TAIL_ALLOWANCE,
};
pub use perturb::{joint_tv, perturbation_study, PERTURBATION_COLUMNS};
pub use pool::{thread_count, with_pool, THREADS_ENV};
pub use spectrum::{
    spectrum_sweep, CONTAINMENT_ALLOWANCE, DUAL_ALLOWANCE, GERSHGORIN_ALLOWANCE, MONOTONE_ALLOWANCE,
    SPECTRUM_COLUMNS,
};
pub use stationary::{stationary_gap_study, RATE_ALLOWANCE, STATIONARY_COLUMNS};
pub use study::{ls_slope, Flag, Inequality, StudyKind, StudyResult};
