//! Contraction matrices `A_T`, `B_T`, their spectral radii and the
//! closed-form bounds and conditions built from a [`LipschitzProfile`].
//!
//! [`LipschitzProfile`]: crate::model::LipschitzProfile

mod bounds;
mod matrices;
mod report;
mod spectral;

pub use bounds::{
    asymptotic_bounds_at, bounds_bt, check_assumption4, check_prop_qwe, gershgorin_bound,
    horizon_independent_bound, infinite_radius, is_contractive_infinite, limit_bound_at, AsymptoticBounds,
    BtBounds, PropQwe,
};
pub use matrices::{build_a_t, build_b_t, companion_tridiagonal, max_row_sum};
pub use report::{contraction_report, ContractionReport, ReportRow};
pub use spectral::{det_shifted, spectral_radius_detsearch, spectral_radius_power, PerronResult};

/// Default relative tolerance for [`spectral_radius_power`].
pub const POWER_TOL: f64 = 1e-13;
/// Default iteration budget for [`spectral_radius_power`].
pub const POWER_MAX_ITER: usize = 10_000;
/// Default bisection tolerance for [`spectral_radius_detsearch`].
pub const DET_TOL: f64 = 1e-12;
