//! Game instances, probability vectors and Lipschitz profiles.

mod flow;
mod generate;
mod instance;
mod profile;
mod simplex;

pub use flow::MeasureFlow;
pub use generate::{make_contractive_instance, make_contractive_instance_with, GeneratorConfig, Target};
pub use instance::MfgInstance;
pub use profile::{compute_lipschitz_profile, BarLVariant, LipschitzProfile, ProfileOrigin};
pub use simplex::{tv, tv_distance, ProbVector, SIMPLEX_TOL};
