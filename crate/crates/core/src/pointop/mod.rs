//! The fixed-center non-local point-interaction Hamiltonian: boundary
//! matrix, charge solve, Krein-type resolvent and boundary-condition probe.

mod boundary;
mod config;
mod resolvent;
mod source;

pub(crate) use boundary::boundary_matrix_sqrt;
pub(crate) use resolvent::yukawa_spherical_mean;
pub use boundary::{boundary_matrix, solve_charges, BoundaryMatrix, CONDITION_CAP};
pub use config::CenterConfig;
pub use resolvent::{
    boundary_probe, default_probe_radii, free_resolvent_apply, resolvent_apply, resolvent_identity_samples,
    BoundaryFit, IdentitySample, ResolventOutput,
};
pub use source::{FnSource, GaussianSource, Source, ZeroSource};
