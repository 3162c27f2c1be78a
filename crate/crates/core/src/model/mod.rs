//! Potentials, nonlinearities and the hypotheses they are expected to satisfy.

mod conditions;
mod nonlinearity;
mod potential;

pub use conditions::{
    check_f, check_h, check_potential_bounds, check_v1_v2, check_v3, default_radii,
    estimate_theta_v3, estimate_theta_v4, log_space, resolve_theta, tail_radii, theta_min_v4,
    ConditionReport, Lattice, F2_MARGIN, H2_CAP,
};
pub use nonlinearity::{critical_exponent, gauss_legendre, NonlinearityFamily, NonlinearitySpec};
pub use potential::{PotentialFamily, PotentialSpec, Profile};
