//! Holomorphic functional calculus on dense truncations.
//!
//! Contour integrals `(1/2πi)∮ f(λ)(λI − m)⁻¹ dλ` are evaluated with the
//! trapezoidal rule on circles, which converges geometrically for
//! integrands analytic in an annulus around each circle. Node work runs in
//! parallel; partial sums are combined in ascending node order so results
//! are reproducible bit for bit.

mod contour;
mod exp;
mod log;
mod riesz;
mod sector;

pub use contour::{BranchCut, Circle, Contour, DEFAULT_CLEARANCE, DEFAULT_NODES};
pub use exp::matrix_exp;
pub use log::{dunford_log, fractional_power, principal_log_oracle};
pub use riesz::riesz_projection;
pub use sector::{
    default_angles, default_radii, sectoriality_probe, sectoriality_probe_with_cap, SectorReport,
    SectorSample, DEFAULT_CONSTANT_CAP,
};

pub(crate) use exp::expm;
