//! Charts with explicit symplectic forms and numerical verification of maps
//! between them.

mod chart;
mod map;

pub use chart::{Chart, FormFn, Predicate, R_MIN};
pub use map::{
    default_step, seam_gap, verify_map, verify_piecewise, JacobianFn, PiecewiseMap, PiecewiseReport, PointDefect,
    PointMap, Sampler, Seam, SymplecticMapSpec, VerificationReport, DEFAULT_TOL,
};
