//! Capacity workbench for Lagrangian products: convex bodies, Minkowski
//! billiards, explicit symplectic embeddings and certified capacity bounds.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common `f64` and `f32` instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod billiards;
pub mod capacities;
pub mod convex;
pub mod cotangent;
pub mod error;
pub mod io;
pub mod linalg;
pub mod products;
pub mod rearrangements;
pub mod sampling;
pub mod scalar;
pub mod symplectic;

pub use billiards::{BilliardTable, BilliardTrajectory, MinActionResult};
pub use capacities::{capacity_of, capacity_of_with, CapacityInterval, CapacityOptions, Certificate};
pub use convex::{ConvexBody, VolumeMethod};
pub use cotangent::CylinderBundle;
pub use error::{Error, Result};
pub use products::{LagrangianProductDomain, PositionFactor, StandardId};
pub use scalar::Real;
pub use symplectic::{Chart, SymplecticMapSpec, VerificationReport};

/// Crate version, stamped into emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type ConvexBodyF64 = ConvexBody<f64>;
pub type ConvexBodyF32 = ConvexBody<f32>;
pub type DomainF64 = LagrangianProductDomain<f64>;
pub type DomainF32 = LagrangianProductDomain<f32>;
pub type IntervalF64 = CapacityInterval<f64>;
pub type IntervalF32 = CapacityInterval<f32>;
pub type TrajectoryF64 = BilliardTrajectory<f64>;
pub type TrajectoryF32 = BilliardTrajectory<f32>;
