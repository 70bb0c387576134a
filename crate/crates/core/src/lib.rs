//! Thin viscous film flow between two nearby moving surfaces, reduced to the
//! mean surface: differential geometry of the bounding chart, asymptotic
//! change-of-variable coefficients, and two solvers — a generalized Reynolds
//! (lubrication) equation for pressure-driven films and a curved-surface
//! shallow-water system for traction-driven films.
//!
//! The crate is `no_std` (with `alloc`); IO, configuration and the command
//! line live in the companion `thinfilm` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chart;
pub mod coeffs;
pub mod error;
pub mod gap;
pub mod geometry;
pub mod grid;
pub mod math;
pub mod reynolds;
pub mod shallow;
pub mod sparse;

pub use chart::{
    ChartDomain, ChartJet, Cylinder, FdChart, Paraboloid, Plane, PointChart, Sphere, SurfaceChart,
    TranslatingPlane,
};
pub use error::{Error, Result};
pub use gap::{GapJet, GapTables};
pub use geometry::{GeometrySample, GeometryTables};
pub use grid::{Axis, BoundaryKind, Field, FieldTag, Grid};
pub use math::Vec3;
