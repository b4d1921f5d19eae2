//! Excitable-medium simulation of a foraging plasmodium together with the
//! exact planar geometry it is measured against.
//!
//! The crate is split along the pipeline:
//!
//! * [`geometry`] builds convex hulls, alpha shapes and concave hulls of a
//!   point set, with brute-force oracles and polygon comparison metrics.
//! * [`field`] turns a point set into the excitability landscape `phi` and the
//!   repellent obstacle mask on a uniform grid.
//! * [`sim`] integrates the two-variable Oregonator and records the trail.
//! * [`shape`] turns the trail into a tube network and a hull polygon.
//! * [`io`] and [`scenario`] hold the file formats and the end-to-end runner
//!   used by the command-line harness; [`generate`] makes seeded test sets.

pub mod field;
pub mod generate;
pub mod geometry;
pub mod io;
pub mod scenario;
pub mod shape;
pub mod sim;

pub use field::{FieldConfig, FieldError, GradientProfile, Grid, ObstacleMask, ScalarField};
pub use generate::{generate, GenError, GenShape};
pub use geometry::{AlphaShape, GeometryError, HullMetrics, Point, PointSet, Polygon};
pub use scenario::{RunManifest, Scenario, ScenarioError};
pub use shape::{BinaryImage, ShapeError, TubeNetwork};
pub use sim::{HaltReason, HaltReport, SimConfig, SimError, SimResult, SimState};
