//! Curves of bounded geodesic curvature on the round sphere.
//!
//! The crate measures λ-convex curves through their support functions,
//! builds the extremal shapes (lunes and racetracks), maps curves to their
//! polar duals and checks the sharp area/length inequalities satisfied by
//! these classes. It also carries the optimal-control formulation of the
//! area minimization problem and a discrete polygon optimizer.
//!
//! Internally every computation runs on the unit sphere (`k1 = 1`); public
//! values are in the caller's units and are rescaled through [`Metric`].

pub mod control;
pub mod curve;
pub mod duality;
mod error;
pub mod extremal;
pub mod io;
pub mod optimizer;
pub mod par;
pub mod quadrature;
pub mod sphere;

pub use curve::{ArcPolygon, Curve, MeasureReport, SupportCurve, Vertex};
pub use error::{Error, Result};
pub use sphere::{Metric, SpherePoint};

/// Absolute tolerance on the curvature radius used by λ-convexity checks.
pub const LAMBDA_CONVEX_TOL: f64 = 1e-8;

/// Default number of support samples.
pub const DEFAULT_SAMPLES: usize = 4096;
