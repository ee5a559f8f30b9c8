//! Curve representations and their measures.
//!
//! A convex curve is either a sampled support function ([`SupportCurve`]) or
//! an exact chain of circular arcs ([`ArcPolygon`]). Both are measured
//! through the support function: length `∫ sin(k1 h) dθ / k1` and area
//! `(2π − ∫ √(1+g²+g'²)/(1+g²) dθ) / k1²` with `g = tan(k1 h)`.

mod arcs;
pub(crate) mod piecewise;
pub(crate) mod stencil;
mod support;
mod vertex;

use serde::{Deserialize, Serialize};

pub use arcs::{Arc, ArcPolygon};
pub use support::{curvature_radius, SupportCurve};
pub use vertex::{jump_angle, Vertex};


use crate::error::{domain, Result};
use crate::sphere::Metric;

/// Length, area and curvature range of a curve.
///
/// Radii are `1/κ`; a vertex has radius `0` and a geodesic segment has
/// curvature `0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub length: f64,
    pub area: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub min_curvature: f64,
    pub max_curvature: f64,
}

impl MeasureReport {
    pub(crate) fn from_radii(length: f64, area: f64, radii: &[f64]) -> Self {
        let min_radius = radii.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
        let max_radius = radii.iter().copied().fold(0.0, f64::max);
        // radius below this is a vertex sample and carries no curvature
        let floor = 1e-9 * max_radius.max(1e-300);
        let curv: Vec<f64> = radii.iter().filter(|r| **r > floor).map(|r| 1.0 / r).collect();
        let (min_curvature, max_curvature) = if curv.is_empty() {
            (f64::INFINITY, f64::INFINITY)
        } else {
            (
                curv.iter().copied().fold(f64::INFINITY, f64::min),
                curv.iter().copied().fold(0.0, f64::max),
            )
        };
        Self { length, area, min_radius, max_radius, min_curvature, max_curvature }
    }
}

/// Sampled support function of an arc polygon (`n ≥ 256`).
pub fn support_from_arcs(poly: &ArcPolygon, n: usize) -> Result<SupportCurve> {
    if n < 256 {
        return domain(format!("need at least 256 samples, got {n}"));
    }
    poly.support(n)
}

/// Either representation of a convex curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Support(SupportCurve),
    Arcs(ArcPolygon),
}

impl Curve {
    pub fn metric(&self) -> Metric {
        match self {
            Curve::Support(c) => c.metric(),
            Curve::Arcs(p) => p.metric(),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Curve::Support(c) => c.lambda(),
            Curve::Arcs(p) => p.lambda(),
        }
    }

    pub fn measure(&self) -> Result<MeasureReport> {
        match self {
            Curve::Support(c) => c.measure(),
            Curve::Arcs(p) => p.measure(),
        }
    }

    pub fn is_lambda_convex(&self, tol: f64) -> bool {
        match self {
            Curve::Support(c) => c.is_lambda_convex(tol),
            Curve::Arcs(p) => p.is_lambda_convex(tol),
        }
    }

    /// Support samples; arc polygons are sampled exactly.
    pub fn to_support(&self, n: usize) -> Result<SupportCurve> {
        match self {
            Curve::Support(c) => Ok(c.clone()),
            Curve::Arcs(p) => p.support(n),
        }
    }
}

impl From<SupportCurve> for Curve {
    fn from(c: SupportCurve) -> Self {
        Curve::Support(c)
    }
}

impl From<ArcPolygon> for Curve {
    fn from(p: ArcPolygon) -> Self {
        Curve::Arcs(p)
    }
}
