use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::sphere::Metric;

/// A corner of a convex curve.
///
/// `alpha` and `beta` bound the normal directions of the supporting
/// geodesics through the corner; `phi` is the jump of the tangent there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub u: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
}

/// Tangent jump at a vertex:
/// `φ = arctan(cos u·tan(β−θᵢ)) − arctan(cos u·tan(α−θᵢ))`.
///
/// The arctangent is continued across `θ−θᵢ = ±π/2` through `atan2`, so the
/// result equals `∫_α^β √(1+g²+g'²)/(1+g²) dθ` for the vertex support.
pub fn jump_angle(v: &Vertex, m: &Metric) -> Result<f64> {
    let width = v.beta - v.alpha;
    if !(width >= 0.0 && width < PI) {
        return domain(format!("vertex normal range {width} outside [0, π)"));
    }
    let u = m.length_to_unit(v.u);
    if !(0.0..PI / 2.0).contains(&u) {
        return domain(format!("vertex at distance {} outside the open hemisphere", v.u));
    }
    let cu = u.cos();
    let f = |x: f64| (cu * x.sin()).atan2(x.cos());
    let d = f(v.beta - v.theta) - f(v.alpha - v.theta);
    let phi = d.rem_euclid(TAU);
    // width 0 with rounding can land just below 2π
    Ok(if phi > PI { 0.0 } else { phi })
}
