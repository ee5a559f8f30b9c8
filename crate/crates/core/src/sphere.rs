//! Elementary geometry of the round sphere `S²(k1²)`.
//!
//! Points are described in a polar chart `(t, θ)` around a fixed origin,
//! the north pole of the unit sphere after normalization. Internally the
//! unit-sphere embedding in ℝ³ is used for all constructions.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub type Vec3 = Vector3<f64>;

/// Curvature scale of the sphere: Gaussian curvature is `k1²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    k1: f64,
}

impl Metric {
    pub fn new(k1: f64) -> Result<Self> {
        if !(k1.is_finite() && k1 > 0.0) {
            return domain(format!("k1 must be positive and finite, got {k1}"));
        }
        Ok(Self { k1 })
    }

    /// The unit sphere.
    pub fn unit() -> Self {
        Self { k1: 1.0 }
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    /// Largest admissible distance, `π/k1`.
    pub fn max_distance(&self) -> f64 {
        PI / self.k1
    }

    pub fn length_to_unit(&self, l: f64) -> f64 {
        l * self.k1
    }

    pub fn length_from_unit(&self, l: f64) -> f64 {
        l / self.k1
    }

    pub fn area_to_unit(&self, a: f64) -> f64 {
        a * self.k1 * self.k1
    }

    pub fn area_from_unit(&self, a: f64) -> f64 {
        a / (self.k1 * self.k1)
    }

    pub fn curvature_to_unit(&self, kappa: f64) -> f64 {
        kappa / self.k1
    }

    pub fn curvature_from_unit(&self, kappa: f64) -> f64 {
        kappa * self.k1
    }
}

impl Default for Metric {
    fn default() -> Self {
        Self::unit()
    }
}

/// A point in polar coordinates: distance `t` from the origin, azimuth `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub t: f64,
    pub theta: f64,
}

impl SpherePoint {
    pub fn new(t: f64, theta: f64, m: &Metric) -> Result<Self> {
        if !(t.is_finite() && theta.is_finite()) || t < 0.0 || t > m.max_distance() {
            return domain(format!("point ({t}, {theta}) outside [0, π/k1]"));
        }
        Ok(Self { t, theta: theta.rem_euclid(TAU) })
    }

    /// Embedding into the unit sphere.
    pub fn to_unit_vec(&self, m: &Metric) -> Vec3 {
        polar_vec(m.length_to_unit(self.t), self.theta)
    }

    pub fn from_unit_vec(v: &Vec3, m: &Metric) -> Self {
        let (t, theta) = vec_to_polar(v);
        Self { t: m.length_from_unit(t), theta }
    }
}

pub(crate) fn polar_vec(t: f64, theta: f64) -> Vec3 {
    let (st, ct) = t.sin_cos();
    let (sp, cp) = theta.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Polar coordinates `(t, θ)` of a unit vector, with `θ ∈ [0, 2π)`.
pub(crate) fn vec_to_polar(v: &Vec3) -> (f64, f64) {
    let rho = v.x.hypot(v.y);
    let t = rho.atan2(v.z);
    let theta = if rho == 0.0 { 0.0 } else { v.y.atan2(v.x).rem_euclid(TAU) };
    (t, theta)
}

/// Tangent frame at the point `(t, θ)`: `e1` points away from the origin,
/// `e2` along increasing azimuth. `e1 × e2` is the outward normal.
pub(crate) fn polar_frame(t: f64, theta: f64) -> (Vec3, Vec3) {
    let (st, ct) = t.sin_cos();
    let (sp, cp) = theta.sin_cos();
    (Vec3::new(ct * cp, ct * sp, -st), Vec3::new(-sp, cp, 0.0))
}

/// Geodesic distance on the unit sphere.
pub(crate) fn distance(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Geodesic midpoint of two non-antipodal points.
pub(crate) fn midpoint(a: &Vec3, b: &Vec3) -> Vec3 {
    (a + b).normalize()
}

/// Rotation taking `from` to the north pole along the connecting great circle.
pub(crate) fn rotation_to_pole(from: &Vec3) -> Rotation3<f64> {
    let z = Vec3::z();
    let axis = from.cross(&z);
    let n = axis.norm();
    if n < 1e-15 {
        if from.z > 0.0 {
            Rotation3::identity()
        } else {
            Rotation3::from_axis_angle(&Vec3::x_axis(), PI)
        }
    } else {
        Rotation3::from_axis_angle(&Unit::new_unchecked(axis / n), distance(from, &z))
    }
}

/// Orientation-preserving isometry taking the pair `(a0, b0)` onto `(a1, b1)`.
/// The pairs must be at equal distance.
pub(crate) fn pair_isometry(a0: &Vec3, b0: &Vec3, a1: &Vec3, b1: &Vec3) -> Rotation3<f64> {
    let frame = |a: &Vec3, b: &Vec3| {
        let t = (b - a * a.dot(b)).normalize();
        nalgebra::Matrix3::from_columns(&[*a, t, a.cross(&t)])
    };
    let m = frame(a1, b1) * frame(a0, b0).transpose();
    Rotation3::from_matrix_unchecked(m)
}

/// Geodesic curvature, circumference and enclosed area of a circle of
/// geodesic radius `rho`.
pub fn geodesic_circle(rho: f64, m: &Metric) -> Result<(f64, f64, f64)> {
    let r = m.length_to_unit(rho);
    if !(r > 0.0 && r < FRAC_PI_2) {
        return domain(format!("circle radius {rho} outside (0, π/(2 k1))"));
    }
    let kappa = m.curvature_from_unit(1.0 / r.tan());
    let len = m.length_from_unit(TAU * r.sin());
    let area = m.area_from_unit(TAU * (1.0 - r.cos()));
    Ok((kappa, len, area))
}

fn check_side(x: f64, m: &Metric) -> Result<f64> {
    let u = m.length_to_unit(x);
    if !(u > 0.0 && u < PI) {
        return domain(format!("side {x} outside (0, π/k1)"));
    }
    Ok(u)
}

/// Area of the geodesic triangle with sides `a`, `b` and included angle `alpha`.
///
/// Uses `tan(f/2) = sin a sin b sin α / ((1+cos a)(1+cos b) + sin a sin b cos α)`
/// evaluated with `atan2`, which stays continuous when the denominator
/// changes sign.
pub fn triangle_area(a: f64, b: f64, alpha: f64, m: &Metric) -> Result<f64> {
    let (a, b) = (check_side(a, m)?, check_side(b, m)?);
    if !(0.0..=PI).contains(&alpha) {
        return domain(format!("angle {alpha} outside [0, π]"));
    }
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let num = sa * sb * alpha.sin();
    let den = (1.0 + ca) * (1.0 + cb) + sa * sb * alpha.cos();
    Ok(m.area_from_unit(2.0 * num.atan2(den).max(0.0)))
}

/// Unique maximizer over `[0, π]` of [`triangle_area`] for fixed sides:
/// `cos α₀ = −tan(a/2) tan(b/2)`.
pub fn triangle_area_argmax(a: f64, b: f64, m: &Metric) -> Result<f64> {
    let (a, b) = (check_side(a, m)?, check_side(b, m)?);
    let c = (0.5 * a).tan() * (0.5 * b).tan();
    if c > 1.0 + 1e-12 {
        return domain(format!("tan(a/2)·tan(b/2) = {c} > 1, no interior maximizer"));
    }
    Ok((-c).clamp(-1.0, 1.0).acos())
}
