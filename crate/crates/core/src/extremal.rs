//! Extremal curves and the sharp area/length bounds.
//!
//! Among λ-convex curves of a given length the lune (two arcs of curvature
//! λ) bounds the least area; among curves with curvature in `[0, λ]` and a
//! given area the racetrack (hull of two circles of curvature λ) is the
//! longest. The two statements are exchanged by polarity.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curve::{piecewise::Loop, piecewise::Piece, ArcPolygon, Arc, Curve, MeasureReport};
use crate::error::{domain, Error, Result};
use crate::par::{map_slice, Exec};
use crate::sphere::{polar_vec, Metric, SpherePoint, Vec3};
use crate::LAMBDA_CONVEX_TOL;

/// A lune of curvature `lambda` and total length `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuneSpec {
    pub metric: Metric,
    pub lambda: f64,
    pub length: f64,
}

/// Length of the full circle of curvature `lambda`, `2π/√(λ²+k1²)`; the
/// longest (degenerate) lune.
pub fn lune_max_length(lambda: f64, m: &Metric) -> f64 {
    TAU / lambda.hypot(m.k1())
}

/// Relative slack accepted at the top of the length range.
const ENDPOINT_SLACK: f64 = 1e-12;

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    Ok(())
}

impl LuneSpec {
    pub fn new(metric: Metric, lambda: f64, length: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let lmax = lune_max_length(lambda, &metric);
        if !(length > 0.0 && length <= lmax * (1.0 + ENDPOINT_SLACK)) {
            return domain(format!("lune length {length} outside (0, {lmax}]"));
        }
        Ok(Self { metric, lambda, length: length.min(lmax) })
    }
}

/// Lune area on the unit sphere.
///
/// With `c = λ/√(λ²+1)`, `ε = 1 − c` and `Y = √(λ²+1)·L/4` the area
/// `4 arctan(c tan Y) − λL` is rewritten as
/// `4[εY − arctan(ε sinY cosY / (cos²Y + c sin²Y))]`, which stays accurate
/// when `λ` is large (the planar limit) and at `Y = π/2`.
fn lune_area_unit(lambda: f64, length: f64) -> f64 {
    let s = lambda.hypot(1.0);
    let c = lambda / s;
    let eps = 1.0 / (s * (s + lambda));
    let y = (s * length / 4.0).min(FRAC_PI_2);
    let (sy, cy) = y.sin_cos();
    4.0 * (eps * y - (eps * sy * cy / (cy * cy + c * sy * sy)).atan())
}

/// Least area enclosed by a λ-convex curve of length `length`:
/// `(4/k1²) arctan(λ/√(λ²+k1²) tan(√(λ²+k1²) L/4)) − λL/k1²`.
pub fn lune_area(length: f64, lambda: f64, m: &Metric) -> Result<f64> {
    let spec = LuneSpec::new(*m, lambda, length)?;
    let a = lune_area_unit(m.curvature_to_unit(lambda), m.length_to_unit(spec.length));
    Ok(m.area_from_unit(a))
}

/// The lune with both vertices on the `y` axis and central symmetry about
/// the origin.
pub fn make_lune(spec: &LuneSpec) -> Result<ArcPolygon> {
    let spec = LuneSpec::new(spec.metric, spec.lambda, spec.length)?;
    let m = spec.metric;
    let lam = m.curvature_to_unit(spec.lambda);
    let r = 1.0f64.atan2(lam);
    // each arc has half-angle ψ at its center and length 2ψ sin r
    let psi = (m.length_to_unit(spec.length) / (4.0 * r.sin())).min(FRAC_PI_2);
    let d = (r.tan() * psi.cos()).atan();
    let arcs = [PI, 0.0]
        .iter()
        .map(|&az| Arc {
            center: SpherePoint { t: m.length_from_unit(d), theta: az },
            start: PI - psi,
            extent: 2.0 * psi,
            kappa: spec.lambda,
        })
        .collect();
    ArcPolygon::new(m, spec.lambda, arcs)
}

/// `A(γ) − Ã(L(γ))`, nonnegative for every λ-convex curve.
pub fn lower_bound_deficit(curve: &Curve) -> Result<f64> {
    if !curve.is_lambda_convex(LAMBDA_CONVEX_TOL) {
        return Err(Error::Convexity(format!(
            "curve is not {}-convex",
            curve.lambda()
        )));
    }
    let rep = curve.measure()?;
    deficit_from_report(&rep, curve.lambda(), &curve.metric())
}

/// Lower-bound deficit from already measured length and area.
pub fn deficit_from_report(rep: &MeasureReport, lambda: f64, m: &Metric) -> Result<f64> {
    let lmax = lune_max_length(lambda, m);
    // measured lengths of full circles may overshoot by rounding
    let l = if rep.length > lmax && rep.length <= lmax * (1.0 + 1e-9) { lmax } else { rep.length };
    Ok(rep.area - lune_area(l, lambda, m)?)
}

/// Planar bound `A ≥ L/(2λ) − sin(λL/2)/λ²`.
pub fn euclid_lower_bound(length: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(length > 0.0 && length <= TAU / lambda * (1.0 + ENDPOINT_SLACK)) {
        return domain(format!("length {length} outside (0, 2π/λ]"));
    }
    Ok(length / (2.0 * lambda) - (lambda * length / 2.0).sin() / (lambda * lambda))
}

/// Unit-sphere racetrack pieces: circles of radius `r` centered at
/// distance `delta` on the `x` axis, joined by two geodesic segments.
pub(crate) fn racetrack_loop(r: f64, delta: f64) -> Loop {
    if delta == 0.0 {
        let c = Vec3::z();
        let p = polar_vec(r, -FRAC_PI_2);
        let q = polar_vec(r, FRAC_PI_2);
        return Loop {
            pieces: vec![
                Piece::from_endpoints(c, r, &p, &q, false),
                Piece::from_endpoints(c, r, &q, &p, false),
            ],
        };
    }
    let sin_h = r.sin() / delta.cos();
    let cos_h = (1.0 - sin_h * sin_h).sqrt();
    let c1 = polar_vec(delta, 0.0);
    let c2 = polar_vec(delta, PI);
    let top = Vec3::new(0.0, cos_h, -sin_h);
    let bottom = Vec3::new(0.0, -cos_h, -sin_h);
    // contact point of the circle (c, r) with the tangent geodesic of pole n
    let touch = |c: &Vec3, n: &Vec3| c / r.cos() + n * r.tan();
    let (p1b, p1t) = (touch(&c1, &bottom), touch(&c1, &top));
    let (p2t, p2b) = (touch(&c2, &top), touch(&c2, &bottom));
    Loop {
        pieces: vec![
            Piece::from_endpoints(c1, r, &p1b, &p1t, false),
            Piece::from_endpoints(-top, FRAC_PI_2, &p1t, &p2t, false),
            Piece::from_endpoints(c2, r, &p2t, &p2b, false),
            Piece::from_endpoints(-bottom, FRAC_PI_2, &p2b, &p1b, false),
        ],
    }
}

/// Boundary of the convex hull of two circles of curvature `lambda` whose
/// centers are `separation` apart, symmetric about the origin.
pub fn make_racetrack(lambda: f64, separation: f64, m: &Metric) -> Result<ArcPolygon> {
    check_lambda(lambda)?;
    let r = 1.0f64.atan2(m.curvature_to_unit(lambda));
    let delta = m.length_to_unit(separation) / 2.0;
    if !(delta >= 0.0 && delta + r < FRAC_PI_2) {
        return domain(format!(
            "separation {separation} does not keep the racetrack in an open hemisphere"
        ));
    }
    ArcPolygon::from_loop(*m, lambda, &racetrack_loop(r, delta))
}

/// Right-hand side of the dual bound:
/// `L ≤ 2π/k1 + X/λ − (4/k1) arctan(k1/√(λ²+k1²) tan(X√(λ²+k1²)/(4λ)))`
/// with `X = 2π − k1²A`. Equals `(2π − Ã*(X))/k1` for the lune area
/// `Ã*` of curvature `k1²/λ`.
pub fn upper_bound_rhs(area: f64, lambda: f64, m: &Metric) -> Result<f64> {
    check_lambda(lambda)?;
    let lam_star = 1.0 / m.curvature_to_unit(lambda);
    let x = TAU - m.area_to_unit(area);
    let xmax = TAU / lam_star.hypot(1.0);
    if !(x > 0.0 && x <= xmax * (1.0 + 1e-9)) {
        return domain(format!(
            "area {area} is below the circle of curvature {lambda} or above 2π/k1²"
        ));
    }
    Ok(m.length_from_unit(TAU - lune_area_unit(lam_star, x.min(xmax))))
}

/// `RHS(A(γ)) − L(γ)` for a curve with curvature in `[0, λ]`.
pub fn upper_bound_slack(curve: &Curve) -> Result<f64> {
    let rep = curve.measure()?;
    let lambda = curve.lambda();
    if rep.max_curvature > lambda * (1.0 + 1e-6) + 1e-9 || rep.min_radius == 0.0 {
        return Err(Error::CurvatureRange(format!(
            "curvature reaches {} above the bound {lambda}",
            rep.max_curvature
        )));
    }
    slack_from_report(&rep, lambda, &curve.metric())
}

pub fn slack_from_report(rep: &MeasureReport, lambda: f64, m: &Metric) -> Result<f64> {
    Ok(upper_bound_rhs(rep.area, lambda, m)? - rep.length)
}

/// Planar dual bound `L ≤ λA + π/λ`.
pub fn euclid_upper_bound(area: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(area > 0.0) {
        return domain(format!("area {area} must be positive"));
    }
    Ok(lambda * area + PI / lambda)
}

/// One row of a bound sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Lune length, or racetrack center separation.
    pub parameter: f64,
    pub length: f64,
    pub area: f64,
    /// Lune area bound or length bound at the measured value.
    pub bound: f64,
    /// Planar counterpart of `bound`.
    pub planar_bound: f64,
    /// Lower-bound deficit or upper-bound slack.
    pub gap: f64,
}

/// Which inequality a sweep tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// Measures the extremal curve at every parameter value and compares it
/// with its bound.
pub fn sweep(bound: Bound, lambda: f64, m: &Metric, params: &[f64], exec: Exec) -> Result<Vec<SweepRow>> {
    map_slice(exec, params, |&p| {
        let (poly, _) = match bound {
            Bound::Lower => (make_lune(&LuneSpec::new(*m, lambda, p)?)?, ()),
            Bound::Upper => (make_racetrack(lambda, p, m)?, ()),
        };
        let rep = poly.measure()?;
        let (b, planar, gap) = match bound {
            Bound::Lower => {
                let b = lune_area(rep.length.min(lune_max_length(lambda, m)), lambda, m)?;
                let planar = euclid_lower_bound(rep.length, lambda).unwrap_or(f64::NAN);
                (b, planar, rep.area - b)
            }
            Bound::Upper => {
                let b = upper_bound_rhs(rep.area, lambda, m)?;
                (b, euclid_upper_bound(rep.area, lambda)?, b - rep.length)
            }
        };
        Ok(SweepRow { parameter: p, length: rep.length, area: rep.area, bound: b, planar_bound: planar, gap })
    })
    .into_iter()
    .collect()
}
