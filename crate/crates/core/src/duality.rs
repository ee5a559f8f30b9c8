//! Polarity on the sphere.
//!
//! The polar curve `γ*` is traced by the outward unit normals of `γ`.
//! It lies in the opposite hemisphere, so it is reflected through the
//! center of the sphere and described in the same chart: the supporting
//! geodesic at distance `h(θ)` becomes the point at distance `π/2 − h(θ)`
//! in direction `θ + π`. Polarity swaps vertices and geodesic segments and
//! turns curvature `κ` into `k1²/κ`.

use std::f64::consts::TAU;

use crate::curve::stencil::Interpolant;
use crate::curve::{ArcPolygon, Curve, MeasureReport, SupportCurve};
use crate::error::{domain, Result};
use crate::par::{map_range, Exec};
use crate::sphere::Metric;

/// Exact polar of an arc polygon. The result carries the bound `k1²/λ`.
pub fn polar_dual_arcs(poly: &ArcPolygon) -> Result<ArcPolygon> {
    let m = poly.metric();
    let lam = m.k1() * m.k1() / poly.lambda();
    ArcPolygon::from_loop(m, lam, &poly.to_loop()?.polar())
}

/// Sampled polar of a support curve, on the default executor.
pub fn polar_dual(curve: &SupportCurve) -> Result<SupportCurve> {
    polar_dual_with(curve, Exec::default())
}

/// Sampled polar of a support curve.
///
/// The polar points project gnomonically to `cot h(θ)·e_{θ+π}`, so the
/// polar support is `g*(φ) = max_θ −cot h(θ) cos(θ − φ)`. The maximum is
/// located on the sample grid and refined by golden-section search on the
/// jump-aware interpolant of `h`.
pub fn polar_dual_with(curve: &SupportCurve, exec: Exec) -> Result<SupportCurve> {
    let m = curve.metric();
    let h: Vec<f64> = curve.h().iter().map(|x| m.length_to_unit(*x)).collect();
    if let Some(x) = h.iter().find(|x| **x <= 0.0 || **x >= std::f64::consts::FRAC_PI_2) {
        return domain(format!(
            "support value {x} puts the origin off the interior of the curve or its polar"
        ));
    }
    let n = h.len();
    let cot: Vec<f64> = h.iter().map(|x| 1.0 / x.tan()).collect();
    let cos_tab: Vec<f64> = (0..n).map(|k| (TAU * k as f64 / n as f64).cos()).collect();
    let interp = Interpolant::new(&h);
    let dx = interp.dx();
    let g_star = map_range(exec, n, |j| {
        let phi = j as f64 * dx;
        let coarse = (0..n)
            .map(|k| (k, -cot[k] * cos_tab[(k + n - j) % n]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let f = |th: f64| -(th - phi).cos() / interp.eval(th).0.tan();
        let k = coarse.0 as f64;
        let (lo, hi) = ((k - 1.0) * dx, (k + 1.0) * dx);
        coarse.1.max(golden_max(f, lo, hi))
    });
    let h_star = g_star
        .into_iter()
        .map(|g| m.length_from_unit(g.max(0.0).atan()))
        .collect();
    SupportCurve::new(m, m.k1() * m.k1() / curve.lambda(), h_star)
}

/// Largest value of `f` on `[a, b]` found by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    fc.max(fd)
}

/// Polar of either representation.
pub fn dual(curve: &Curve) -> Result<Curve> {
    Ok(match curve {
        Curve::Support(c) => Curve::Support(polar_dual(c)?),
        Curve::Arcs(p) => Curve::Arcs(polar_dual_arcs(p)?),
    })
}

/// Curvature of the polar curve from the curvature radii of the original:
/// `κ* = k1²·R` (on the unit sphere simply `κ* = R`).
pub fn dual_curvature(radii: &[f64], m: &Metric) -> Vec<f64> {
    let k2 = m.k1() * m.k1();
    radii.iter().map(|r| k2 * r).collect()
}

/// Predicted length and area of the polar curve:
/// `k1 L* = 2π − k1² A` and `k1² A* = 2π − k1 L`.
pub fn duality_identities(report: &MeasureReport, m: &Metric) -> (f64, f64) {
    let l_star = m.length_from_unit(TAU - m.area_to_unit(report.area));
    let a_star = m.area_from_unit(TAU - m.length_to_unit(report.length));
    (l_star, a_star)
}
