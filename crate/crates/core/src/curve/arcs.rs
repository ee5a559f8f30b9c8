use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use super::piecewise::{Loop, Piece};
use super::{MeasureReport, SupportCurve, Vertex};
use crate::error::{domain, Error, Result};
use crate::sphere::{rotation_to_pole, Metric, SpherePoint, Vec3};

/// A circular arc traversed counterclockwise around `center`.
///
/// `start` and `extent` are angles in the polar frame at the center (first
/// axis pointing away from the origin). `kappa` is the geodesic curvature
/// of the carrying circle; zero means a geodesic segment, whose `center`
/// is then the pole of the great circle on the curve's side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: SpherePoint,
    pub start: f64,
    pub extent: f64,
    pub kappa: f64,
}

/// A closed convex curve made of circular arcs and vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPolygon {
    metric: Metric,
    lambda: f64,
    arcs: Vec<Arc>,
}

const CLOSURE_TOL: f64 = 1e-10;
const JUMP_TOL: f64 = 1e-9;

impl ArcPolygon {
    pub fn new(metric: Metric, lambda: f64, arcs: Vec<Arc>) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        if arcs.is_empty() {
            return domain("an arc polygon needs at least one arc");
        }
        for a in &arcs {
            let ok = [a.center.t, a.center.theta, a.start, a.extent, a.kappa]
                .iter()
                .all(|x| x.is_finite());
            if !ok || a.extent <= 0.0 || a.extent > TAU + 1e-12 || a.kappa < 0.0 {
                return domain(format!("invalid arc {a:?}"));
            }
            SpherePoint::new(a.center.t, a.center.theta, &metric)?;
        }
        let poly = Self { metric, lambda, arcs };
        poly.to_loop()?;
        Ok(poly)
    }

    /// Full circle of curvature `lambda` around `center`.
    pub fn circle(metric: Metric, lambda: f64, center: SpherePoint) -> Result<Self> {
        let arc = Arc { center, start: 0.0, extent: TAU, kappa: lambda };
        Self::new(metric, lambda, vec![arc])
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    fn piece(&self, a: &Arc) -> Piece {
        let k = self.metric.curvature_to_unit(a.kappa);
        let r = 1.0f64.atan2(k);
        let t = self.metric.length_to_unit(a.center.t);
        Piece::in_frame(t, a.center.theta, r, a.start, a.extent)
    }

    /// The loop of arcs with a vertex piece at every corner.
    pub(crate) fn to_loop(&self) -> Result<Loop> {
        let arcs: Vec<Piece> = self.arcs.iter().map(|a| self.piece(a)).collect();
        let n = arcs.len();
        let mut pieces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (a, b) = (&arcs[i], &arcs[(i + 1) % n]);
            pieces.push(a.clone());
            let (p, q) = (a.end_point(), b.start_point());
            if (p - q).norm() > CLOSURE_TOL {
                return Err(Error::Domain(format!(
                    "arc {i} ends {:e} away from the start of the next arc",
                    (p - q).norm()
                )));
            }
            let (n0, n1) = (a.normal(a.end()), b.normal(b.start));
            let jump = n0.cross(&n1).dot(&p).atan2(n0.dot(&n1));
            if jump < -JUMP_TOL {
                return Err(Error::Convexity(format!("negative turning {jump} after arc {i}")));
            }
            if jump > 1e-13 {
                let mut v = Piece::canonical(p, 0.0, 0.0, jump);
                v.start = v.angle_of(&n0);
                pieces.push(v);
            }
        }
        Ok(Loop { pieces })
    }

    /// Rebuilds a polygon from a loop, dropping its vertex pieces.
    pub(crate) fn from_loop(metric: Metric, lambda: f64, lp: &Loop) -> Result<Self> {
        let arcs = lp
            .pieces
            .iter()
            .filter(|p| !p.is_vertex() && p.extent > 0.0)
            .map(|p| {
                let p = p.canonicalized();
                let kappa = if p.is_segment() { 0.0 } else { p.r.cos() / p.r.sin() };
                Arc {
                    center: SpherePoint::from_unit_vec(&p.c, &metric),
                    start: p.start,
                    extent: p.extent,
                    kappa: metric.curvature_from_unit(kappa),
                }
            })
            .collect();
        Self::new(metric, lambda, arcs)
    }

    /// Exact length `Σ sin(r)·extent`.
    pub fn length(&self) -> f64 {
        let l: f64 = self.arcs.iter().map(|a| self.piece(a).length()).sum();
        self.metric.length_from_unit(l)
    }

    /// Exact area from Gauss–Bonnet, `(2π − ∫κ ds − Σφ)/k1²`.
    pub fn area(&self) -> Result<f64> {
        Ok(self.metric.area_from_unit(self.to_loop()?.gauss_bonnet_area()))
    }

    /// Corners, described in the polar chart around the origin.
    pub fn vertices(&self) -> Result<Vec<Vertex>> {
        let lp = self.to_loop()?;
        let chart = lp.chart()?;
        Ok(chart
            .vertex_ranges()
            .into_iter()
            .map(|(k, alpha, beta)| {
                let p = &lp.pieces[k];
                let sp = SpherePoint::from_unit_vec(&p.c, &self.metric);
                Vertex { u: sp.t, theta: sp.theta, alpha, beta, phi: p.extent }
            })
            .collect())
    }

    /// Sampled support function; the origin must lie inside the curve.
    pub fn support(&self, n: usize) -> Result<SupportCurve> {
        let lp = self.to_loop()?;
        let chart = lp.chart()?;
        let h = (0..n)
            .map(|i| {
                let g = chart.eval(TAU * i as f64 / n as f64).g;
                self.metric.length_from_unit(g.atan().max(0.0))
            })
            .collect();
        SupportCurve::new(self.metric, self.lambda, h)
    }

    /// Length, area and curvature range; length and area are integrated
    /// from the support function piece by piece.
    pub fn measure(&self) -> Result<MeasureReport> {
        let lp = self.to_loop()?;
        let chart = lp.chart()?;
        let m = &self.metric;
        let mut report = MeasureReport {
            length: m.length_from_unit(chart.length()),
            area: m.area_from_unit(chart.area()),
            min_radius: f64::INFINITY,
            max_radius: 0.0,
            min_curvature: f64::INFINITY,
            max_curvature: 0.0,
        };
        for p in &lp.pieces {
            if p.is_vertex() {
                report.min_radius = 0.0;
                continue;
            }
            let (radius, kappa) = if p.is_segment() {
                (f64::INFINITY, 0.0)
            } else {
                (p.r.tan(), 1.0 / p.r.tan())
            };
            report.min_radius = report.min_radius.min(m.length_from_unit(radius));
            report.max_radius = report.max_radius.max(m.length_from_unit(radius));
            report.min_curvature = report.min_curvature.min(m.curvature_from_unit(kappa));
            report.max_curvature = report.max_curvature.max(m.curvature_from_unit(kappa));
        }
        Ok(report)
    }

    /// True when every arc has curvature at least `λ` (radius at most `1/λ + tol`).
    pub fn is_lambda_convex(&self, tol: f64) -> bool {
        self.arcs.iter().all(|a| {
            let radius = if a.kappa == 0.0 { f64::INFINITY } else { 1.0 / a.kappa };
            radius <= 1.0 / self.lambda + tol
        })
    }

    /// Turning residual `∫κ ds + Σφ + k1²A − 2π`, computed with the area
    /// taken from the support-function integral.
    pub fn gauss_bonnet_residual(&self) -> Result<f64> {
        let lp = self.to_loop()?;
        let a = lp.chart()?.area();
        let turning: f64 = lp.pieces.iter().map(Piece::turning).sum();
        Ok(turning + a - TAU)
    }

    /// The same curve moved by the rotation that takes `p` to the origin
    /// along a geodesic.
    pub fn moved_to_origin(&self, p: &SpherePoint) -> Result<Self> {
        let rot = rotation_to_pole(&p.to_unit_vec(&self.metric));
        let lp = self.to_loop()?.rotated(&rot);
        Self::from_loop(self.metric, self.lambda, &lp)
    }

    /// A point inside the curve: the normalized boundary centroid.
    pub fn interior_point(&self) -> Result<SpherePoint> {
        let lp = self.to_loop()?;
        let mut acc = Vec3::zeros();
        for p in lp.pieces.iter().filter(|p| !p.is_vertex()) {
            for k in 0..16 {
                let phi = p.start + p.extent * (k as f64 + 0.5) / 16.0;
                acc += p.point(phi) * p.length();
            }
        }
        if acc.norm() < 1e-12 {
            return domain("curve is not contained in an open hemisphere");
        }
        Ok(SpherePoint::from_unit_vec(&acc.normalize(), &self.metric))
    }

    /// The curve moved so that an interior point sits at the origin.
    pub fn recentered(&self) -> Result<Self> {
        self.moved_to_origin(&self.interior_point()?)
    }

    /// Largest curvature radius over the arcs, `∞` for a segment.
    pub fn max_arc_radius(&self) -> f64 {
        self.arcs
            .iter()
            .map(|a| {
                let r = 1.0f64.atan2(self.metric.curvature_to_unit(a.kappa));
                if r >= FRAC_PI_2 {
                    f64::INFINITY
                } else {
                    self.metric.length_from_unit(r.tan())
                }
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::jump_angle;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn origin() -> SpherePoint {
        SpherePoint { t: 0.0, theta: 0.0 }
    }

    /// Square-like polygon: four unit-curvature arcs through four vertices
    /// at distance `u` on the axes.
    fn four_arcs(u: f64) -> ArcPolygon {
        let m = Metric::unit();
        let r = FRAC_PI_4;
        let verts: Vec<Vec3> = (0..4)
            .map(|k| crate::sphere::polar_vec(u, k as f64 * PI / 2.0))
            .collect();
        let mut arcs = vec![];
        for k in 0..4 {
            let (p, q) = (verts[k], verts[(k + 1) % 4]);
            // center of the radius-r circle through p, q on the inner side
            let mid = (p + q).normalize();
            let half = crate::sphere::distance(&p, &q) / 2.0;
            let off = (r.cos() / half.cos()).acos();
            let axis = p.cross(&q).normalize();
            // the center lies on the origin side of the chord
            let c = mid * off.cos() + axis * off.sin();
            let piece = Piece::from_endpoints(c, r, &p, &q, false);
            let pc = piece.canonicalized();
            arcs.push(Arc {
                center: SpherePoint::from_unit_vec(&pc.c, &m),
                start: pc.start,
                extent: pc.extent,
                kappa: 1.0,
            });
        }
        ArcPolygon::new(m, 1.0, arcs).unwrap()
    }

    #[test]
    fn circle_is_exact() {
        let c = ArcPolygon::circle(Metric::unit(), 1.0, origin()).unwrap();
        assert!((c.length() - PI * SQRT_2).abs() < 1e-14);
        assert!((c.area().unwrap() - (2.0 * PI - PI * SQRT_2)).abs() < 1e-14);
        let rep = c.measure().unwrap();
        assert!((rep.length - PI * SQRT_2).abs() < 1e-12);
        assert!((rep.min_radius - 1.0).abs() < 1e-12 && (rep.max_radius - 1.0).abs() < 1e-12);
        let s = c.support(256).unwrap();
        assert!(s.h().iter().all(|h| (h - FRAC_PI_4).abs() < 1e-14));
    }

    #[test]
    fn four_arc_polygon() {
        let p = four_arcs(0.5);
        let v = p.vertices().unwrap();
        assert_eq!(v.len(), 4);
        for x in &v {
            assert!((jump_angle(x, &p.metric()).unwrap() - x.phi).abs() < 1e-12);
        }
        let rep = p.measure().unwrap();
        assert!((rep.length - p.length()).abs() < 1e-12);
        assert!((rep.area - p.area().unwrap()).abs() < 1e-12);
        assert!(p.gauss_bonnet_residual().unwrap().abs() < 1e-12);
        assert!(p.is_lambda_convex(1e-8));
        assert_eq!(rep.min_radius, 0.0);
    }

    #[test]
    fn recentering_preserves_measures() {
        let p = four_arcs(0.4);
        let q = p.moved_to_origin(&SpherePoint { t: 0.1, theta: 2.0 }).unwrap();
        let (a, b) = (p.measure().unwrap(), q.measure().unwrap());
        assert!((a.length - b.length).abs() < 1e-12);
        assert!((a.area - b.area).abs() < 1e-12);
    }

    #[test]
    fn rejects_open_chain() {
        let m = Metric::unit();
        let a = Arc { center: origin(), start: 0.0, extent: 3.0, kappa: 1.0 };
        assert!(matches!(ArcPolygon::new(m, 1.0, vec![a]), Err(Error::Domain(_))));
    }
}
