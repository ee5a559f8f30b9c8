//! Closed convex curves made of circular pieces on the unit sphere.
//!
//! A piece is a CCW arc of the circle with center `c` and angular radius
//! `r ∈ [0, π/2]`: `r = 0` is a vertex (the arc then sweeps the outward
//! normals at that point), `r = π/2` is a geodesic segment. Consecutive
//! pieces share their end point and their outward normal, so the polar
//! point `ν = −sin r·c + cos r·U(φ)` moves continuously around the loop.
//!
//! The support function in the polar chart around the north pole is read
//! off from `ν = (cos h·e_θ, −sin h)`, and the contact point `P` gives the
//! gnomonic support `g = tan h = p·e_θ` together with `g' = p·e_θ⊥`.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Rotation3;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sphere::{polar_frame, vec_to_polar, Vec3};

/// Radius below which a piece is treated as a vertex.
const VERTEX_RADIUS: f64 = 1e-14;
/// Radius above which a piece is treated as a geodesic segment.
const SEGMENT_RADIUS: f64 = FRAC_PI_2 - 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Piece {
    pub c: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub r: f64,
    pub start: f64,
    pub extent: f64,
}

impl Piece {
    /// Piece in the canonical polar frame at `c`.
    pub fn canonical(c: Vec3, r: f64, start: f64, extent: f64) -> Self {
        let (t, th) = vec_to_polar(&c);
        Self::in_frame(t, th, r, start, extent)
    }

    /// Piece centered at the polar point `(t, θ)`, using the frame there.
    /// At `t = 0` the azimuth still selects the frame.
    pub fn in_frame(t: f64, theta: f64, r: f64, start: f64, extent: f64) -> Self {
        let (e1, e2) = polar_frame(t, theta);
        Self { c: crate::sphere::polar_vec(t, theta), e1, e2, r, start, extent }
    }

    /// Piece on the circle `(c, r)` running CCW from `from` to `to`.
    /// With `full` set the piece is the whole circle starting at `from`.
    pub fn from_endpoints(c: Vec3, r: f64, from: &Vec3, to: &Vec3, full: bool) -> Self {
        let mut p = Self::canonical(c, r, 0.0, 0.0);
        let a = p.angle_of(from);
        let b = p.angle_of(to);
        p.start = a;
        p.extent = if full { TAU } else { (b - a).rem_euclid(TAU) };
        p
    }

    /// Frame angle of the direction of `x` seen from the center.
    pub fn angle_of(&self, x: &Vec3) -> f64 {
        x.dot(&self.e2).atan2(x.dot(&self.e1))
    }

    fn u(&self, phi: f64) -> Vec3 {
        let (s, c) = phi.sin_cos();
        self.e1 * c + self.e2 * s
    }

    pub fn point(&self, phi: f64) -> Vec3 {
        let (s, c) = self.r.sin_cos();
        self.c * c + self.u(phi) * s
    }

    /// Outward normal at the contact point, i.e. the polar point.
    pub fn normal(&self, phi: f64) -> Vec3 {
        let (s, c) = self.r.sin_cos();
        self.u(phi) * c - self.c * s
    }

    /// Unit tangent in the direction of travel.
    pub fn tangent(&self, phi: f64) -> Vec3 {
        let (s, c) = phi.sin_cos();
        self.e2 * c - self.e1 * s
    }

    pub fn end(&self) -> f64 {
        self.start + self.extent
    }

    pub fn start_point(&self) -> Vec3 {
        self.point(self.start)
    }

    pub fn end_point(&self) -> Vec3 {
        self.point(self.end())
    }

    pub fn is_vertex(&self) -> bool {
        self.r < VERTEX_RADIUS
    }

    pub fn is_segment(&self) -> bool {
        self.r > SEGMENT_RADIUS
    }

    pub fn length(&self) -> f64 {
        self.r.sin() * self.extent
    }

    /// `∫ κ ds` over the piece (the jump angle for a vertex).
    pub fn turning(&self) -> f64 {
        self.r.cos() * self.extent
    }

    pub fn rotated(&self, rot: &Rotation3<f64>) -> Self {
        Self {
            c: rot * self.c,
            e1: rot * self.e1,
            e2: rot * self.e2,
            ..self.clone()
        }
    }

    /// Same piece re-expressed in the canonical frame of its center.
    pub fn canonicalized(&self) -> Self {
        let mut p = Self::canonical(self.c, self.r, 0.0, self.extent);
        p.start = p.angle_of(&self.u(self.start)).rem_euclid(TAU);
        p
    }

    /// The polar image in the chart reflected through the origin's antipode:
    /// same center, complementary radius, normals turned by π.
    pub fn polar(&self) -> Self {
        Self {
            r: FRAC_PI_2 - self.r,
            start: (self.start + std::f64::consts::PI).rem_euclid(TAU),
            ..self.clone()
        }
    }

    /// The sub-piece between frame angles `a` and `b` (`a ≤ b` along the piece).
    pub fn sub(&self, a: f64, b: f64) -> Self {
        Self { start: a, extent: b - a, ..self.clone() }
    }

    /// Frame angle at which the normal points to azimuth `theta`, chosen
    /// inside the piece's angular range.
    fn angle_for_azimuth(&self, theta: f64) -> f64 {
        let eperp = Vec3::new(-theta.sin(), theta.cos(), 0.0);
        let (sr, cr) = self.r.sin_cos();
        let a1 = self.e1.dot(&eperp) * cr;
        let a2 = self.e2.dot(&eperp) * cr;
        let rhs = self.c.dot(&eperp) * sr;
        let m = a1.hypot(a2);
        let base = a2.atan2(a1);
        let d = (rhs / m).clamp(-1.0, 1.0).acos();
        let pick = |phi: f64| {
            let off = (phi - self.start).rem_euclid(TAU);
            // distance outside the range, measured cyclically
            if off <= self.extent {
                0.0
            } else {
                (off - self.extent).min(TAU - off)
            }
        };
        let (p1, p2) = (base + d, base - d);
        let (o1, o2) = (pick(p1), pick(p2));
        let phi = if o1 < o2 {
            p1
        } else if o2 < o1 {
            p2
        } else {
            let e = Vec3::new(theta.cos(), theta.sin(), 0.0);
            if self.normal(p1).dot(&e) >= self.normal(p2).dot(&e) {
                p1
            } else {
                p2
            }
        };
        let off = (phi - self.start).rem_euclid(TAU);
        self.start + off.min(self.extent)
    }
}

/// Gnomonic support value and derivative of the contact point `p` in direction `theta`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SupportValue {
    pub g: f64,
    pub dg: f64,
}

impl SupportValue {
    fn from_contact(p: &Vec3, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let (x, y) = (p.x / p.z, p.y / p.z);
        Self { g: x * c + y * s, dg: -x * s + y * c }
    }

    pub fn h(&self) -> f64 {
        self.g.atan()
    }

    #[cfg(test)]
    pub fn dh(&self) -> f64 {
        self.dg / (1.0 + self.g * self.g)
    }

    /// `√(cos²h + h'²)`, the speed of the polar point in `θ`.
    pub fn polar_speed(&self) -> f64 {
        let q = 1.0 + self.g * self.g;
        (q + self.dg * self.dg).sqrt() / q
    }
}

/// A closed, tangent-continuous loop of pieces on the unit sphere.
#[derive(Debug, Clone)]
pub(crate) struct Loop {
    pub pieces: Vec<Piece>,
}

/// Support-chart view of a loop: azimuth of the first normal of each piece
/// and the azimuth width it covers.
#[derive(Debug, Clone)]
pub(crate) struct SupportChart<'a> {
    lp: &'a Loop,
    pub origin: f64,
    pub offsets: Vec<f64>,
    pub widths: Vec<f64>,
}

impl Loop {
    pub fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    /// Area from Gauss–Bonnet: `2π − ∫κ ds − Σφ`.
    pub fn gauss_bonnet_area(&self) -> f64 {
        TAU - self.pieces.iter().map(Piece::turning).sum::<f64>()
    }

    pub fn polar(&self) -> Loop {
        Loop { pieces: self.pieces.iter().map(Piece::polar).collect() }
    }

    pub fn rotated(&self, rot: &Rotation3<f64>) -> Loop {
        Loop { pieces: self.pieces.iter().map(|p| p.rotated(rot)).collect() }
    }

    pub fn chart(&self) -> Result<SupportChart<'_>> {
        SupportChart::new(self)
    }

    /// Boundary point at arclength `s` (taken modulo the length).
    pub fn point_at(&self, s: f64) -> (Vec3, Vec3) {
        let total = self.length();
        let mut s = s.rem_euclid(total);
        let mut last = None;
        for p in self.pieces.iter().filter(|p| !p.is_vertex()) {
            let l = p.length();
            let phi = p.start + s / p.r.sin();
            if s <= l {
                return (p.point(phi), p.tangent(phi));
            }
            s -= l;
            last = Some(p);
        }
        let p = last.expect("loop without arcs");
        (p.end_point(), p.tangent(p.end()))
    }
}

impl<'a> SupportChart<'a> {
    fn new(lp: &'a Loop) -> Result<Self> {
        let az = |v: Vec3| v.y.atan2(v.x);
        let n = lp.pieces.len();
        let mut widths = Vec::with_capacity(n);
        for p in &lp.pieces {
            if p.start_point().z <= 0.0 {
                return Err(Error::Domain(
                    "curve leaves the open hemisphere around the origin".into(),
                ));
            }
            let w = if p.is_segment() {
                0.0
            } else if n == 1 && p.extent >= TAU - 1e-12 {
                TAU
            } else {
                let raw = (az(p.normal(p.end())) - az(p.normal(p.start))).rem_euclid(TAU);
                if raw > TAU - 1e-9 && p.extent < TAU - 1e-9 {
                    0.0
                } else {
                    raw
                }
            };
            widths.push(w);
        }
        let total: f64 = widths.iter().sum();
        if (total - TAU).abs() > 1e-8 {
            return Err(Error::Domain(format!(
                "normals turn by {total} instead of 2π; origin not inside the curve"
            )));
        }
        let origin = az(lp.pieces[0].normal(lp.pieces[0].start));
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 0.0;
        for w in &widths {
            offsets.push(acc);
            acc += w;
        }
        Ok(Self { lp, origin, offsets, widths })
    }

    fn locate(&self, theta: f64) -> (usize, f64) {
        let off = (theta - self.origin).rem_euclid(TAU);
        let k = match self
            .offsets
            .binary_search_by(|o| o.partial_cmp(&off).unwrap())
        {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1),
        };
        // skip zero-width pieces
        let mut k = k;
        while self.widths[k] == 0.0 {
            k = (k + self.widths.len() - 1) % self.widths.len();
        }
        (k, off)
    }

    fn eval_in(&self, k: usize, theta: f64) -> SupportValue {
        let p = &self.lp.pieces[k];
        let contact = if p.is_vertex() { p.c } else { p.point(p.angle_for_azimuth(theta)) };
        SupportValue::from_contact(&contact, theta)
    }

    /// Support at `theta`. Near piece boundaries rounding can pick the
    /// wrong piece, so the neighbours are evaluated too; every candidate is
    /// a boundary point, so the largest value is the support.
    pub fn eval(&self, theta: f64) -> SupportValue {
        let (k, _) = self.locate(theta);
        let n = self.widths.len();
        [k, (k + 1) % n, (k + n - 1) % n]
            .into_iter()
            .map(|j| self.eval_in(j, theta))
            .max_by(|a, b| a.g.total_cmp(&b.g))
            .unwrap()
    }

    /// `∫ f(value) dθ` over a full turn, integrating each piece separately.
    pub fn integrate(&self, f: impl Fn(&SupportValue) -> f64) -> f64 {
        let gl = GaussLegendre::standard();
        self.widths
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(k, &w)| {
                let a = self.origin + self.offsets[k];
                let panels = (w / 0.25).ceil().max(1.0) as usize;
                gl.integrate_composite(a, a + w, panels, |th| f(&self.eval_in(k, th)))
            })
            .sum()
    }

    /// Length as `∫ sin h dθ`.
    pub fn length(&self) -> f64 {
        self.integrate(|v| v.h().sin())
    }

    /// Area as `∫ (1 − √(cos²h + h'²)) dθ`.
    pub fn area(&self) -> f64 {
        self.integrate(|v| 1.0 - v.polar_speed())
    }

    /// Azimuth ranges `[α, β]` of the vertex pieces, with the piece index.
    pub fn vertex_ranges(&self) -> Vec<(usize, f64, f64)> {
        self.lp
            .pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_vertex())
            .map(|(k, _)| {
                let a = self.origin + self.offsets[k];
                (k, a, a + self.widths[k])
            })
            .collect()
    }
}
