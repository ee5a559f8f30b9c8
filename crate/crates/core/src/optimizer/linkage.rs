//! Steiner's four-bar deformation of centrally symmetric λ-polygons.
//!
//! Two vertex pairs `A, Ā` and `B, B̄` cut the polygon into four rigid
//! links over the quadrilateral `A B Ā B̄`. Its side lengths are fixed, so
//! the hinge angle at `A` is the only freedom; the links ride along with
//! their chords. The polygon's length never changes, and its area changes
//! with the quadrilateral's area, which is twice that of a triangle with
//! sides `|AB|`, `|AB̄|` and included angle `α`. Moving `α` away from the
//! maximizer of that triangle area shrinks the polygon until the angle at
//! the hinge vertex flattens and the vertex pair disappears.

use std::f64::consts::PI;

use nalgebra::Rotation3;
use serde::{Deserialize, Serialize};

use crate::curve::piecewise::{Loop, Piece};
use crate::curve::ArcPolygon;
use crate::error::{domain, Error, Result};
use crate::extremal::lune_area;
use crate::sphere::{distance, pair_isometry, polar_vec, rotation_to_pole, triangle_area_argmax, vec_to_polar, Metric, Vec3};

/// Default hinge increment, one degree.
pub const DEFAULT_STEP: f64 = PI / 180.0;

/// Longest run accepted by [`deform_to_lune`].
const MAX_STEPS: usize = 100_000;

/// Vertices of a polygon whose arcs all have radius `r`; edge `i` joins
/// `verts[i]` to `verts[i+1]` with half central angle `psi[i]`.
#[derive(Debug, Clone)]
struct Chain {
    r: f64,
    verts: Vec<Vec3>,
    psi: Vec<f64>,
}

/// Angle at `a` between the geodesics to `b` and to `c`.
fn angle_at(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let tb = b - a * a.dot(b);
    let tc = c - a * a.dot(c);
    tb.cross(&tc).norm().atan2(tb.dot(&tc))
}

/// Central symmetry about the origin.
fn flip(v: &Vec3) -> Vec3 {
    Vec3::new(-v.x, -v.y, v.z)
}

impl Chain {
    /// Reads the vertices of a polygon symmetric about some point `M` and
    /// moves `M` to the origin; returns the rotation used.
    fn from_polygon(poly: &ArcPolygon) -> Result<(Self, Rotation3<f64>)> {
        let m = poly.metric();
        let r = 1.0f64.atan2(m.curvature_to_unit(poly.lambda()));
        let lp = poly.to_loop()?;
        if let Some(p) = lp.pieces.iter().find(|p| !p.is_vertex() && (p.r - r).abs() > 1e-9) {
            return domain(format!("arc of radius {} differs from the radius {r} of curvature λ", p.r));
        }
        let n = lp.pieces.len();
        let Some(first) = lp.pieces.iter().position(Piece::is_vertex) else {
            return Err(Error::Rigidity("a circle has no vertices to hinge".into()));
        };
        let mut verts = vec![lp.pieces[first].c];
        let mut psi = vec![];
        let mut cur = 0.0;
        for t in 1..=n {
            let p = &lp.pieces[(first + t) % n];
            if p.is_vertex() {
                psi.push(cur);
                cur = 0.0;
                if t < n {
                    verts.push(p.c);
                }
            } else {
                cur += 0.5 * p.extent;
            }
        }
        let len = verts.len();
        let k = len / 2;
        if len % 2 != 0 {
            return domain("polygon is not centrally symmetric (odd vertex count)");
        }
        let sum = verts[0] + verts[k];
        if sum.norm() < 1e-9 {
            return domain("polygon is not contained in an open hemisphere");
        }
        let mid = sum.normalize();
        for i in 0..k {
            let img = 2.0 * verts[i].dot(&mid) * mid - verts[i];
            if (img - verts[i + k]).norm() > 1e-8 || (psi[i] - psi[i + k]).abs() > 1e-8 {
                return domain("polygon is not centrally symmetric");
            }
        }
        let rot = rotation_to_pole(&mid);
        let verts = verts.iter().map(|v| rot * v).collect();
        Ok((Self { r, verts, psi }, rot))
    }

    fn pairs(&self) -> usize {
        self.verts.len() / 2
    }

    fn at(&self, i: usize) -> Vec3 {
        self.verts[i % self.verts.len()]
    }

    /// Arc on edge `i`: its center lies at distance `atan(tan r cos ψ)`
    /// from the chord midpoint, on the inner side.
    fn edge(&self, i: usize) -> Piece {
        let (p, q) = (self.at(i), self.at(i + 1));
        let mid = (p + q).normalize();
        let w = p.cross(&q).normalize();
        let d = (self.r.tan() * self.psi[i].cos()).atan();
        let c = mid * d.cos() + w * d.sin();
        Piece::from_endpoints(c, self.r, &p, &q, false)
    }

    /// Exterior angle at every vertex.
    fn jumps(&self) -> Vec<f64> {
        let n = self.verts.len();
        let edges: Vec<Piece> = (0..n).map(|i| self.edge(i)).collect();
        (0..n)
            .map(|i| {
                let (a, b) = (&edges[(i + n - 1) % n], &edges[i]);
                let (n0, n1) = (a.normal(a.end()), b.normal(b.start));
                n0.cross(&n1).dot(&self.verts[i]).atan2(n0.dot(&n1))
            })
            .collect()
    }

    fn to_polygon(&self, back: &Rotation3<f64>, m: Metric, lambda: f64) -> Result<ArcPolygon> {
        let pieces = (0..self.verts.len()).map(|i| self.edge(i).rotated(back)).collect();
        ArcPolygon::from_loop(m, lambda, &Loop { pieces })
    }

    /// The chain with the hinge angle at `verts[h]` set to `alpha`, where
    /// `verts[n]` is the next vertex of the quadrilateral. The links from
    /// `h` to `n` and from `n` to `h + k` move rigidly with their chords;
    /// the other two follow by symmetry.
    fn hinged(&self, h: usize, n: usize, alpha: f64) -> Option<Self> {
        let k = self.pairs();
        let len = self.verts.len();
        let (a_pt, b_pt, a_bar) = (self.at(h), self.at(n), self.at(h + k));
        let a = distance(&a_pt, &b_pt);
        let b = distance(&b_pt, &a_bar);
        // half-diagonal through B from the triangle (a, b, α) at A
        let cos_bb = a.cos() * b.cos() + a.sin() * b.sin() * alpha.cos();
        let rho_b = 0.5 * cos_bb.clamp(-1.0, 1.0).acos();
        let cos_ra = (a.cos() + b.cos()) / (2.0 * rho_b.cos());
        if !(cos_ra.abs() <= 1.0) {
            return None;
        }
        let rho_a = cos_ra.acos();
        let cos_w = (a.cos() - b.cos()) / (2.0 * rho_a.sin() * rho_b.sin());
        if !(cos_w.abs() <= 1.0 + 1e-12) {
            return None;
        }
        let w = cos_w.clamp(-1.0, 1.0).acos();
        let (_, theta_a) = vec_to_polar(&a_pt);
        let a_new = polar_vec(rho_a, theta_a);
        let b_new = polar_vec(rho_b, theta_a + w);
        let r1 = pair_isometry(&a_pt, &b_pt, &a_new, &b_new);
        let r2 = pair_isometry(&b_pt, &a_bar, &b_new, &flip(&a_new));
        let mut verts = self.verts.clone();
        let span = |from: usize, to: usize| {
            let steps = (to + len - from) % len;
            (0..=steps).map(move |s| (from + s) % len)
        };
        for i in span(h, n) {
            verts[i] = r1 * self.verts[i];
        }
        for i in span(n, (h + k) % len) {
            verts[i] = r2 * self.verts[i];
        }
        for i in span(h, (h + k - 1) % len) {
            verts[(i + k) % len] = flip(&verts[i]);
        }
        verts[h % len] = a_new;
        verts[n % len] = b_new;
        verts[(h + k) % len] = flip(&a_new);
        verts[(n + k) % len] = flip(&b_new);
        Some(Self { verts, ..self.clone() })
    }

    /// Removes the vertex pair at `h`, `h + k`, merging the adjacent arcs.
    fn merged(&self, h: usize) -> Self {
        let k = self.pairs();
        let len = self.verts.len();
        let mut verts = self.verts.clone();
        let mut psi = self.psi.clone();
        let mut idxs = [h % len, (h + k) % len];
        idxs.sort_unstable_by(|a, b| b.cmp(a));
        for idx in idxs {
            let prev = (idx + verts.len() - 1) % verts.len();
            psi[prev] += psi[idx];
            psi.remove(idx);
            verts.remove(idx);
        }
        Self { verts, psi, ..self.clone() }
    }

    #[cfg(test)]
    fn unit_area(&self) -> f64 {
        use std::f64::consts::TAU;
        let ext: f64 = self.psi.iter().map(|p| 2.0 * p).sum();
        TAU - self.r.cos() * ext - self.jumps().iter().sum::<f64>()
    }
}

/// One accepted deformation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformStep {
    pub step: usize,
    pub length: f64,
    pub area: f64,
    pub vertex_pairs: usize,
    /// `A − Ã(L)`
    pub deficit: f64,
}

/// One hinge move on the unit-sphere chain. Returns the new chain and
/// whether a vertex pair was removed.
fn hinge_step(chain: &Chain, step: f64) -> Result<(Chain, bool)> {
    let k = chain.pairs();
    if k < 2 {
        return Err(Error::Rigidity("a lune has a single vertex pair and no linkage".into()));
    }
    let (i, j) = (0, 1);
    let (a, b, a_bar, b_bar) = (chain.at(i), chain.at(j), chain.at(i + k), chain.at(j + k));
    let alpha = angle_at(&a, &b, &b_bar);
    let beta = angle_at(&b, &a_bar, &a);
    let (sa, sb) = (distance(&a, &b), distance(&b, &a_bar));
    let unit = Metric::unit();
    let alpha0 = triangle_area_argmax(sa, sb, &unit).unwrap_or(PI);
    // increase whichever angle lies above the maximizer
    let (h, n, angle) = if alpha >= alpha0 { (i, j, alpha) } else { (j, i + k, beta) };
    let jumps = chain.jumps();
    // the hinge vertex's exterior angle falls one-for-one with the hinge angle
    let room = jumps[h];
    let mut inc = step.min(room);
    for _ in 0..60 {
        if let Some(next) = chain.hinged(h, n, angle + inc) {
            let js = next.jumps();
            let flat = inc >= room;
            let ok = js
                .iter()
                .enumerate()
                .all(|(idx, x)| (flat && idx % k == h % k) || (*x > -1e-12 && *x < PI));
            if ok {
                return Ok(if flat { (next.merged(h), true) } else { (next, false) });
            }
        }
        inc *= 0.5;
    }
    Err(Error::Convexity("no admissible hinge move keeps the polygon convex".into()))
}

/// One four-bar step: opens the hinge angle that lies above the
/// area-maximizing angle by `step` (less when the hinge vertex flattens
/// sooner, in which case that vertex pair is removed).
pub fn four_bar_deform(poly: &ArcPolygon, step: f64) -> Result<ArcPolygon> {
    if !(step > 0.0 && step < PI) {
        return domain(format!("step {step} outside (0, π)"));
    }
    let (chain, rot) = Chain::from_polygon(poly)?;
    let (next, _) = hinge_step(&chain, step)?;
    next.to_polygon(&rot.inverse(), poly.metric(), poly.lambda())
}

/// Runs the deformation until a lune remains, recording every step
/// (step 0 is the input).
pub fn deform_to_lune(poly: &ArcPolygon, step: f64) -> Result<(ArcPolygon, Vec<DeformStep>)> {
    let (end, steps) = deform(poly, step, MAX_STEPS)?;
    if steps.last().map_or(true, |s| s.vertex_pairs > 1) {
        return Err(Error::Convexity(format!("no lune after {MAX_STEPS} steps")));
    }
    Ok((end, steps))
}

/// Runs at most `max_steps` deformation steps, stopping early at a lune.
pub fn deform(poly: &ArcPolygon, step: f64, max_steps: usize) -> Result<(ArcPolygon, Vec<DeformStep>)> {
    if !(step > 0.0 && step < PI) {
        return domain(format!("step {step} outside (0, π)"));
    }
    let m = poly.metric();
    let lambda = poly.lambda();
    let (mut chain, rot) = Chain::from_polygon(poly)?;
    if chain.pairs() < 2 {
        return Err(Error::Rigidity("a lune has a single vertex pair and no linkage".into()));
    }
    let back = rot.inverse();
    let length = poly.length();
    let record = |s: usize, c: &Chain| -> Result<DeformStep> {
        let p = c.to_polygon(&back, m, lambda)?;
        let area = p.area()?;
        Ok(DeformStep {
            step: s,
            length: p.length(),
            area,
            vertex_pairs: c.pairs(),
            deficit: area - lune_area(length, lambda, &m)?,
        })
    };
    let mut steps = vec![record(0, &chain)?];
    for s in 1..=max_steps {
        if chain.pairs() == 1 {
            break;
        }
        chain = hinge_step(&chain, step)?.0;
        steps.push(record(s, &chain)?);
    }
    Ok((chain.to_polygon(&back, m, lambda)?, steps))
}
