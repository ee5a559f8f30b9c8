use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit};

use crate::curve::piecewise::{Loop, Piece};
use crate::curve::ArcPolygon;
use crate::error::{Error, Result};
use crate::par::{map_range, Exec};
use crate::sphere::{distance, midpoint, SpherePoint, Vec3};
#[cfg(test)]
use crate::sphere::Metric;

/// Boundary samples used to seed the diameter search.
const SEEDS: usize = 2048;

/// A point on a loop: piece index and frame angle.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Spot {
    piece: usize,
    phi: f64,
    x: Vec3,
}

/// Longest chord of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diameter {
    pub p: SpherePoint,
    pub q: SpherePoint,
    pub length: f64,
}

/// Point of the loop farthest from `x`. On a circle piece the farthest
/// point maximizes `−x·U(φ)`, which has a closed form.
fn farthest(lp: &Loop, x: &Vec3) -> Spot {
    let mut best = Spot { piece: 0, phi: 0.0, x: lp.pieces[0].start_point() };
    let mut best_d = -1.0;
    for (k, p) in lp.pieces.iter().enumerate() {
        let mut cands = vec![p.start, p.end()];
        if !p.is_vertex() {
            let phi = (-x.dot(&p.e2)).atan2(-x.dot(&p.e1));
            let off = (phi - p.start).rem_euclid(std::f64::consts::TAU);
            if off <= p.extent {
                cands.push(p.start + off);
            }
        }
        for phi in cands {
            let y = p.point(phi);
            let d = distance(x, &y);
            if d > best_d {
                best_d = d;
                best = Spot { piece: k, phi, x: y };
            }
        }
    }
    best
}

/// Seeds the search with the best of `SEEDS` samples, then alternates
/// farthest-point steps, which never decrease the distance.
fn diameter_spots(lp: &Loop, exec: Exec) -> (Spot, Spot) {
    let total = lp.length();
    let pts: Vec<Vec3> = (0..SEEDS).map(|i| lp.point_at(total * i as f64 / SEEDS as f64).0).collect();
    let rows = map_range(exec, SEEDS, |i| {
        (i + 1..SEEDS)
            .map(|j| (j, distance(&pts[i], &pts[j])))
            .fold((i, 0.0), |a, b| if b.1 > a.1 { b } else { a })
    });
    let (_, (j, _)) = rows
        .into_iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .unwrap();
    let mut p = farthest(lp, &pts[j]);
    let mut q = farthest(lp, &p.x);
    let mut d = distance(&p.x, &q.x);
    for _ in 0..200 {
        let p2 = farthest(lp, &q.x);
        let q2 = farthest(lp, &p2.x);
        let d2 = distance(&p2.x, &q2.x);
        if d2 <= d + 1e-16 {
            break;
        }
        (p, q, d) = (p2, q2, d2);
    }
    (p, q)
}

/// The longest geodesic chord `PQ` of a polygon.
pub fn diameter(poly: &ArcPolygon) -> Result<Diameter> {
    let lp = poly.to_loop()?;
    let (p, q) = diameter_spots(&lp, Exec::default());
    let m = poly.metric();
    Ok(Diameter {
        p: SpherePoint::from_unit_vec(&p.x, &m),
        q: SpherePoint::from_unit_vec(&q.x, &m),
        length: m.length_from_unit(distance(&p.x, &q.x)),
    })
}

/// Pieces of the loop running forward from `a` to `b`.
fn chain(lp: &Loop, a: &Spot, b: &Spot) -> Vec<Piece> {
    let n = lp.pieces.len();
    let off = |s: &Spot| s.phi - lp.pieces[s.piece].start;
    let mut out = vec![];
    let mut k = a.piece;
    let mut from = off(a);
    loop {
        let p = &lp.pieces[k];
        let last = k == b.piece && (k != a.piece || out.len() > 0 || off(b) >= from);
        let to = if last { off(b) } else { p.extent };
        if to - from > 1e-13 {
            out.push(p.sub(p.start + from, p.start + to));
        }
        if last {
            return out;
        }
        k = (k + 1) % n;
        from = 0.0;
        if out.len() > 4 * n {
            return out;
        }
    }
}

/// Splits the curve along its diameter and reflects each half through the
/// midpoint `M` of `PQ`, giving two curves centrally symmetric about `M`.
pub fn symmetrize(poly: &ArcPolygon) -> Result<(ArcPolygon, ArcPolygon)> {
    let lp = poly.to_loop()?;
    let (p, q) = diameter_spots(&lp, Exec::default());
    let mid = midpoint(&p.x, &q.x);
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(mid), PI);
    let build = |half: Vec<Piece>| -> Result<ArcPolygon> {
        let image: Vec<Piece> = half.iter().map(|x| x.rotated(&rot)).collect();
        let lp = Loop { pieces: half.into_iter().chain(image).collect() };
        ArcPolygon::from_loop(poly.metric(), poly.lambda(), &lp).map_err(|e| match e {
            Error::Convexity(s) => Error::Convexity(format!("reflection across the diameter failed: {s}")),
            e => e,
        })
    };
    Ok((build(chain(&lp, &p, &q))?, build(chain(&lp, &q, &p))?))
}

/// Dense pairwise diameter of boundary samples; the test oracle.
#[cfg(test)]
pub(crate) fn sampled_diameter(poly: &ArcPolygon, n: usize) -> f64 {
    let lp = poly.to_loop().unwrap();
    let total = lp.length();
    let pts: Vec<Vec3> = (0..n).map(|i| lp.point_at(total * i as f64 / n as f64).0).collect();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            best = best.max(distance(&pts[i], &pts[j]));
        }
    }
    Metric::unit().length_from_unit(best)
}
