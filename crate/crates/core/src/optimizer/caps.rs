use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::piecewise::{Loop, Piece};
use crate::curve::ArcPolygon;
use crate::error::{domain, Error, Result};
use crate::extremal::lune_max_length;
use crate::par::{map_range, Exec};
use crate::sphere::{polar_vec, Metric, Vec3};

/// Arcs shorter than this (in frame angle) are dropped by removing their cap.
pub(crate) const PRUNE_EXTENT: f64 = 1e-9;

/// Caps of equal radius `r` on the unit sphere.
///
/// Centers are given in azimuthal-equidistant coordinates `(t cos θ, t sin θ)`
/// around the origin and scaled by `scale`, so that `scale = 0` collapses
/// them into one circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CapSet {
    pub r: f64,
    pub centers: Vec<[f64; 2]>,
    pub scale: f64,
}

/// Sorted disjoint sub-intervals of `[0, 2π)`.
type Intervals = Vec<(f64, f64)>;

fn clip(set: &Intervals, mid: f64, half: f64) -> Intervals {
    if half >= PI {
        return set.clone();
    }
    let lo = (mid - half).rem_euclid(TAU);
    let hi = lo + 2.0 * half;
    let window: Intervals = if hi <= TAU { vec![(lo, hi)] } else { vec![(lo, TAU), (0.0, hi - TAU)] };
    let mut out = vec![];
    for &(a, b) in set {
        for &(c, d) in &window {
            let (x, y) = (a.max(c), b.min(d));
            if y > x {
                out.push((x, y));
            }
        }
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

impl CapSet {
    pub fn new(lambda_unit: f64, centers: Vec<[f64; 2]>, scale: f64) -> Self {
        Self { r: 1.0f64.atan2(lambda_unit), centers, scale }
    }

    fn center(&self, i: usize) -> Vec3 {
        let [x, y] = self.centers[i];
        let t = self.scale * x.hypot(y);
        polar_vec(t, y.atan2(x))
    }

    /// Boundary arcs of circle `i` that lie in every other cap.
    fn arcs_of(&self, i: usize, centers: &[Vec3], active: &[bool]) -> Vec<Piece> {
        let mut p = Piece::canonical(centers[i], self.r, 0.0, 0.0);
        let (sr, cr) = self.r.sin_cos();
        let mut set: Intervals = vec![(0.0, TAU)];
        for (j, cj) in centers.iter().enumerate() {
            if j == i || !active[j] {
                continue;
            }
            // point(φ)·c_j = cr (c_i·c_j) + sr |P c_j| cos(φ − φ_j) ≥ cos r
            let a = cr * centers[i].dot(cj);
            let (x, y) = (p.e1.dot(cj), p.e2.dot(cj));
            let b = sr * x.hypot(y);
            if b < 1e-15 {
                if a < cr - 1e-15 {
                    return vec![];
                }
                continue;
            }
            let tau = (cr - a) / b;
            if tau > 1.0 {
                return vec![];
            }
            set = clip(&set, y.atan2(x), tau.max(-1.0).acos());
            if set.is_empty() {
                return vec![];
            }
        }
        // join the interval wrapping through 0
        if set.len() > 1 && set[0].0 == 0.0 && set.last().unwrap().1 == TAU {
            let (a, _) = set.pop().unwrap();
            set[0].0 = a - TAU;
        }
        set.into_iter()
            .map(|(a, b)| {
                p.start = a;
                p.extent = b - a;
                p.clone()
            })
            .collect()
    }

    /// Boundary loop (arcs only, in CCW order) and the indices of the caps
    /// that contribute to it. Caps whose arcs are all shorter than
    /// [`PRUNE_EXTENT`] are removed.
    pub(crate) fn boundary(&self) -> Result<(Loop, Vec<usize>)> {
        let n = self.centers.len();
        if n == 0 {
            return domain("a cap set needs at least one cap");
        }
        let centers: Vec<Vec3> = (0..n).map(|i| self.center(i)).collect();
        let mut active = vec![true; n];
        // identical caps would both claim the same arc
        for i in 0..n {
            for j in 0..i {
                if active[j] && (centers[i] - centers[j]).norm() < 1e-13 {
                    active[i] = false;
                }
            }
        }
        loop {
            let arcs: Vec<(usize, Vec<Piece>)> = (0..n)
                .filter(|&i| active[i])
                .map(|i| (i, self.arcs_of(i, &centers, &active)))
                .collect();
            let mut changed = false;
            for (i, a) in &arcs {
                if a.iter().all(|p| p.extent < PRUNE_EXTENT) {
                    active[*i] = false;
                    changed = true;
                    break;
                }
            }
            if changed {
                continue;
            }
            let mut pieces: Vec<(usize, Piece)> =
                arcs.into_iter().flat_map(|(i, a)| a.into_iter().map(move |p| (i, p))).collect();
            if pieces.is_empty() {
                return domain("the caps have empty intersection");
            }
            // chain the arcs end to start
            let mut order = vec![pieces.swap_remove(0)];
            while !pieces.is_empty() {
                let end = order.last().unwrap().1.end_point();
                let (k, gap) = pieces
                    .iter()
                    .enumerate()
                    .map(|(k, (_, p))| (k, (p.start_point() - end).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                if gap > 1e-8 {
                    return Err(Error::Domain(format!("cap boundary does not close (gap {gap:e})")));
                }
                order.push(pieces.swap_remove(k));
            }
            let used = order.iter().map(|(i, _)| *i).collect();
            return Ok((Loop { pieces: order.into_iter().map(|(_, p)| p).collect() }, used));
        }
    }

    /// Length and area of the intersection on the unit sphere.
    pub(crate) fn measure_unit(&self) -> Result<(f64, f64)> {
        let (lp, _) = self.boundary()?;
        let n = lp.pieces.len();
        let mut turning = 0.0;
        let mut ext = 0.0;
        for i in 0..n {
            let (a, b) = (&lp.pieces[i], &lp.pieces[(i + 1) % n]);
            ext += a.extent;
            let (n0, n1) = (a.normal(a.end()), b.normal(b.start));
            turning += n0.cross(&n1).dot(&a.end_point()).atan2(n0.dot(&n1));
        }
        let (sr, cr) = self.r.sin_cos();
        Ok((sr * ext, TAU - cr * ext - turning))
    }

    pub fn to_polygon(&self, m: Metric, lambda: f64) -> Result<ArcPolygon> {
        let (lp, _) = self.boundary()?;
        ArcPolygon::from_loop(m, lambda, &lp)
    }

    /// Largest scale keeping the origin inside every cap.
    pub(crate) fn max_scale(&self) -> f64 {
        let far = self.centers.iter().map(|c| c[0].hypot(c[1])).fold(0.0, f64::max);
        if far == 0.0 {
            0.0
        } else {
            self.r * (1.0 - 1e-9) / far
        }
    }

    /// Rescales the centers so that the boundary has unit-sphere length
    /// `l`, by bisection on the scale. Fails when even the largest scale
    /// leaves the boundary longer than `l`.
    pub(crate) fn with_length(&self, l: f64) -> Result<Self> {
        let len = |s: f64| -> Result<f64> { Ok(Self { scale: s, ..self.clone() }.measure_unit()?.0) };
        let lmax = TAU * self.r.sin();
        if l > lmax * (1.0 + 1e-12) {
            return domain(format!("length {l} above the circle length {lmax}"));
        }
        let hi_s = self.max_scale();
        if len(hi_s)? > l {
            return domain(format!("centers too close together to reach length {l}"));
        }
        let (mut lo, mut hi) = (0.0, hi_s);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if len(mid)? > l {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * hi_s.max(1.0) {
                break;
            }
        }
        // take the side closer in length
        let (a, b) = (len(lo)?, len(hi)?);
        let s = if (a - l).abs() <= (b - l).abs() { lo } else { hi };
        Ok(Self { scale: s, ..self.clone() })
    }
}

fn unit_length(length: f64, lambda: f64, m: &Metric) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    let lmax = lune_max_length(lambda, m);
    if !(length > 0.0 && length <= lmax * (1.0 + 1e-12)) {
        return domain(format!("length {length} outside (0, {lmax}]"));
    }
    Ok(m.length_to_unit(length.min(lmax)))
}

/// Regular `n`-arc polygon of curvature `lambda` and the given length.
pub fn regular_polygon(n: usize, lambda: f64, length: f64, m: &Metric) -> Result<ArcPolygon> {
    if n < 2 {
        return domain("a polygon needs at least two arcs");
    }
    let l = unit_length(length, lambda, m)?;
    let centers = (0..n).map(|k| {
        let a = TAU * k as f64 / n as f64;
        [a.cos(), a.sin()]
    });
    let caps = CapSet::new(m.curvature_to_unit(lambda), centers.collect(), 0.0).with_length(l)?;
    caps.to_polygon(*m, lambda)
}

fn random_caps(rng: &mut impl Rng, n: usize, lambda_unit: f64, symmetric: bool) -> CapSet {
    let k = if symmetric { n / 2 } else { n };
    let mut centers: Vec<[f64; 2]> = (0..k)
        .map(|i| {
            let a = TAU * (i as f64 + rng.gen_range(-0.3..0.3)) / n as f64;
            let t = rng.gen_range(0.3..1.0);
            [t * a.cos(), t * a.sin()]
        })
        .collect();
    if symmetric {
        let half: Vec<[f64; 2]> = centers.iter().map(|[x, y]| [-x, -y]).collect();
        centers.extend(half);
    }
    let mut caps = CapSet::new(lambda_unit, centers, 0.0);
    caps.scale = caps.max_scale() * rng.gen_range(0.2..0.9);
    caps
}

/// Random λ-convex polygon with exactly `n` arcs, all of curvature λ.
pub fn random_polygon(rng: &mut impl Rng, n: usize, lambda: f64, m: &Metric) -> Result<ArcPolygon> {
    random_with(rng, n, lambda, m, false)
}

/// Random polygon with `n` arcs (`n` even) symmetric about the origin.
pub fn random_symmetric_polygon(rng: &mut impl Rng, n: usize, lambda: f64, m: &Metric) -> Result<ArcPolygon> {
    if n % 2 != 0 {
        return domain("a centrally symmetric polygon has an even number of arcs");
    }
    random_with(rng, n, lambda, m, true)
}

fn random_with(rng: &mut impl Rng, n: usize, lambda: f64, m: &Metric, symmetric: bool) -> Result<ArcPolygon> {
    if n < 2 {
        return domain("a polygon needs at least two arcs");
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    for _ in 0..10_000 {
        let caps = random_caps(rng, n, m.curvature_to_unit(lambda), symmetric);
        let Ok((lp, used)) = caps.boundary() else { continue };
        // every arc long enough to matter, one arc per cap
        let mut u = used.clone();
        u.dedup();
        if lp.pieces.len() == n && u.len() == n && lp.pieces.iter().all(|p| p.extent > 1e-3) {
            return ArcPolygon::from_loop(*m, lambda, &lp);
        }
    }
    domain(format!("could not draw a polygon with {n} arcs"))
}

/// `count` random `n`-arc polygons, the `i`-th drawn from its own stream
/// of the seed so that the batch does not depend on the executor.
pub fn random_polygons(count: usize, n: usize, lambda: f64, m: &Metric, seed: u64, exec: Exec) -> Result<Vec<ArcPolygon>> {
    map_range(exec, count, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        random_polygon(&mut rng, n, lambda, m)
    })
    .into_iter()
    .collect()
}
