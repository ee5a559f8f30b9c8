use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::caps::CapSet;
use crate::curve::ArcPolygon;
use crate::error::{domain, Result};
use crate::extremal::{lune_area, lune_max_length};
use crate::par::{map_range, Exec};
use crate::sphere::Metric;

/// Independent local searches per run.
pub const DEFAULT_STARTS: usize = 64;

/// Deficit below which a run counts as having found the lune.
const LUNE_DEFICIT: f64 = 1e-4;
/// Arcs with a smaller central angle do not count against a lune.
const NEGLIGIBLE_EXTENT: f64 = 1e-3;
/// Initial coordinate step of the local search.
const FIRST_STEP: f64 = 0.25;

/// Summary of a minimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    /// Area above the lune of the same length.
    pub best_deficit: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    pub n_arcs: usize,
    pub seed: u64,
    pub iterations: usize,
    pub converged_to_lune: bool,
    pub best_area: f64,
    /// Arcs left in the best polygon.
    pub final_arcs: usize,
    /// Index of the start that produced the best polygon.
    pub best_start: usize,
}

struct Outcome {
    caps: CapSet,
    area: f64,
}

fn initial(rng: &mut ChaCha8Rng, n: usize, lam: f64, l: f64) -> CapSet {
    for _ in 0..1000 {
        let centers = (0..n)
            .map(|_| {
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                let t = rng.gen_range(0.2..1.0);
                [t * a.cos(), t * a.sin()]
            })
            .collect();
        if let Ok(c) = CapSet::new(lam, centers, 0.0).with_length(l) {
            return c;
        }
    }
    // evenly spread centers always reach every admissible length
    let centers = (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    CapSet::new(lam, centers, 0.0)
        .with_length(l)
        .expect("regular cap set reaches every length")
}

/// Coordinate descent on the cap centers; every trial point is rescaled
/// back onto the length constraint.
fn local_search(start: CapSet, l: f64, iterations: usize) -> Outcome {
    let area = |c: &CapSet| c.measure_unit().map(|x| x.1).unwrap_or(f64::INFINITY);
    let mut best = start;
    let mut best_a = area(&best);
    let mut step = FIRST_STEP;
    for _ in 0..iterations {
        let mut improved = false;
        for i in 0..best.centers.len() {
            for axis in 0..2 {
                for sign in [1.0, -1.0] {
                    let mut trial = best.clone();
                    trial.centers[i][axis] += sign * step;
                    let Ok(trial) = trial.with_length(l) else { continue };
                    let a = area(&trial);
                    if a < best_a - 1e-15 {
                        (best, best_a) = (trial, a);
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    Outcome { caps: best, area: best_a }
}

/// Seeded multistart search for the least-area λ-polygon with `n_arcs`
/// arcs and length `l0`.
///
/// Start `i` draws its cap centers from stream `i` of the seed, so the
/// result is identical under any executor. The best start is the one with
/// least area, ties going to the lower index.
pub fn minimize_area(
    m: &Metric,
    lambda: f64,
    n_arcs: usize,
    l0: f64,
    seed: u64,
    iterations: usize,
    starts: usize,
    exec: Exec,
) -> Result<(ArcPolygon, OptimizerReport)> {
    if n_arcs < 2 {
        return domain("a polygon needs at least two arcs");
    }
    if starts == 0 {
        return domain("at least one start is needed");
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    let lmax = lune_max_length(lambda, m);
    if !(l0 > 0.0 && l0 <= lmax * (1.0 + 1e-12)) {
        return domain(format!("length {l0} outside (0, {lmax}]"));
    }
    let lam = m.curvature_to_unit(lambda);
    let l = m.length_to_unit(l0.min(lmax));
    let outcomes = map_range(exec, starts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        local_search(initial(&mut rng, n_arcs, lam, l), l, iterations)
    });
    let (best_start, best) = outcomes
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &Outcome)>, (i, o)| match acc {
            Some((_, b)) if b.area <= o.area => acc,
            _ => Some((i, o)),
        })
        .unwrap();
    let poly = best.caps.to_polygon(*m, lambda)?;
    let best_area = poly.area()?;
    let best_deficit = best_area - lune_area(l0.min(lmax), lambda, m)?;
    let final_arcs = poly.arcs().len();
    let big = poly.arcs().iter().filter(|a| a.extent >= NEGLIGIBLE_EXTENT).count();
    let report = OptimizerReport {
        best_deficit,
        l0,
        n_arcs,
        seed,
        iterations,
        converged_to_lune: best_deficit < LUNE_DEFICIT && big <= 2,
        best_area,
        final_arcs,
        best_start,
    };
    Ok((poly, report))
}
