//! Area minimization at fixed length as an optimal-control problem.
//!
//! On the unit sphere with `λ = 1` the state is the contact radius
//! `x1 = g(θ)` and its derivative `x2 = g'(θ)`; the control is the
//! curvature radius `u = R(θ) ∈ [0, u_max]` (`u_max = 1` for `λ = k1`).
//! The system is
//!
//! ```text
//! x1' = x2,   x2' = u·W^{3/2} − x1,   W = (1+x1²+x2²)/(1+x1²),
//! ```
//!
//! the length is `∫ u·w dθ` and the area `∫ (1 − w) dθ` with
//! `w = √(1+x1²+x2²)/(1+x1²)`. The Pontryagin function
//! `H = p1 x2 + p2 (u W^{3/2} − x1) + λ1 u w − λ0 (1 − w)` is affine in
//! `u` with switching function `H1 = λ1 w + p2 W^{3/2}`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curve::ArcPolygon;
use crate::error::{domain, Error, Result};

/// A point of the state trajectory with the control applied there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlState {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub u: f64,
}

/// Adjoint variables and multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointState {
    pub p1: f64,
    pub p2: f64,
    pub lambda0: f64,
    pub lambda1: f64,
}

/// Value of the Pontryagin function and its switching part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pontryagin {
    pub h: f64,
    pub h1: f64,
}

struct Terms {
    /// `1 + x1²`
    q: f64,
    /// `√(1+x1²+x2²)`
    s: f64,
    /// `W^{3/2}`
    w32: f64,
    /// `w`
    w: f64,
}

fn terms(x1: f64, x2: f64) -> Terms {
    let q = 1.0 + x1 * x1;
    let s = (q + x2 * x2).sqrt();
    Terms { q, s, w32: (s / q.sqrt()).powi(3), w: s / q }
}

/// Right-hand side of the state equations.
pub fn dynamics(s: &ControlState) -> (f64, f64) {
    let tm = terms(s.x1, s.x2);
    (s.x2, s.u * tm.w32 - s.x1)
}

/// Rates of the area and length integrals, `(1 − w, u·w)`.
pub fn integrands(s: &ControlState) -> (f64, f64) {
    let w = terms(s.x1, s.x2).w;
    (1.0 - w, s.u * w)
}

pub fn pontryagin_h(s: &ControlState, a: &AdjointState) -> Pontryagin {
    let tm = terms(s.x1, s.x2);
    let h1 = a.lambda1 * tm.w + a.p2 * tm.w32;
    let h = a.p1 * s.x2 + a.p2 * (s.u * tm.w32 - s.x1) + a.lambda1 * s.u * tm.w
        - a.lambda0 * (1.0 - tm.w);
    Pontryagin { h, h1 }
}

/// `(p1', p2') = −∂H/∂x`.
pub fn adjoint_rhs(s: &ControlState, a: &AdjointState) -> (f64, f64) {
    let Terms { q, s: sq, .. } = terms(s.x1, s.x2);
    let (x1, x2, u) = (s.x1, s.x2, s.u);
    let mult = a.lambda0 + a.lambda1 * u;
    let dp1 = a.p2 * (1.0 + 3.0 * u * x1 * x2 * x2 * sq / q.powf(2.5))
        + x1 * mult * (1.0 + x1 * x1 + 2.0 * x2 * x2) / (q * q * sq);
    let dp2 = -a.p1 - a.p2 * 3.0 * u * x2 * sq / q.powf(1.5) - x2 * mult / (q * sq);
    (dp1, dp2)
}

/// Maximizing control: `u_max` where `H1 > 0`, `0` where `H1 < 0` and
/// `λ1` on `H1 = 0`.
pub fn bang_bang_control(h1: f64, lambda1: f64) -> f64 {
    bang_bang_control_to(h1, lambda1, 1.0)
}

/// [`bang_bang_control`] with upper bound `u_max`.
pub fn bang_bang_control_to(h1: f64, lambda1: f64, u_max: f64) -> f64 {
    if h1 > 0.0 {
        u_max
    } else if h1 < 0.0 {
        0.0
    } else {
        lambda1
    }
}

/// Adjoint values that make `H1` vanish identically along a singular arc:
/// `p2 = −λ1 √(1+x1²)/(1+x1²+x2²)` and
/// `p1 = x2 (λ1 x1 √(1+x1²) − λ0 √(1+x1²+x2²)) / ((1+x1²)(1+x1²+x2²))`.
pub fn singular_adjoint(s: &ControlState, lambda1: f64, lambda0: f64) -> Result<(f64, f64)> {
    if lambda0 == 0.0 && lambda1 == 0.0 {
        return domain("λ0 = λ1 = 0 forces p = 0, violating non-triviality");
    }
    let Terms { q, s: sq, .. } = terms(s.x1, s.x2);
    let s2 = sq * sq;
    let p2 = -lambda1 * q.sqrt() / s2;
    let p1 = s.x2 * (lambda1 * s.x1 * q.sqrt() - lambda0 * sq) / (q * s2);
    Ok((p1, p2))
}

/// `−∂/∂u (d²H1/dt²) = (1+x1²+x2²)^{3/2}/(1+x1²)³`.
pub fn legendre_clebsch_value(x1: f64, x2: f64) -> f64 {
    let Terms { q, s, .. } = terms(x1, x2);
    s.powi(3) / q.powi(3)
}

/// Piecewise-constant control on `[0, 2π]`: `values[i]` applies between
/// `switch_times[i-1]` and `switch_times[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub switch_times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Schedule {
    pub fn constant(u: f64) -> Self {
        Self { switch_times: vec![], values: vec![u] }
    }

    pub fn new(switch_times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != switch_times.len() + 1 {
            return domain("a schedule needs one more value than switch times");
        }
        let sorted = switch_times.windows(2).all(|w| w[0] < w[1]);
        let inside = switch_times.iter().all(|t| *t > 0.0 && *t < TAU);
        if !sorted || !inside {
            return domain("switch times must increase strictly inside (0, 2π)");
        }
        if values.iter().any(|u| !(u.is_finite() && *u >= 0.0)) {
            return domain("control values must be finite and nonnegative");
        }
        Ok(Self { switch_times, values })
    }

    /// Largest control value.
    pub fn u_max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Control on the interval `k` (between switches `k-1` and `k`).
    fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Interval boundaries `0, t_1, …, t_m, 2π`.
    fn knots(&self) -> Vec<f64> {
        let mut k = vec![0.0];
        k.extend(&self.switch_times);
        k.push(TAU);
        k
    }

    /// Schedule and initial state `(g(0), g'(0))` of an arc polygon on the
    /// unit sphere: `u = tan r` on an arc of radius `r`, `0` on a vertex.
    pub fn from_polygon(poly: &ArcPolygon) -> Result<(Self, (f64, f64))> {
        let lp = poly.to_loop()?;
        let chart = lp.chart()?;
        let v0 = chart.eval(0.0);
        let mut starts: Vec<(f64, f64)> = (0..lp.pieces.len())
            .filter(|&k| chart.widths[k] > 0.0)
            .map(|k| {
                let p = &lp.pieces[k];
                let u = if p.is_vertex() { 0.0 } else { p.r.tan() };
                let t = (chart.origin + chart.offsets[k]).rem_euclid(TAU);
                (if t > TAU - 1e-12 { 0.0 } else { t }, u)
            })
            .collect();
        starts.sort_by(|a, b| a.0.total_cmp(&b.0));
        // the interval covering θ = 0 started last, unless one starts at 0
        let first = if starts[0].0 < 1e-12 { starts[0].1 } else { starts.last().unwrap().1 };
        let mut switch_times = vec![];
        let mut values = vec![first];
        for (t, u) in starts.into_iter().filter(|(t, _)| *t >= 1e-12) {
            if (u - values.last().unwrap()).abs() > 1e-12 {
                switch_times.push(t);
                values.push(u);
            }
        }
        Ok((Self::new(switch_times, values)?, (v0.g, v0.dg)))
    }
}

/// Number of fixed RK4 steps over a full turn.
pub const STEPS: usize = 1 << 16;

/// State trajectory under a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlTrajectory {
    pub schedule: Schedule,
    pub x0: (f64, f64),
    pub l0: f64,
    pub states: Vec<ControlState>,
    /// `∫ (1 − w) dθ`
    pub objective: f64,
    /// `∫ u·w dθ`
    pub length: f64,
    /// `|x(2π) − x(0)|`
    pub periodicity_gap: f64,
    /// `length − l0`
    pub constraint_gap: f64,
}

/// Dimension of the state vector used during integration: state, the two
/// integrals, and four adjoint basis solutions.
const DIM: usize = 12;
type Y = [f64; DIM];

/// Multipliers `(λ0, λ1)` of the four adjoint basis solutions.
const BASIS: [(f64, f64); 4] = [(0.0, 0.0), (0.0, 0.0), (0.0, 1.0), (1.0, 0.0)];

fn rhs(y: &Y, u: f64, with_adjoint: bool) -> Y {
    let s = ControlState { t: 0.0, x1: y[0], x2: y[1], u };
    let (d1, d2) = dynamics(&s);
    let (da, dl) = integrands(&s);
    let mut out = [0.0; DIM];
    out[0] = d1;
    out[1] = d2;
    out[2] = da;
    out[3] = dl;
    if with_adjoint {
        for (b, (l0, l1)) in BASIS.iter().enumerate() {
            let a = AdjointState { p1: y[4 + 2 * b], p2: y[5 + 2 * b], lambda0: *l0, lambda1: *l1 };
            let (q1, q2) = adjoint_rhs(&s, &a);
            out[4 + 2 * b] = q1;
            out[5 + 2 * b] = q2;
        }
    }
    out
}

fn rk4(y: &Y, u: f64, dt: f64, with_adjoint: bool) -> Y {
    let add = |a: &Y, b: &Y, c: f64| {
        let mut r = *a;
        for i in 0..DIM {
            r[i] += c * b[i];
        }
        r
    };
    let k1 = rhs(y, u, with_adjoint);
    let k2 = rhs(&add(y, &k1, dt / 2.0), u, with_adjoint);
    let k3 = rhs(&add(y, &k2, dt / 2.0), u, with_adjoint);
    let k4 = rhs(&add(y, &k3, dt), u, with_adjoint);
    let mut r = *y;
    for i in 0..DIM {
        r[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    r
}

fn check_finite(y: &Y, t: f64) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) || y[0].abs() > 1e6 || y[1].abs() > 1e6 {
        return Err(Error::BlowUp(format!("state left the admissible region at θ = {t}")));
    }
    Ok(())
}

/// Integrates the state (and optionally the adjoint basis) over `[0, 2π]`
/// with fixed RK4 steps, splitting steps exactly at switch times. Calls
/// `visit(t, u, y)` at every grid point, with the control of the interval
/// that starts there.
fn sweep(schedule: &Schedule, y0: Y, with_adjoint: bool, mut visit: impl FnMut(f64, f64, &Y)) -> Result<Y> {
    let h = TAU / STEPS as f64;
    let knots = schedule.knots();
    let mut y = y0;
    for k in 0..knots.len() - 1 {
        let (a, b) = (knots[k], knots[k + 1]);
        let u = schedule.value(k);
        // grid points strictly inside (a, b), then b
        let first = (a / h).floor() as usize + 1;
        let mut t = a;
        for i in first.. {
            let next = i as f64 * h;
            let next = if next > b - 1e-13 { b } else { next };
            visit(t, u, &y);
            y = rk4(&y, u, next - t, with_adjoint);
            check_finite(&y, next)?;
            t = next;
            if next == b {
                break;
            }
        }
    }
    Ok(y)
}

/// Integrates the system under `schedule` from `x0`.
pub fn integrate_trajectory(schedule: &Schedule, x0: (f64, f64), l0: f64) -> Result<ControlTrajectory> {
    if !(x0.0.is_finite() && x0.1.is_finite()) {
        return domain("initial state must be finite");
    }
    let mut y0 = [0.0; DIM];
    y0[0] = x0.0;
    y0[1] = x0.1;
    let mut states = Vec::with_capacity(STEPS + 2 * schedule.switch_times.len() + 1);
    let yf = sweep(schedule, y0, false, |t, u, y| {
        states.push(ControlState { t, x1: y[0], x2: y[1], u })
    })?;
    states.push(ControlState { t: TAU, x1: yf[0], x2: yf[1], u: *schedule.values.last().unwrap() });
    Ok(ControlTrajectory {
        schedule: schedule.clone(),
        x0,
        l0,
        states,
        objective: yf[2],
        length: yf[3],
        periodicity_gap: (yf[0] - x0.0).hypot(yf[1] - x0.1),
        constraint_gap: yf[3] - l0,
    })
}

/// Trajectory of an arc polygon whose arcs have curvature radius at most
/// one on the unit sphere.
pub fn trajectory_of(poly: &ArcPolygon) -> Result<ControlTrajectory> {
    let m = poly.metric();
    let (schedule, x0) = Schedule::from_polygon(poly)?;
    integrate_trajectory(&schedule, x0, m.length_to_unit(poly.length()))
}

/// Outcome of the adjoint fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmpReport {
    pub consistent: bool,
    pub p1_0: f64,
    pub p2_0: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    /// Largest `|H1|` at the switch times.
    pub max_abs_h1_at_switches: f64,
    /// `|p(2π) − p(0)|`
    pub adjoint_periodicity_gap: f64,
    /// Smallest `H1·sign(u − u_max/2)` away from the switches; positive
    /// when the control maximizes `H`.
    pub min_sign_margin: f64,
    pub sign_violations: usize,
    /// `max H − min H` along the trajectory.
    pub hamiltonian_drift: f64,
    /// Switch times found by re-integrating with `u = argmax H`.
    pub closed_loop_switches: Vec<f64>,
    pub state_periodicity_gap: f64,
    pub constraint_gap: f64,
}

/// Adjoint along the trajectory, aligned with `ControlTrajectory::states`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointPath {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub h1: Vec<f64>,
}

/// Tolerance on `|H1|` at switches and on periodicity of the adjoint.
pub const PMP_TOL: f64 = 1e-6;

/// Distance from a switch inside which the sign of `H1` is not checked.
const SIGN_GUARD: f64 = 1e-2;

/// Integrates the four adjoint basis solutions along the schedule.
fn adjoint_basis(traj: &ControlTrajectory) -> Result<(Vec<Y>, Y)> {
    let mut y0 = [0.0; DIM];
    y0[0] = traj.x0.0;
    y0[1] = traj.x0.1;
    y0[4] = 1.0; // p1(0) = 1
    y0[7] = 1.0; // p2(0) = 1
    let mut path = Vec::with_capacity(traj.states.len());
    let yf = sweep(&traj.schedule, y0, true, |_, _, y| path.push(*y))?;
    path.push(yf);
    Ok((path, yf))
}

/// `(p1, p2)` of the combination `z = (p1(0), p2(0), λ1)` with `λ0 = 1`.
fn combine(y: &Y, z: &[f64; 3]) -> (f64, f64) {
    let p1 = z[0] * y[4] + z[1] * y[6] + z[2] * y[8] + y[10];
    let p2 = z[0] * y[5] + z[1] * y[7] + z[2] * y[9] + y[11];
    (p1, p2)
}

/// Coefficients of `H1` in `(z, 1)` at a state.
fn h1_row(y: &Y) -> [f64; 4] {
    let tm = terms(y[0], y[1]);
    // H1 = λ1 w + p2 W^{3/2}
    [tm.w32 * y[5], tm.w32 * y[7], tm.w + tm.w32 * y[9], tm.w32 * y[11]]
}

/// Fits the normal (`λ0 = 1`) adjoint to a trajectory and checks the
/// maximum condition.
///
/// The adjoint is affine in `z = (p1(0), p2(0), λ1)`, so the conditions
/// `H1(t_k) = 0` at every switch and `p(2π) = p(0)` form a linear
/// least-squares problem. When they leave a direction free (no switches)
/// the free parameter is chosen to maximize the smallest sign margin.
pub fn verify_pmp(traj: &ControlTrajectory) -> Result<(PmpReport, AdjointPath)> {
    let (path, yf) = adjoint_basis(traj)?;
    let mut rows: Vec<[f64; 4]> = vec![];
    for (i, s) in traj.states.iter().enumerate() {
        if traj.schedule.switch_times.iter().any(|t| (s.t - t).abs() < 1e-14) {
            rows.push(h1_row(&path[i]));
        }
    }
    // p(2π) − p(0) = 0
    rows.push([yf[4] - 1.0, yf[6], yf[8], yf[10]]);
    rows.push([yf[5], yf[7] - 1.0, yf[9], yf[11]]);
    let a = DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let b = DVector::from_fn(rows.len(), |i, _| -rows[i][3]);
    let svd = a.clone().svd(true, true);
    let rank_tol = 1e-9 * svd.singular_values.max().max(1.0);
    let sol = svd.solve(&b, rank_tol).map_err(|e| Error::Domain(e.to_string()))?;
    let mut z = [sol[0], sol[1], sol[2]];
    let u_max = traj.schedule.u_max();
    let margin_of = |z: &[f64; 3]| -> (f64, usize) {
        let mut min = f64::INFINITY;
        let mut bad = 0;
        for (i, s) in traj.states.iter().enumerate() {
            let near = traj.schedule.switch_times.iter().any(|t| (s.t - t).abs() < SIGN_GUARD);
            if near || i + 1 == traj.states.len() {
                continue;
            }
            let r = h1_row(&path[i]);
            let h1 = r[0] * z[0] + r[1] * z[1] + r[2] * z[2] + r[3];
            let sign = if s.u >= 0.5 * u_max && u_max > 0.0 { 1.0 } else { -1.0 };
            let m = sign * h1;
            if m <= 0.0 {
                bad += 1;
            }
            min = min.min(m);
        }
        (min, bad)
    };
    // free directions of the fit
    let eig = (a.transpose() * &a).symmetric_eigen();
    let null: Vec<DVector<f64>> = (0..3)
        .filter(|&k| eig.eigenvalues[k].abs() <= rank_tol * rank_tol)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    if !null.is_empty() {
        let base = z;
        let shifted = |c: &[f64]| {
            let mut zz = base;
            for (n, s) in null.iter().zip(c) {
                for i in 0..3 {
                    zz[i] += s * n[i];
                }
            }
            zz
        };
        let best = compass_max(|c| margin_of(&shifted(c)).0, null.len(), NULL_BOX);
        z = shifted(&best);
    }
    let residual = |r: &[f64; 4]| r[0] * z[0] + r[1] * z[1] + r[2] * z[2] + r[3];
    let n_sw = rows.len() - 2;
    let max_abs_h1_at_switches = rows[..n_sw].iter().map(|r| residual(r).abs()).fold(0.0, f64::max);
    let adjoint_periodicity_gap = residual(&rows[n_sw]).hypot(residual(&rows[n_sw + 1]));
    let (min_sign_margin, sign_violations) = margin_of(&z);

    let mut p1 = Vec::with_capacity(path.len());
    let mut p2 = Vec::with_capacity(path.len());
    let mut h1 = Vec::with_capacity(path.len());
    let (mut hmin, mut hmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (s, y) in traj.states.iter().zip(&path) {
        let (q1, q2) = combine(y, &z);
        let adj = AdjointState { p1: q1, p2: q2, lambda0: 1.0, lambda1: z[2] };
        let st = ControlState { x1: y[0], x2: y[1], ..*s };
        let pv = pontryagin_h(&st, &adj);
        hmin = hmin.min(pv.h);
        hmax = hmax.max(pv.h);
        p1.push(q1);
        p2.push(q2);
        h1.push(pv.h1);
    }
    let closed_loop_switches = closed_loop(traj, &z, u_max)?;
    let consistent = max_abs_h1_at_switches < PMP_TOL
        && adjoint_periodicity_gap < PMP_TOL
        && sign_violations == 0
        && traj.periodicity_gap < PMP_TOL
        && traj.constraint_gap.abs() < PMP_TOL;
    let report = PmpReport {
        consistent,
        p1_0: z[0],
        p2_0: z[1],
        lambda0: 1.0,
        lambda1: z[2],
        max_abs_h1_at_switches,
        adjoint_periodicity_gap,
        min_sign_margin,
        sign_violations,
        hamiltonian_drift: hmax - hmin,
        closed_loop_switches,
        state_periodicity_gap: traj.periodicity_gap,
        constraint_gap: traj.constraint_gap,
    };
    Ok((report, AdjointPath { p1, p2, h1 }))
}

/// Half-width of the box searched along free directions of the fit.
const NULL_BOX: f64 = 100.0;

/// Maximizes a concave function of `dim ≤ 3` variables over the box
/// `[−bound, bound]^dim` by a coarse grid followed by compass search over
/// all `3^dim − 1` lattice directions.
fn compass_max(f: impl Fn(&[f64]) -> f64, dim: usize, bound: f64) -> Vec<f64> {
    let lattice = |levels: &[f64]| -> Vec<Vec<f64>> {
        let mut pts = vec![vec![]];
        for _ in 0..dim {
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<f64>| {
                    levels.iter().map(move |l| {
                        let mut q = p.clone();
                        q.push(*l);
                        q
                    })
                })
                .collect();
        }
        pts
    };
    let grid: Vec<f64> = (-4..=4).map(|k| bound * k as f64 / 4.0).collect();
    let dirs: Vec<Vec<f64>> = lattice(&[-1.0, 0.0, 1.0])
        .into_iter()
        .filter(|d| d.iter().any(|x| *x != 0.0))
        .collect();
    let (mut x, mut fx) = lattice(&grid)
        .into_iter()
        .map(|p| {
            let v = f(&p);
            (p, v)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let mut step = bound / 8.0;
    while step > 1e-10 {
        let best = dirs
            .iter()
            .map(|d| {
                let p: Vec<f64> = x.iter().zip(d).map(|(a, b)| (a + step * b).clamp(-bound, bound)).collect();
                let v = f(&p);
                (p, v)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best.1 > fx {
            (x, fx) = best;
        } else {
            step /= 2.0;
        }
    }
    x
}

/// Re-integrates state and adjoint with the control chosen by the sign of
/// `H1`, locating sign changes by bisection on the step length.
fn closed_loop(traj: &ControlTrajectory, z: &[f64; 3], u_max: f64) -> Result<Vec<f64>> {
    let mut y = [0.0; DIM];
    y[0] = traj.x0.0;
    y[1] = traj.x0.1;
    y[4] = 1.0;
    y[7] = 1.0;
    let h1_of = |y: &Y| {
        let r = h1_row(y);
        r[0] * z[0] + r[1] * z[1] + r[2] * z[2] + r[3]
    };
    let control = |y: &Y| bang_bang_control_to(h1_of(y), z[2], u_max);
    let h = TAU / STEPS as f64;
    let mut t = 0.0;
    let mut u = control(&y);
    let mut found = vec![];
    while t < TAU - 1e-15 {
        let dt = h.min(TAU - t);
        let next = rk4(&y, u, dt, true);
        check_finite(&next, t + dt)?;
        let sign0 = h1_of(&y);
        let sign1 = h1_of(&next);
        if sign0 != 0.0 && sign0.signum() != sign1.signum() {
            let (mut lo, mut hi) = (0.0, dt);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let ym = rk4(&y, u, mid, true);
                if h1_of(&ym).signum() == sign0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let ts = t + hi;
            y = rk4(&y, u, hi, true);
            t = ts;
            found.push(ts);
            u = if sign1 > 0.0 { u_max } else { 0.0 };
            continue;
        }
        y = next;
        t += dt;
        u = if sign1 == 0.0 { u } else { control(&y) };
    }
    Ok(found)
}

#[cfg(test)]
mod tests;
