use super::*;
use crate::curve::ArcPolygon;
use crate::extremal::{lune_area, make_lune, LuneSpec};
use crate::sphere::{Metric, SpherePoint};
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

fn st(x1: f64, x2: f64, u: f64) -> ControlState {
    ControlState { t: 0.0, x1, x2, u }
}

fn adj(p1: f64, p2: f64, lambda0: f64, lambda1: f64) -> AdjointState {
    AdjointState { p1, p2, lambda0, lambda1 }
}

#[test]
fn pointwise_examples() {
    assert_eq!(dynamics(&st(0.0, 0.0, 1.0)), (0.0, 1.0));
    let (_, d2) = dynamics(&st(1.0, 1.0, 1.0));
    assert!((d2 - (1.5f64.powf(1.5) - 1.0)).abs() < 1e-15);
    let (a, l) = integrands(&st(0.0, 0.0, 1.0));
    assert_eq!((a, l), (0.0, 1.0));
    let p = pontryagin_h(&st(1.0, 0.0, 1.0), &adj(0.0, 0.0, 1.0, 0.0));
    assert!((p.h + 1.0 - SQRT_2 / 2.0).abs() < 1e-15);
    assert_eq!(bang_bang_control(0.3, 0.7), 1.0);
    assert_eq!(bang_bang_control(-0.3, 0.7), 0.0);
    assert_eq!(bang_bang_control(0.0, 0.7), 0.7);
    assert_eq!(legendre_clebsch_value(0.0, 0.0), 1.0);
    assert!(singular_adjoint(&st(0.3, 0.1, 0.5), 0.0, 0.0).is_err());
}

/// Central differences of `H` in `u`, `x1` and `x2`.
fn fd(s: ControlState, a: AdjointState) -> (f64, f64, f64) {
    let e = 1e-6;
    let h = |s: ControlState| pontryagin_h(&s, &a).h;
    let du = (h(ControlState { u: s.u + e, ..s }) - h(ControlState { u: s.u - e, ..s })) / (2.0 * e);
    let d1 = (h(ControlState { x1: s.x1 + e, ..s }) - h(ControlState { x1: s.x1 - e, ..s })) / (2.0 * e);
    let d2 = (h(ControlState { x2: s.x2 + e, ..s }) - h(ControlState { x2: s.x2 - e, ..s })) / (2.0 * e);
    (du, d1, d2)
}

#[test]
fn switching_function_and_adjoint_are_derivatives_of_h() {
    for &(x1, x2, u, p1, p2, l0, l1) in &[
        (0.3, -0.2, 0.7, 0.4, -1.1, 1.0, 0.6),
        (1.5, 0.9, 0.0, -0.3, 0.2, 1.0, -0.4),
        (0.0, 1.2, 1.0, 2.0, 0.5, 0.0, 1.0),
    ] {
        let (s, a) = (st(x1, x2, u), adj(p1, p2, l0, l1));
        let (du, d1, d2) = fd(s, a);
        assert!((du - pontryagin_h(&s, &a).h1).abs() < 1e-8);
        let (q1, q2) = adjoint_rhs(&s, &a);
        assert!((q1 + d1).abs() < 1e-7, "{q1} {d1}");
        assert!((q2 + d2).abs() < 1e-7, "{q2} {d2}");
    }
}

#[test]
fn singular_adjoint_kills_h1_and_its_derivative() {
    for &(x1, x2, l1) in &[(0.3, 0.1, 0.6), (1.0, -0.5, 0.2), (0.0, 0.0, 1.0)] {
        let (p1, p2) = singular_adjoint(&st(x1, x2, 0.0), l1, 1.0).unwrap();
        let a = adj(p1, p2, 1.0, l1);
        assert!(pontryagin_h(&st(x1, x2, 0.0), &a).h1.abs() < 1e-14);
        // dH1/dt along any control vanishes; test by a short step with u = λ1
        let u = 0.37;
        let s = st(x1, x2, u);
        let (dx1, dx2) = dynamics(&s);
        let (dp1, dp2) = adjoint_rhs(&s, &a);
        let e = 1e-6;
        let moved = st(x1 + e * dx1, x2 + e * dx2, u);
        let ma = adj(p1 + e * dp1, p2 + e * dp2, 1.0, l1);
        let back = st(x1 - e * dx1, x2 - e * dx2, u);
        let ba = adj(p1 - e * dp1, p2 - e * dp2, 1.0, l1);
        let dh1 = (pontryagin_h(&moved, &ma).h1 - pontryagin_h(&back, &ba).h1) / (2.0 * e);
        assert!(dh1.abs() < 1e-7, "{dh1}");
    }
}

#[test]
fn legendre_clebsch_is_positive() {
    for i in -20..=20 {
        for j in -20..=20 {
            assert!(legendre_clebsch_value(i as f64 * 0.25, j as f64 * 0.25) > 0.0);
        }
    }
}

#[test]
fn schedule_validation() {
    assert!(Schedule::new(vec![1.0], vec![1.0]).is_err());
    assert!(Schedule::new(vec![2.0, 1.0], vec![1.0, 0.0, 1.0]).is_err());
    assert!(Schedule::new(vec![7.0], vec![1.0, 0.0]).is_err());
    assert!(Schedule::new(vec![1.0], vec![1.0, -0.1]).is_err());
}

#[test]
fn circle_trajectory() {
    let tr = integrate_trajectory(&Schedule::constant(1.0), (1.0, 0.0), PI * SQRT_2).unwrap();
    assert!(tr.periodicity_gap < 1e-12);
    assert!(tr.constraint_gap.abs() < 1e-10);
    assert!((tr.objective - (TAU - PI * SQRT_2)).abs() < 1e-10);
    assert!(tr.states.iter().all(|s| (s.x1 - 1.0).abs() < 1e-12));
}

#[test]
fn zero_control_is_a_point_on_the_pole() {
    let tr = integrate_trajectory(&Schedule::constant(0.0), (0.0, 0.0), 0.0).unwrap();
    assert_eq!(tr.objective, 0.0);
    assert_eq!(tr.length, 0.0);
}

#[test]
fn blow_up_is_reported() {
    // a large state rotates, but a large control pushes it out
    let r = integrate_trajectory(&Schedule::constant(1e6), (1e5, 0.0), 1.0);
    assert!(matches!(r, Err(Error::BlowUp(_))));
}

#[test]
fn lune_trajectory_reproduces_area() {
    let m = Metric::unit();
    for l in [2.0, 3.0, 4.0] {
        let lune = make_lune(&LuneSpec::new(m, 1.0, l).unwrap()).unwrap();
        let tr = trajectory_of(&lune).unwrap();
        assert_eq!(tr.schedule.switch_times.len(), 4);
        assert!(tr.periodicity_gap < 1e-9, "{}", tr.periodicity_gap);
        assert!(tr.constraint_gap.abs() < 1e-9);
        assert!((tr.objective - lune_area(l, 1.0, &m).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn lune_at_three_matches_reference() {
    // reference values from an independent shooting computation
    let lune = make_lune(&LuneSpec::new(Metric::unit(), 1.0, 3.0).unwrap()).unwrap();
    let tr = trajectory_of(&lune).unwrap();
    assert!((tr.x0.0 - 0.34381863871458873).abs() < 1e-12);
    assert!(tr.x0.1.abs() < 1e-12);
    let tb = tr.schedule.switch_times[0];
    assert!((tb - 0.7826).abs() < 1e-4);
    let expect = [tb, PI - tb, PI + tb, TAU - tb];
    for (a, b) in tr.schedule.switch_times.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((tr.objective - 0.605517758418899).abs() < 1e-9);
}

#[test]
fn lune_satisfies_the_maximum_principle() {
    let lune = make_lune(&LuneSpec::new(Metric::unit(), 1.0, 3.0).unwrap()).unwrap();
    let tr = trajectory_of(&lune).unwrap();
    let (rep, path) = verify_pmp(&tr).unwrap();
    assert!(rep.consistent, "{rep:?}");
    assert!(rep.max_abs_h1_at_switches < 1e-6);
    assert!(rep.min_sign_margin > 0.0);
    assert!(rep.hamiltonian_drift < 1e-8, "{}", rep.hamiltonian_drift);
    assert!((rep.lambda1 - 0.6149).abs() < 1e-3, "{}", rep.lambda1);
    assert_eq!(path.h1.len(), tr.states.len());
    assert_eq!(rep.closed_loop_switches.len(), 4);
    for (a, b) in rep.closed_loop_switches.iter().zip(&tr.schedule.switch_times) {
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }
}

#[test]
fn circle_satisfies_the_maximum_principle() {
    let c = ArcPolygon::circle(Metric::unit(), 1.0, SpherePoint { t: 0.0, theta: 0.0 }).unwrap();
    let (rep, _) = verify_pmp(&trajectory_of(&c).unwrap()).unwrap();
    assert!(rep.consistent, "{rep:?}");
}

/// Arcs of curvature one joining vertices at distance `rho` from the pole
/// at the given azimuths.
fn three_arcs(rho: f64, azimuths: [f64; 3]) -> ArcPolygon {
    use crate::curve::piecewise::{Loop, Piece};
    let r = FRAC_PI_4;
    let verts: Vec<_> = azimuths.iter().map(|a| crate::sphere::polar_vec(rho, *a)).collect();
    let pieces = (0..3)
        .map(|k| {
            let (p, q) = (verts[k], verts[(k + 1) % 3]);
            let mid = (p + q).normalize();
            let w = p.cross(&q).normalize();
            let a = (r.cos() / mid.dot(&p)).acos();
            let c = mid * a.cos() + w * a.sin();
            Piece::from_endpoints(c, r, &p, &q, false)
        })
        .collect();
    ArcPolygon::from_loop(Metric::unit(), 1.0, &Loop { pieces }).unwrap()
}

#[test]
fn regular_three_arc_polygon_is_a_non_optimal_extremal() {
    // the maximum principle is only necessary: the symmetric three-arc
    // polygon passes it although its area exceeds the lune's
    let poly = three_arcs(0.3, [0.0, TAU / 3.0, 2.0 * TAU / 3.0]);
    let tr = trajectory_of(&poly).unwrap();
    let (rep, _) = verify_pmp(&tr).unwrap();
    assert!(rep.consistent, "{rep:?}");
    let m = Metric::unit();
    assert!(tr.objective > lune_area(m.length_to_unit(poly.length()), 1.0, &m).unwrap() + 1e-3);
}

#[test]
fn perturbed_schedule_is_flagged() {
    let poly = three_arcs(0.3, [0.0, 2.0, 4.3]);
    let tr = trajectory_of(&poly).unwrap();
    assert!(tr.periodicity_gap < 1e-9 && tr.constraint_gap.abs() < 1e-9);
    let (rep, _) = verify_pmp(&tr).unwrap();
    assert!(!rep.consistent, "{rep:?}");
}
