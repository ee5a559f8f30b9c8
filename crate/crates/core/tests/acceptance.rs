//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI, TAU};
use std::time::Instant;

use lambda_convex::control::{
    adjoint_rhs, integrate_trajectory, legendre_clebsch_value, pontryagin_h, trajectory_of, verify_pmp, AdjointState,
    ControlState, Schedule,
};
use lambda_convex::duality::{polar_dual, polar_dual_arcs};
use lambda_convex::extremal::{
    euclid_lower_bound, euclid_upper_bound, lower_bound_deficit, lune_area, lune_max_length, make_lune, make_racetrack,
    upper_bound_rhs, upper_bound_slack, LuneSpec,
};
use lambda_convex::optimizer::{
    deform_to_lune, minimize_area, random_polygon, random_polygons, random_symmetric_polygon, DEFAULT_STEP,
};
use lambda_convex::par::Exec;
use lambda_convex::{ArcPolygon, Curve, Metric, SupportCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = (bool, String);

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// 2–6 arcs, cycling, each from its own stream.
fn mixed_polygons(count: usize, lambda: f64, m: &Metric, seed: u64) -> Vec<ArcPolygon> {
    let per = count / 5;
    (2..=6)
        .flat_map(|n| random_polygons(per, n, lambda, m, seed + n as u64, Exec::default()).unwrap())
        .collect()
}

fn circles() -> Verdict {
    let start = Instant::now();
    let m = Metric::unit();
    let mut worst = 0.0f64;
    for rho in [FRAC_PI_8, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3 * 0.9] {
        let c = SupportCurve::from_fn(m, 1.0 / rho.tan(), 4096, |_| rho).unwrap();
        worst = worst.max((c.length().unwrap() - TAU * rho.sin()).abs());
        worst = worst.max((c.area().unwrap() - TAU * (1.0 - rho.cos())).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    (worst < 1e-8 && secs < 1.0, format!("max error {worst:.2e}, {secs:.3} s"))
}

fn lune_oracle() -> Verdict {
    let mut worst = 0.0f64;
    let mut min_second = f64::INFINITY;
    for (lambda, k1) in [(1.0, 1.0), (2.0, 0.5)] {
        let m = Metric::new(k1).unwrap();
        let lmax = lune_max_length(lambda, &m);
        for i in 1..=50 {
            let l = lmax * i as f64 / 51.0;
            let lune = make_lune(&LuneSpec::new(m, lambda, l).unwrap()).unwrap();
            let exact = lune_area(l, lambda, &m).unwrap();
            // Gauss–Bonnet on the arcs and quadrature of the support function
            worst = worst.max((lune.area().unwrap() - exact).abs());
            worst = worst.max((lune.support(4096).unwrap().area().unwrap() - exact).abs());
        }
        let n = 1000;
        let a: Vec<f64> = (1..=n).map(|i| lune_area(lmax * i as f64 / (n + 1) as f64, lambda, &m).unwrap()).collect();
        for w in a.windows(3) {
            min_second = min_second.min(w[0] - 2.0 * w[1] + w[2]);
        }
    }
    (
        worst < 1e-6 && min_second > 0.0,
        format!("max |area − Ã| {worst:.2e}, min second difference {min_second:.2e}"),
    )
}

fn sharpness() -> Verdict {
    let start = Instant::now();
    let m = Metric::unit();
    let polys = mixed_polygons(1000, 1.0, &m, 2024);
    let min_deficit = polys
        .iter()
        .map(|p| lower_bound_deficit(&p.clone().into()).unwrap())
        .fold(f64::INFINITY, f64::min);
    let lmax = lune_max_length(1.0, &m);
    let lune_deficit = (1..=50)
        .map(|i| {
            let lune = make_lune(&LuneSpec::new(m, 1.0, lmax * i as f64 / 51.0).unwrap()).unwrap();
            lower_bound_deficit(&lune.into()).unwrap().abs()
        })
        .fold(0.0, f64::max);
    let mut opt = vec![];
    for n in [4, 6] {
        for l0 in [2.0, 3.0] {
            let (_, rep) = minimize_area(&m, 1.0, n, l0, 7, 200, 32, Exec::default()).unwrap();
            opt.push(rep.best_deficit);
        }
    }
    let opt_worst = opt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let secs = start.elapsed().as_secs_f64();
    (
        polys.len() == 1000 && min_deficit >= -1e-8 && lune_deficit < 1e-6 && opt_worst < 1e-4 && secs < 120.0,
        format!(
            "min random deficit {min_deficit:.2e}, max lune |deficit| {lune_deficit:.2e}, \
             optimizer deficits {opt:?}, {secs:.1} s"
        ),
    )
}

fn duality() -> Verdict {
    let mut worst_id = 0.0f64;
    let mut worst_dd = 0.0f64;
    for (k1, lambda, seed) in [(1.0, 1.0, 11), (0.5, 2.0, 12)] {
        let m = Metric::new(k1).unwrap();
        for p in mixed_polygons(50, lambda, &m, seed) {
            let d = polar_dual_arcs(&p).unwrap();
            let (l, a) = (p.length(), p.area().unwrap());
            let (ls, as_) = (d.length(), d.area().unwrap());
            worst_id = worst_id.max((k1 * ls + k1 * k1 * a - TAU).abs());
            worst_id = worst_id.max((k1 * k1 * as_ + k1 * l - TAU).abs());
            let dd = polar_dual_arcs(&d).unwrap();
            worst_dd = worst_dd.max(sup_dist(p.support(1024).unwrap().h(), dd.support(1024).unwrap().h()));
        }
    }
    // the sampled route on smooth curves
    let m = Metric::unit();
    let mut worst_sampled = 0.0f64;
    for p in mixed_polygons(10, 1.0, &m, 13) {
        let s = Curve::from(p).to_support(2048).unwrap();
        let dd = polar_dual(&polar_dual(&s).unwrap()).unwrap();
        worst_sampled = worst_sampled.max(sup_dist(s.h(), dd.h()));
    }
    (
        worst_id < 1e-8 && worst_dd < 1e-6 && worst_sampled < 1e-6,
        format!(
            "identity residual {worst_id:.2e}, double dual {worst_dd:.2e} exact / {worst_sampled:.2e} sampled"
        ),
    )
}

fn upper_sharpness() -> Verdict {
    let m = Metric::unit();
    let race = [0.0, 0.1, 0.3]
        .iter()
        .map(|d| upper_bound_slack(&make_racetrack(1.0, 2.0 * d, &m).unwrap().into()).unwrap().abs())
        .fold(0.0, f64::max);
    // curvature in [0, 1]: polars of random 1-convex polygons, whose arcs
    // have curvature 1 and whose vertices open into geodesic segments
    let min_slack = mixed_polygons(100, 1.0, &m, 31)
        .iter()
        .map(|p| upper_bound_slack(&polar_dual_arcs(p).unwrap().into()).unwrap())
        .fold(f64::INFINITY, f64::min);
    (
        race < 1e-6 && min_slack >= -1e-8,
        format!("max racetrack |slack| {race:.2e}, min slack {min_slack:.2e}"),
    )
}

fn euclid_limits() -> Verdict {
    let m = Metric::new(1e-4).unwrap();
    let mut worst = 0.0f64;
    for lambda in [0.5, 1.0, 2.0] {
        let lmax = lune_max_length(lambda, &m);
        for i in 1..=20 {
            let l = lmax * i as f64 / 21.0;
            let (s, e) = (lune_area(l, lambda, &m).unwrap(), euclid_lower_bound(l, lambda).unwrap());
            worst = worst.max(((s - e) / e).abs());
        }
        let a_circle = PI / (lambda * lambda);
        for i in 1..=20 {
            let a = a_circle * (1.0 + 0.5 * i as f64);
            let (s, e) = (upper_bound_rhs(a, lambda, &m).unwrap(), euclid_upper_bound(a, lambda).unwrap());
            worst = worst.max(((s - e) / e).abs());
        }
    }
    (worst < 1e-6, format!("max relative difference {worst:.2e}"))
}

fn pmp() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut fd_u, mut fd_x) = (0.0f64, 0.0f64);
    let eps = 1e-5;
    for _ in 0..100 {
        let s = ControlState { t: 0.0, x1: rng.gen_range(-2.0..2.0), x2: rng.gen_range(-2.0..2.0), u: rng.gen_range(0.0..1.0) };
        let a = AdjointState {
            p1: rng.gen_range(-2.0..2.0),
            p2: rng.gen_range(-2.0..2.0),
            lambda0: 1.0,
            lambda1: rng.gen_range(-2.0..2.0),
        };
        let h = |s: ControlState| pontryagin_h(&s, &a).h;
        let du = (h(ControlState { u: s.u + eps, ..s }) - h(ControlState { u: s.u - eps, ..s })) / (2.0 * eps);
        fd_u = fd_u.max((du - pontryagin_h(&s, &a).h1).abs());
        let dx1 = (h(ControlState { x1: s.x1 + eps, ..s }) - h(ControlState { x1: s.x1 - eps, ..s })) / (2.0 * eps);
        let dx2 = (h(ControlState { x2: s.x2 + eps, ..s }) - h(ControlState { x2: s.x2 - eps, ..s })) / (2.0 * eps);
        let (p1d, p2d) = adjoint_rhs(&s, &a);
        fd_x = fd_x.max((p1d + dx1).abs()).max((p2d + dx2).abs());
    }
    let n = 200;
    let lc_min = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| (-10.0 + 20.0 * i as f64 / n as f64, -10.0 + 20.0 * j as f64 / n as f64)))
        .map(|(x1, x2)| legendre_clebsch_value(x1, x2))
        .fold(f64::INFINITY, f64::min);

    let m = Metric::unit();
    let lune = make_lune(&LuneSpec::new(m, 1.0, 3.0).unwrap()).unwrap();
    let tr = trajectory_of(&lune).unwrap();
    let (rep, _) = verify_pmp(&tr).unwrap();
    let lune_ok = rep.consistent && rep.max_abs_h1_at_switches < 1e-6 && rep.sign_violations == 0;

    // the lune's schedule with one switch moved
    let mut sched = tr.schedule.clone();
    sched.switch_times[1] += 0.05;
    let moved = integrate_trajectory(&Schedule::new(sched.switch_times, sched.values).unwrap(), tr.x0, tr.l0).unwrap();
    let moved_flagged = !verify_pmp(&moved).unwrap().0.consistent;
    // a closed but lopsided three-arc polygon
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tri = random_polygon(&mut rng, 3, 1.0, &m).unwrap();
    let tri_tr = trajectory_of(&tri).unwrap();
    let tri_flagged = !verify_pmp(&tri_tr).unwrap().0.consistent;

    (
        fd_u < 1e-7 && fd_x < 1e-7 && lc_min > 0.0 && lune_ok && moved_flagged && tri_flagged,
        format!(
            "FD ∂H/∂u {fd_u:.1e}, FD −∂H/∂x {fd_x:.1e}, LC min {lc_min:.2e}, lune |H1| {:.1e} \
             ({} sign violations), flagged: moved switch {moved_flagged}, three arcs {tri_flagged}",
            rep.max_abs_h1_at_switches, rep.sign_violations
        ),
    )
}

fn deformation() -> Verdict {
    let m = Metric::unit();
    let (mut dl, mut rises, mut worst_end, mut done) = (0.0f64, 0usize, 0.0f64, 0usize);
    for i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let p = random_symmetric_polygon(&mut rng, 4, 1.0, &m).unwrap();
        let Ok((_, steps)) = deform_to_lune(&p, DEFAULT_STEP) else { continue };
        let l0 = steps[0].length;
        dl = dl.max(steps.iter().map(|s| (s.length - l0).abs()).fold(0.0, f64::max));
        rises += steps.windows(2).filter(|w| w[1].area > w[0].area + 1e-12).count();
        let last = steps.last().unwrap();
        worst_end = worst_end.max(last.deficit.abs());
        done += usize::from(last.vertex_pairs == 1);
    }
    (
        done == 20 && dl < 1e-9 && rises == 0 && worst_end < 1e-4,
        format!("{done}/20 reached a lune, max |ΔL| {dl:.1e}, area increases {rises}, max end deficit {worst_end:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("closed-form circles", circles),
        ("lune area oracle and convexity", lune_oracle),
        ("lower bound sharpness", sharpness),
        ("duality identities", duality),
        ("upper bound sharpness", upper_sharpness),
        ("Euclidean limits", euclid_limits),
        ("maximum principle", pmp),
        ("linkage deformation", deformation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!("{} criterion {} ({name}): {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
