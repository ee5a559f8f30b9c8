use std::f64::consts::{PI, SQRT_2};
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcx")).args(args).output().expect("lcx runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = lcx(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn ok_json(args: &[&str]) -> Value {
    serde_json::from_slice(&ok(args)).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap()
}

#[test]
fn lune_meets_the_lower_bound_with_equality() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("lune.json");
    ok(&["lune", "--k1", "1", "--lambda", "1", "--length", "3.0", "--out", p(&f)]);
    let rep = ok_json(&["check-lower", "--in", p(&f)]);
    assert!(num(&rep, "deficit").abs() < 1e-6);
}

#[test]
fn racetrack_meets_the_upper_bound_with_equality() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("rt.json");
    ok(&["racetrack", "--k1", "1", "--lambda", "1", "--separation", "0.6", "--out", p(&f)]);
    let rep = ok_json(&["check-upper", "--in", p(&f)]);
    assert!(num(&rep, "slack").abs() < 1e-6);
}

#[test]
fn circle_measures_to_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("circle.json");
    // the λ = 1 circle about the pole: radius π/4, h ≡ π/4
    let h = vec![PI / 4.0; 64];
    let doc = serde_json::json!({"k1": 1.0, "lambda": 1.0, "repr": "support", "h": h});
    std::fs::write(&f, doc.to_string()).unwrap();
    let rep = ok_json(&["measure", "--in", p(&f)]);
    assert!((num(&rep, "length") - PI * SQRT_2).abs() < 1e-8);
    assert!((num(&rep, "area") - (2.0 * PI - PI * SQRT_2)).abs() < 1e-8);
}

#[test]
fn dual_twice_returns_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    ok(&["lune", "--k1", "0.5", "--lambda", "2", "--length", "1.5", "--out", p(&a)]);
    assert!(lcx(&["dual", "--in", p(&a), "--out", p(&b)]).status.success());
    assert!(lcx(&["dual", "--in", p(&b), "--out", p(&c)]).status.success());
    let read = |f: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap() };
    let (x, y) = (read(&a), read(&c));
    assert_eq!(x["arcs"].as_array().unwrap().len(), y["arcs"].as_array().unwrap().len());
    for (u, v) in x["arcs"].as_array().unwrap().iter().zip(y["arcs"].as_array().unwrap()) {
        for key in ["center_t", "center_theta", "start", "extent"] {
            assert!((num(u, key) - num(v, key)).abs() < 1e-6, "{key}");
        }
    }
    let dual = ok_json(&["measure", "--in", p(&b)]);
    let orig = ok_json(&["measure", "--in", p(&a)]);
    // k1 L* + k1² A = 2π with k1 = 0.5
    assert!((0.5 * num(&dual, "length") + 0.25 * num(&orig, "area") - 2.0 * PI).abs() < 1e-8);
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    ok(&["racetrack", "--k1", "1", "--lambda", "1.5", "--separation", "0.3", "--out", p(&a)]);
    ok(&["racetrack", "--k1", "1", "--lambda", "1.5", "--separation", "0.3", "--out", p(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(lcx(&["dual", "--in", p(&a), "--out", p(&c)]).status.success());
    for f in [&a, &c] {
        let text = std::fs::read_to_string(f).unwrap();
        let curve = lambda_convex::io::curve_from_json(&text).unwrap();
        assert_eq!(lambda_convex::io::curve_to_json(&curve).unwrap(), text);
    }
    let run = |s: &str| lcx(&["optimize", "--arcs", "4", "--length", "2", "--seed", s, "--iters", "10", "--starts", "4"]).stdout;
    assert_eq!(run("3"), run("3"));
}

#[test]
fn optimize_finds_the_lune() {
    let rep = ok_json(&["optimize", "--arcs", "3", "--length", "2.5", "--seed", "7", "--iters", "100", "--starts", "8"]);
    assert!(num(&rep, "best_deficit") > -1e-8);
    assert!(num(&rep, "best_deficit") < 1e-4);
    assert_eq!(rep["L0"].as_f64().unwrap(), 2.5);
}

#[test]
fn pmp_verify_writes_the_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let (f, csv) = (dir.path().join("l.json"), dir.path().join("t.csv"));
    ok(&["lune", "--k1", "1", "--lambda", "1", "--length", "3", "--out", p(&f)]);
    let rep = ok_json(&["pmp-verify", "--in", p(&f), "--out", p(&csv)]);
    assert_eq!(rep["consistent"], Value::Bool(true));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,x1,x2,u,p1,p2,H1\n"));
    assert!(text.lines().count() > 1000);
}

#[test]
fn deform_and_sweep_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.csv");
    assert!(lcx(&["sweep", "--what", "lower", "--grid", "0.5:4:8", "--out", p(&s)]).status.success());
    let text = std::fs::read_to_string(&s).unwrap();
    assert_eq!(text.lines().count(), 9);
    for line in text.lines().skip(1) {
        let gap: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(gap.abs() < 1e-6);
    }
    let f = dir.path().join("lune.json");
    ok(&["lune", "--k1", "1", "--lambda", "1", "--length", "3", "--out", p(&f)]);
    // a lune is rigid: no linkage to move
    assert_eq!(lcx(&["deform", "--in", p(&f), "--steps", "3", "--out-dir", p(dir.path())]).status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(lcx(&["measure", "--in", p(&bad)]).status.code(), Some(2));
    assert_eq!(lcx(&["measure", "--in", p(&dir.path().join("missing.json"))]).status.code(), Some(2));
    assert_eq!(lcx(&["lune", "--k1", "x", "--lambda", "1", "--length", "1", "--out", "o"]).status.code(), Some(2));
    assert_eq!(lcx(&["sweep", "--what", "lower", "--grid", "1:2", "--out", "o"]).status.code(), Some(2));
    let out = lcx(&["lune", "--k1", "1", "--lambda", "1", "--length", "9", "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());

    // twelve support samples cannot resolve a racetrack: the coarse curve
    // appears longer than the bound allows
    let rt = dir.path().join("rt.json");
    ok(&["racetrack", "--k1", "1", "--lambda", "1", "--separation", "0.2", "--out", p(&rt)]);
    let out = lcx(&["check-upper", "--in", p(&rt), "--samples", "12"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("falsified"));
    assert_eq!(lcx(&["check-upper", "--in", p(&rt)]).status.code(), Some(0));
}

#[test]
fn deform_runs_a_square_down_to_a_lune() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("sq.json");
    let m = lambda_convex::Metric::unit();
    let sq = lambda_convex::optimizer::regular_polygon(4, 1.0, 3.0, &m).unwrap();
    lambda_convex::io::write_curve(&f, &sq.into()).unwrap();
    let out = dir.path().join("run");
    ok(&["deform", "--in", p(&f), "--steps", "100000", "--out-dir", p(&out)]);
    let text = std::fs::read_to_string(out.join("deform.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.len() > 2);
    for w in rows.windows(2) {
        assert!(w[1][2] <= w[0][2] + 1e-12);
        assert!((w[1][1] - 3.0).abs() < 1e-9);
    }
    let last = rows.last().unwrap();
    assert_eq!(last[3], 1.0);
    assert!(last[4].abs() < 1e-4);
    let end = ok_json(&["check-lower", "--in", p(&out.join("final.json"))]);
    assert!(num(&end, "deficit").abs() < 1e-4);
}
