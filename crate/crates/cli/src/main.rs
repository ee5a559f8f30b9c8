//! `lcx`: shape generation, measurement and inequality checks for
//! λ-convex spherical curves.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lambda_convex::control::{trajectory_of, verify_pmp};
use lambda_convex::duality::dual;
use lambda_convex::extremal::{
    deficit_from_report, lune_area, lune_max_length, make_lune, make_racetrack, slack_from_report, sweep, upper_bound_rhs,
    Bound, LuneSpec,
};
use lambda_convex::io::{deform_csv, read_curve, sweep_csv, to_json, trajectory_csv, write_curve, write_text};
use lambda_convex::optimizer::{deform, minimize_area, DEFAULT_STARTS, DEFAULT_STEP};
use lambda_convex::par::Exec;
use lambda_convex::{Curve, Error, MeasureReport, Metric};

/// Inequality violations below this count as falsified.
const FALSIFIED: f64 = -1e-6;

#[derive(Parser)]
#[command(name = "lcx", version, about = "Sharp isoperimetric bounds for λ-convex spherical curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the lune of the given length.
    Lune {
        #[arg(long)]
        k1: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the racetrack whose circles are `separation` apart.
    Racetrack {
        #[arg(long)]
        k1: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        separation: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print length, area and curvature range.
    Measure {
        #[arg(long = "in")]
        input: PathBuf,
        /// Measure arc polygons through N support samples instead of exactly.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Compare the area with the lune of equal length.
    CheckLower {
        #[arg(long = "in")]
        input: PathBuf,
        /// Measure arc polygons through N support samples instead of exactly.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Compare the length with the racetrack bound of equal area.
    CheckUpper {
        #[arg(long = "in")]
        input: PathBuf,
        /// Measure arc polygons through N support samples instead of exactly.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Write the polar dual.
    Dual {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded multistart search for the least-area polygon.
    Optimize {
        #[arg(long)]
        arcs: usize,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        iters: usize,
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = DEFAULT_STARTS)]
        starts: usize,
        /// Also write the best polygon here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the maximum principle along a polygon's trajectory.
    PmpVerify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the linkage deformation for at most K steps.
    Deform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        /// Angle increment in radians.
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
    },
    /// Tabulate deficit or slack of the extremal curves.
    Sweep {
        #[arg(long, value_enum)]
        what: What,
        /// `start:stop:count`, endpoints included.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Lower,
    Upper,
}

#[derive(Serialize)]
struct LowerReport {
    k1: f64,
    lambda: f64,
    length: f64,
    area: f64,
    lune_area: f64,
    deficit: f64,
}

#[derive(Serialize)]
struct UpperReport {
    k1: f64,
    lambda: f64,
    length: f64,
    area: f64,
    bound: f64,
    slack: f64,
}

enum Failure {
    Lib(Error),
    Falsified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn print(text: String) {
    print!("{text}");
}

fn falsified_if(value: f64, what: &str) -> Outcome {
    if value < FALSIFIED {
        return Err(Failure::Falsified(format!("{what} {value:e} is below {FALSIFIED:e}")));
    }
    Ok(())
}

fn parse_grid(grid: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Parse(format!("grid {grid:?} is not start:stop:count"));
    let parts: Vec<&str> = grid.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

fn measure(curve: &Curve, samples: Option<usize>) -> Result<MeasureReport, Error> {
    match (samples, curve) {
        (Some(n), Curve::Arcs(_)) => curve.to_support(n)?.measure(),
        _ => curve.measure(),
    }
}

fn check_lower(curve: &Curve, samples: Option<usize>) -> Outcome {
    let m = curve.metric();
    let lambda = curve.lambda();
    let rep = measure(curve, samples)?;
    let deficit = deficit_from_report(&rep, lambda, &m)?;
    let bound = lune_area(rep.length.min(lune_max_length(lambda, &m)), lambda, &m)?;
    print(to_json(&LowerReport { k1: m.k1(), lambda, length: rep.length, area: rep.area, lune_area: bound, deficit })?);
    falsified_if(deficit, "deficit")
}

fn check_upper(curve: &Curve, samples: Option<usize>) -> Outcome {
    let m = curve.metric();
    let lambda = curve.lambda();
    let rep = measure(curve, samples)?;
    let slack = slack_from_report(&rep, lambda, &m)?;
    let bound = upper_bound_rhs(rep.area, lambda, &m)?;
    print(to_json(&UpperReport { k1: m.k1(), lambda, length: rep.length, area: rep.area, bound, slack })?);
    falsified_if(slack, "slack")
}

fn arcs_of(curve: Curve, what: &str) -> Result<lambda_convex::ArcPolygon, Error> {
    match curve {
        Curve::Arcs(p) => Ok(p),
        Curve::Support(_) => Err(Error::Domain(format!("{what} needs a curve with repr \"arcs\""))),
    }
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Lune { k1, lambda, length, out } => {
            let poly = make_lune(&LuneSpec::new(Metric::new(k1)?, lambda, length)?)?;
            write_curve(&out, &poly.into())?;
        }
        Cmd::Racetrack { k1, lambda, separation, out } => {
            let poly = make_racetrack(lambda, separation, &Metric::new(k1)?)?;
            write_curve(&out, &poly.into())?;
        }
        Cmd::Measure { input, samples } => {
            print(to_json(&measure(&read_curve(&input)?, samples)?)?);
        }
        Cmd::CheckLower { input, samples } => check_lower(&read_curve(&input)?, samples)?,
        Cmd::CheckUpper { input, samples } => check_upper(&read_curve(&input)?, samples)?,
        Cmd::Dual { input, out } => write_curve(&out, &dual(&read_curve(&input)?)?)?,
        Cmd::Optimize { arcs, length, seed, iters, k1, lambda, starts, out } => {
            let m = Metric::new(k1)?;
            let (poly, rep) = minimize_area(&m, lambda, arcs, length, seed, iters, starts, Exec::default())?;
            if let Some(path) = out {
                write_curve(&path, &poly.into())?;
            }
            print(to_json(&rep)?);
            falsified_if(rep.best_deficit, "best deficit")?;
        }
        Cmd::PmpVerify { input, out } => {
            let poly = arcs_of(read_curve(&input)?, "pmp-verify")?;
            let traj = trajectory_of(&poly)?;
            let (rep, adj) = verify_pmp(&traj)?;
            write_text(&out, &trajectory_csv(&traj, &adj))?;
            print(to_json(&rep)?);
        }
        Cmd::Deform { input, steps, out_dir, step } => {
            let poly = arcs_of(read_curve(&input)?, "deform")?;
            let (end, rows) = deform(&poly, step, steps)?;
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| Error::Parse(format!("cannot create {}: {e}", out_dir.display())))?;
            write_text(&out_dir.join("deform.csv"), &deform_csv(&rows))?;
            write_curve(&out_dir.join("final.json"), &end.into())?;
            let worst = rows.iter().map(|r| r.deficit).fold(f64::INFINITY, f64::min);
            falsified_if(worst, "deficit")?;
        }
        Cmd::Sweep { what, grid, out, k1, lambda } => {
            let params = parse_grid(&grid)?;
            let bound = match what {
                What::Lower => Bound::Lower,
                What::Upper => Bound::Upper,
            };
            let rows = sweep(bound, lambda, &Metric::new(k1)?, &params, Exec::default())?;
            write_text(&out, &sweep_csv(&rows))?;
            let worst = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
            falsified_if(worst, if matches!(what, What::Lower) { "deficit" } else { "slack" })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Falsified(msg)) => {
            eprintln!("lcx: falsified: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("lcx: {e}");
            ExitCode::from(match e {
                Error::Parse(_) => 2,
                _ => 3,
            })
        }
    }
}

