//! Curve JSON and CSV output.
//!
//! Every number is written with 17 significant digits in scientific
//! notation, which reproduces the `f64` exactly; reading a file and writing
//! it again gives the same bytes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::control::{AdjointPath, ControlTrajectory};
use crate::curve::{Arc, ArcPolygon, Curve, SupportCurve};
use crate::error::{Error, Result};
use crate::extremal::SweepRow;
use crate::optimizer::DeformStep;
use crate::sphere::{Metric, SpherePoint};

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Compact JSON with 17-digit floats.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "non-finite number"));
        }
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Serializes any value as one line of JSON with 17-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Domain(format!("cannot serialize: {e}")))?;
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Repr {
    Support,
    Arcs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcDoc {
    center_t: f64,
    center_theta: f64,
    start: f64,
    extent: f64,
    /// Present only when the arc's curvature differs from the curve's λ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    k1: f64,
    lambda: f64,
    repr: Repr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arcs: Option<Vec<ArcDoc>>,
}

/// The curve as a JSON document (lengths in units of the metric).
pub fn curve_to_json(curve: &Curve) -> Result<String> {
    let m = curve.metric();
    let doc = match curve {
        Curve::Support(c) => CurveDoc {
            k1: m.k1(),
            lambda: c.lambda(),
            repr: Repr::Support,
            h: Some(c.h().to_vec()),
            arcs: None,
        },
        Curve::Arcs(p) => CurveDoc {
            k1: m.k1(),
            lambda: p.lambda(),
            repr: Repr::Arcs,
            h: None,
            arcs: Some(
                p.arcs()
                    .iter()
                    .map(|a| ArcDoc {
                        center_t: a.center.t,
                        center_theta: a.center.theta,
                        start: a.start,
                        extent: a.extent,
                        kappa: (a.kappa != p.lambda()).then_some(a.kappa),
                    })
                    .collect(),
            ),
        },
    };
    to_json(&doc)
}

/// Parses a curve document. Syntax and schema problems are
/// [`Error::Parse`]; invalid geometry is reported by the constructors.
pub fn curve_from_json(text: &str) -> Result<Curve> {
    let doc: CurveDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let m = Metric::new(doc.k1)?;
    match (doc.repr, doc.h, doc.arcs) {
        (Repr::Support, Some(h), None) => Ok(SupportCurve::new(m, doc.lambda, h)?.into()),
        (Repr::Arcs, None, Some(arcs)) => {
            let arcs = arcs
                .into_iter()
                .map(|a| Arc {
                    center: SpherePoint { t: a.center_t, theta: a.center_theta },
                    start: a.start,
                    extent: a.extent,
                    kappa: a.kappa.unwrap_or(doc.lambda),
                })
                .collect();
            Ok(ArcPolygon::new(m, doc.lambda, arcs)?.into())
        }
        (Repr::Support, _, _) => Err(Error::Parse("repr \"support\" needs \"h\" and no \"arcs\"".into())),
        (Repr::Arcs, _, _) => Err(Error::Parse("repr \"arcs\" needs \"arcs\" and no \"h\"".into())),
    }
}

pub fn read_curve(path: &Path) -> Result<Curve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    curve_from_json(&text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

pub fn write_curve(path: &Path, curve: &Curve) -> Result<()> {
    write_text(path, &curve_to_json(curve)?)
}

fn csv(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Columns `t,x1,x2,u,p1,p2,H1`.
pub fn trajectory_csv(traj: &ControlTrajectory, adj: &AdjointPath) -> String {
    csv(
        "t,x1,x2,u,p1,p2,H1",
        traj.states
            .iter()
            .enumerate()
            .map(|(i, s)| vec![s.t, s.x1, s.x2, s.u, adj.p1[i], adj.p2[i], adj.h1[i]]),
    )
}

/// Columns `parameter,length,area,bound,planar_bound,gap`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv(
        "parameter,length,area,bound,planar_bound,gap",
        rows.iter().map(|r| vec![r.parameter, r.length, r.area, r.bound, r.planar_bound, r.gap]),
    )
}

/// Columns `step,length,area,vertex_pairs,deficit`.
pub fn deform_csv(steps: &[DeformStep]) -> String {
    csv(
        "step,length,area,vertex_pairs,deficit",
        steps.iter().map(|s| vec![s.step as f64, s.length, s.area, s.vertex_pairs as f64, s.deficit]),
    )
}
