use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use super::stencil;
use super::MeasureReport;
use crate::error::{domain, Error, Result};
use crate::sphere::Metric;

/// A convex curve given by `N` uniform samples of its support function
/// `h(θ)`, the distance from the origin to the supporting geodesic with
/// outward normal direction `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportCurve {
    metric: Metric,
    lambda: f64,
    h: Vec<f64>,
}

/// Gnomonic support `g = tan(h)` on the unit sphere with its derivatives.
#[derive(Debug, Clone)]
pub(crate) struct Gnomonic {
    pub g: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

/// Radius of curvature from the contact radius and its derivatives:
/// `R = (g''+g) / (1 + k1²g'²/(1+k1²g²))^{3/2}`.
pub fn curvature_radius(g: f64, dg: f64, d2g: f64, m: &Metric) -> f64 {
    let k2 = m.k1() * m.k1();
    let q = 1.0 + k2 * dg * dg / (1.0 + k2 * g * g);
    (d2g + g) / (q * q.sqrt())
}

/// Polar speed `√(1+g²+g'²)/(1+g²)` of a unit-sphere gnomonic support.
pub(crate) fn polar_speed(g: f64, dg: f64) -> f64 {
    let q = 1.0 + g * g;
    (q + dg * dg).sqrt() / q
}

impl SupportCurve {
    pub fn new(metric: Metric, lambda: f64, h: Vec<f64>) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        if h.len() < 8 {
            return domain(format!("need at least 8 support samples, got {}", h.len()));
        }
        if let Some(x) = h.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return domain(format!("support sample {x} is not a finite nonnegative number"));
        }
        Ok(Self { metric, lambda, h })
    }

    /// Samples `h(2πi/n)` of a support function.
    pub fn from_fn(metric: Metric, lambda: f64, n: usize, h: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..n).map(|i| h(TAU * i as f64 / n as f64)).collect();
        Self::new(metric, lambda, samples)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn samples(&self) -> usize {
        self.h.len()
    }

    pub fn theta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.h.len() as f64
    }

    /// True when every sample respects `h < arccot(λ/k1)/k1`, the bound
    /// that holds when the origin is chosen inside the curve as deep as
    /// λ-convexity allows.
    pub fn origin_bound_holds(&self) -> bool {
        let m = &self.metric;
        let bound = (m.k1() / self.lambda).atan();
        self.h.iter().all(|x| m.length_to_unit(*x) < bound)
    }

    fn unit_h(&self) -> Vec<f64> {
        self.h.iter().map(|x| self.metric.length_to_unit(*x)).collect()
    }

    fn unit_tan(&self) -> Result<Vec<f64>> {
        self.unit_h()
            .into_iter()
            .map(|x| {
                if x >= FRAC_PI_2 {
                    Err(Error::Overflow(format!("k1·h = {x} reaches π/2")))
                } else {
                    Ok(x.tan())
                }
            })
            .collect()
    }

    /// Contact radius `g = tan(k1 h)/k1`.
    pub fn contact_radius(&self) -> Result<Vec<f64>> {
        let k1 = self.metric.k1();
        Ok(self.unit_tan()?.into_iter().map(|g| g / k1).collect())
    }

    pub(crate) fn gnomonic(&self) -> Result<Gnomonic> {
        let g = self.unit_tan()?;
        let d = stencil::derivatives(&g, TAU / g.len() as f64);
        Ok(Gnomonic { g, d1: d.d1, d2: d.d2 })
    }

    /// Radius of curvature at every sample.
    pub fn curvature_radii(&self) -> Result<Vec<f64>> {
        let gn = self.gnomonic()?;
        let unit = Metric::unit();
        Ok((0..gn.g.len())
            .map(|i| {
                let r = curvature_radius(gn.g[i], gn.d1[i], gn.d2[i], &unit);
                self.metric.length_from_unit(r)
            })
            .collect())
    }

    fn check_convex(&self, radii: &[f64]) -> Result<()> {
        let scale = radii.iter().fold(1.0 / self.lambda, |m, r| m.max(r.abs()));
        let tol = 1e-6 * scale;
        match radii.iter().enumerate().find(|(_, r)| **r < -tol) {
            Some((i, r)) => Err(Error::Convexity(format!(
                "negative curvature radius {r} at θ = {}",
                self.theta(i)
            ))),
            None => Ok(()),
        }
    }

    /// Length `∫ sin(k1 h) dθ / k1`.
    pub fn length(&self) -> Result<f64> {
        self.check_convex(&self.curvature_radii()?)?;
        let l = stencil::integrate(&self.unit_h(), |h, _| h.sin());
        Ok(self.metric.length_from_unit(l))
    }

    /// Area `∫ (1 − √(1+g²+g'²)/(1+g²)) dθ / k1²`.
    pub fn area(&self) -> Result<f64> {
        self.check_convex(&self.curvature_radii()?)?;
        let g = self.unit_tan()?;
        let a = TAU - stencil::integrate(&g, polar_speed);
        Ok(self.metric.area_from_unit(a))
    }

    pub fn measure(&self) -> Result<MeasureReport> {
        let radii = self.curvature_radii()?;
        self.check_convex(&radii)?;
        let length = self.length()?;
        let area = self.area()?;
        Ok(MeasureReport::from_radii(length, area, &radii))
    }

    /// True when `R ≤ 1/λ + tol` at every sample.
    pub fn is_lambda_convex(&self, tol: f64) -> bool {
        match self.curvature_radii() {
            Ok(r) => r.iter().all(|x| *x <= 1.0 / self.lambda + tol),
            Err(_) => false,
        }
    }
}
