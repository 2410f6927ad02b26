//! Charts, conformal metrics ds² = e^(-2f)|dz|², differential operators and quadrature.

mod chart;
mod fd;
mod field;
mod ops;
pub mod quadrature;
pub mod standard;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use chart::{Chart, ChartKind, MIN_RESOLUTION};
pub use fd::grid_derivatives;
pub use field::{ChartField, PointFn, ScalarField, Units, Values};
pub use ops::{
    curvature, curvature_jet, gauss_bonnet_check, gradient_norm_sq, integrate, laplace_beltrami,
};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::tolerances;

/// The parameter triple (a, b, c) with an optional sign ε of K − c.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicciType {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<i8>,
}

impl RicciType {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        RicciType { a, b, c, epsilon: None }
    }

    pub fn with_epsilon(mut self, eps: i8) -> Self {
        self.epsilon = Some(eps.signum());
        self
    }

    /// Type of the homothetic metric r²·ds².
    pub fn homothety(&self, r: f64) -> Self {
        RicciType { a: self.a, b: self.b / (r * r), c: self.c / (r * r), epsilon: self.epsilon }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Atlas {
    Plane,
    /// Two stereographic charts glued by w = ρ/z.
    Sphere { rho: f64 },
    Torus,
}

/// A declared conical point: the area density behaves like |z − p|^(2β) near p.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    pub part: usize,
    pub x: f64,
    pub y: f64,
    pub beta: f64,
}

#[derive(Clone, Debug)]
pub struct ConformalMetric {
    pub atlas: Atlas,
    pub factor: ScalarField,
    pub cones: Vec<Cone>,
    pub name: String,
}

impl ConformalMetric {
    pub fn from_parts(atlas: Atlas, factor: ScalarField, name: impl Into<String>) -> Result<Self> {
        let kinds: Vec<ChartKind> = factor.parts.iter().map(|p| p.chart.kind).collect();
        let ok = match atlas {
            Atlas::Plane => kinds == [ChartKind::PlaneRect],
            Atlas::Sphere { rho } => rho > 0.0 && kinds == [ChartKind::SphereZ, ChartKind::SphereW],
            Atlas::Torus => kinds == [ChartKind::TorusFundamental],
        };
        if !ok {
            return Err(Error::ChartMismatch(format!("charts {kinds:?} do not form a {atlas:?} atlas")));
        }
        Ok(ConformalMetric { atlas, factor, cones: Vec::new(), name: name.into() })
    }

    pub fn plane(chart: Chart, eval: PointFn, max_deg: usize, name: &str) -> Result<Self> {
        let f = ScalarField::single(ChartField::analytic(chart, eval, max_deg), Units::Dimensionless);
        Self::from_parts(Atlas::Plane, f, name)
    }

    pub fn sphere(rho: f64, n: usize, fz: PointFn, fw: PointFn, max_deg: usize, name: &str) -> Result<Self> {
        let (cz, cw) = Chart::sphere_pair(rho, n)?;
        let f = ScalarField::new(
            vec![ChartField::analytic(cz, fz, max_deg), ChartField::analytic(cw, fw, max_deg)],
            Units::Dimensionless,
        );
        Self::from_parts(Atlas::Sphere { rho }, f, name)
    }

    pub fn torus(chart: Chart, eval: PointFn, max_deg: usize, name: &str) -> Result<Self> {
        let f = ScalarField::single(ChartField::analytic(chart, eval, max_deg), Units::Dimensionless);
        Self::from_parts(Atlas::Torus, f, name)
    }

    pub fn torus_grid(chart: Chart, values: Vec<f64>, name: &str) -> Result<Self> {
        let f = ScalarField::single(ChartField::grid(chart, values)?, Units::Dimensionless);
        Self::from_parts(Atlas::Torus, f, name)
    }

    pub fn with_cones(mut self, cones: Vec<Cone>) -> Self {
        self.cones = cones;
        self
    }

    pub fn charts(&self) -> Vec<Chart> {
        self.factor.charts()
    }

    /// Smallest derivative order carried by the factor (0 for grids).
    pub fn max_deg(&self) -> usize {
        self.factor.parts.iter().map(|p| p.max_deg()).min().unwrap_or(0)
    }

    pub fn is_analytic(&self) -> bool {
        self.factor.parts.iter().all(|p| p.is_analytic())
    }

    /// Re-sample every chart at n×n (closed-form factors only).
    pub fn with_resolution(&self, n: usize) -> Result<Self> {
        let mut out = self.clone();
        for p in out.factor.parts.iter_mut() {
            if !p.is_analytic() {
                return Err(Error::Precondition("cannot re-sample a grid factor".into()));
            }
            p.chart = p.chart.with_resolution(n, n)?;
        }
        Ok(out)
    }

    pub fn euler_characteristic(&self) -> Option<i32> {
        match self.atlas {
            Atlas::Sphere { .. } => Some(2),
            Atlas::Torus => Some(0),
            Atlas::Plane => None,
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self.atlas {
            Atlas::Sphere { rho } => Some(rho),
            _ => None,
        }
    }

    /// Global coordinate z of a chart point (None for the pole w = 0).
    pub fn to_z(&self, part: usize, x: f64, y: f64) -> Option<Complex64> {
        match (self.atlas, part) {
            (Atlas::Sphere { rho }, 1) => {
                let w = Complex64::new(x, y);
                if w.norm() == 0.0 {
                    None
                } else {
                    Some(rho / w)
                }
            }
            _ => Some(Complex64::new(x, y)),
        }
    }

    /// Location of a point in the chart where it is interior (|·| ≤ √ρ on spheres).
    /// `None` encodes the point at infinity.
    pub fn locate(&self, z: Option<Complex64>) -> (usize, f64, f64) {
        match (self.atlas, z) {
            (Atlas::Sphere { .. }, None) => (1, 0.0, 0.0),
            (Atlas::Sphere { rho }, Some(z)) if z.norm() > rho.sqrt() => {
                let w = rho / z;
                (1, w.re, w.im)
            }
            (_, Some(z)) => (0, z.re, z.im),
            (_, None) => (0, f64::INFINITY, f64::INFINITY),
        }
    }

    /// Sup over overlap samples of |f_w − (f_z∘ψ − log|ψ′|)| with ψ(w) = ρ/w.
    pub fn chart_consistency(&self) -> Result<f64> {
        let rho = match self.atlas {
            Atlas::Sphere { rho } => rho,
            _ => return Ok(0.0),
        };
        let (fz, fw) = (&self.factor.parts[0], &self.factor.parts[1]);
        let r0 = rho.sqrt();
        let mut sup = 0.0_f64;
        for (x, y) in fw.chart.points() {
            let w = Complex64::new(x, y);
            let r = w.norm();
            if !(r > 0.5 * r0 && r < 2.0 * r0) {
                continue;
            }
            let z = rho / w;
            let log_dpsi = rho.ln() - 2.0 * r.ln();
            let d = fw.value_at(x, y) - (fz.value_at(z.re, z.im) - log_dpsi);
            sup = sup.max(d.abs());
        }
        Ok(sup)
    }

    pub fn overlap_tolerance(&self) -> f64 {
        if self.is_analytic() {
            tolerances::OVERLAP_CLOSED_FORM
        } else {
            tolerances::OVERLAP_GRID
        }
    }

    /// Error if any factor sample is not finite.
    pub fn check_finite(&self) -> Result<()> {
        for p in &self.factor.parts {
            for ((x, y), v) in p.chart.points().into_iter().zip(p.samples()) {
                if !v.is_finite() {
                    return Err(Error::NonFinite { chart: p.chart.kind.to_string(), x, y });
                }
            }
        }
        Ok(())
    }

    /// The metric e^(2t)·ds², i.e. factor f − t.
    pub fn scaled(&self, t: f64) -> ConformalMetric {
        self.map_factor(format!("{} scaled by e^(2·{t})", self.name), move |_, _, _, f| f.add_const(-t))
    }

    /// New metric with factor g(part, x, y, f) computed chartwise. Grid parts
    /// apply g to the sampled values with degree-0 jets.
    pub fn map_factor<G>(&self, name: String, g: G) -> ConformalMetric
    where
        G: Fn(usize, f64, f64, Jet) -> Jet + Send + Sync + 'static,
    {
        let g = Arc::new(g);
        let parts = self
            .factor
            .parts
            .iter()
            .enumerate()
            .map(|(k, p)| match &p.values {
                Values::Analytic { eval, max_deg } => {
                    let eval = eval.clone();
                    let g = g.clone();
                    let f: PointFn = Arc::new(move |x, y, d| g(k, x, y, eval(x, y, d)));
                    ChartField::analytic(p.chart.clone(), f, *max_deg)
                }
                Values::Grid(v) => {
                    let vals = p
                        .chart
                        .points()
                        .into_iter()
                        .zip(v.iter())
                        .map(|((x, y), &fv)| g(k, x, y, Jet::constant(fv, 0)).value())
                        .collect();
                    ChartField { chart: p.chart.clone(), values: Values::Grid(vals) }
                }
            })
            .collect();
        ConformalMetric {
            atlas: self.atlas,
            factor: ScalarField::new(parts, Units::Dimensionless),
            cones: self.cones.clone(),
            name,
        }
    }

    /// Adds amplitude·bump to the factor of the first chart, with a Gaussian
    /// bump centred at `center` of width `width` (or a smooth periodic bump on tori).
    pub fn perturbed(&self, amplitude: f64, center: (f64, f64), width: f64) -> ConformalMetric {
        let name = format!("{} + {amplitude}·bump", self.name);
        match self.factor.parts[0].chart.lattice {
            Some((g1, g2)) => {
                let det = g1.re * g2.im - g1.im * g2.re;
                self.map_factor(name, move |k, x, y, f| {
                    if k != 0 {
                        return f;
                    }
                    let d = f.deg();
                    let xs = Jet::var_x(x - center.0, d);
                    let ys = Jet::var_y(y - center.1, d);
                    // lattice coordinates, so the bump is doubly periodic
                    let s = (xs * g2.im - ys * g2.re) * (1.0 / det);
                    let t = (ys * g1.re - xs * g1.im) * (1.0 / det);
                    let tau = std::f64::consts::TAU;
                    let bump = ((s * tau).cos() + (t * tau).cos() - 2.0).scale(1.0 / width).exp();
                    f + bump.scale(amplitude)
                })
            }
            None => self.map_factor(name, move |k, x, y, f| {
                if k != 0 {
                    return f;
                }
                let d = f.deg();
                let xs = Jet::var_x(x - center.0, d);
                let ys = Jet::var_y(y - center.1, d);
                let bump = (xs * xs + ys * ys).scale(-1.0 / (width * width)).exp();
                f + bump.scale(amplitude)
            }),
        }
    }
}
