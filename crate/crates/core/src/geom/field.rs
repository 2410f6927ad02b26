use std::sync::Arc;

use rayon::prelude::*;

use super::chart::Chart;
use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_DEG};

/// A closed-form function of the chart coordinates returning its jet of the
/// requested degree at a point.
pub type PointFn = Arc<dyn Fn(f64, f64, usize) -> Jet + Send + Sync>;

#[derive(Clone)]
pub enum Values {
    /// Closed form; `max_deg` is the highest derivative order the callable provides.
    Analytic { eval: PointFn, max_deg: usize },
    /// Samples at the chart grid points (row-major, NaN marks excluded samples).
    Grid(Vec<f64>),
}

#[derive(Clone)]
pub struct ChartField {
    pub chart: Chart,
    pub values: Values,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Units {
    Dimensionless,
    Curvature,
}

/// Real field on one or two charts.
#[derive(Clone)]
pub struct ScalarField {
    pub parts: Vec<ChartField>,
    pub units: Units,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kinds: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                let repr = match &p.values {
                    Values::Analytic { max_deg, .. } => format!("analytic(deg {max_deg})"),
                    Values::Grid(_) => "grid".to_string(),
                };
                format!("{}[{}x{}] {}", p.chart.kind, p.chart.nx, p.chart.ny, repr)
            })
            .collect();
        write!(f, "ScalarField({:?}, {})", self.units, kinds.join(", "))
    }
}

impl ChartField {
    pub fn analytic(chart: Chart, eval: PointFn, max_deg: usize) -> Self {
        ChartField { chart, values: Values::Analytic { eval, max_deg: max_deg.min(MAX_DEG) } }
    }

    pub fn grid(chart: Chart, values: Vec<f64>) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(Error::ChartMismatch(format!(
                "{} samples for a {}x{} chart",
                values.len(),
                chart.nx,
                chart.ny
            )));
        }
        Ok(ChartField { chart, values: Values::Grid(values) })
    }

    pub fn max_deg(&self) -> usize {
        match &self.values {
            Values::Analytic { max_deg, .. } => *max_deg,
            Values::Grid(_) => 0,
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.values, Values::Analytic { .. })
    }

    /// Jet at an arbitrary point; only closed-form fields carry derivatives.
    pub fn jet(&self, x: f64, y: f64, deg: usize) -> Result<Jet> {
        match &self.values {
            Values::Analytic { eval, max_deg } => {
                if deg > *max_deg {
                    return Err(Error::InsufficientSmoothness { need: deg, have: *max_deg });
                }
                Ok(eval(x, y, deg))
            }
            Values::Grid(_) => Err(Error::Precondition(
                "derivative jets are unavailable for grid-sampled fields".into(),
            )),
        }
    }

    /// Value at an arbitrary point; grids use bilinear interpolation.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        match &self.values {
            Values::Analytic { eval, .. } => eval(x, y, 0).value(),
            Values::Grid(v) => bilinear(&self.chart, v, x, y),
        }
    }

    /// Values at the chart's own sample points.
    pub fn samples(&self) -> Vec<f64> {
        match &self.values {
            Values::Grid(v) => v.clone(),
            Values::Analytic { eval, .. } => {
                let pts = self.chart.points();
                pts.par_iter().map(|&(x, y)| eval(x, y, 0).value()).collect()
            }
        }
    }
}

fn bilinear(chart: &Chart, v: &[f64], x: f64, y: f64) -> f64 {
    let (s, t, periodic) = match chart.lattice {
        Some((g1, g2)) => {
            // Solve z = s γ₁ + t γ₂ for lattice coordinates.
            let det = g1.re * g2.im - g1.im * g2.re;
            let s = (x * g2.im - y * g2.re) / det;
            let t = (g1.re * y - g1.im * x) / det;
            (s * chart.nx as f64, t * chart.ny as f64, true)
        }
        None => (
            (x - chart.x_range.0) / (chart.x_range.1 - chart.x_range.0) * (chart.nx - 1) as f64,
            (y - chart.y_range.0) / (chart.y_range.1 - chart.y_range.0) * (chart.ny - 1) as f64,
            false,
        ),
    };
    let (nx, ny) = (chart.nx as isize, chart.ny as isize);
    let i0 = s.floor() as isize;
    let j0 = t.floor() as isize;
    let fs = s - i0 as f64;
    let ft = t - j0 as f64;
    let at = |i: isize, j: isize| -> f64 {
        let (i, j) = if periodic {
            (i.rem_euclid(nx), j.rem_euclid(ny))
        } else {
            (i.clamp(0, nx - 1), j.clamp(0, ny - 1))
        };
        v[(j * nx + i) as usize]
    };
    (1.0 - fs) * (1.0 - ft) * at(i0, j0)
        + fs * (1.0 - ft) * at(i0 + 1, j0)
        + (1.0 - fs) * ft * at(i0, j0 + 1)
        + fs * ft * at(i0 + 1, j0 + 1)
}

impl ScalarField {
    pub fn new(parts: Vec<ChartField>, units: Units) -> Self {
        ScalarField { parts, units }
    }

    pub fn single(part: ChartField, units: Units) -> Self {
        ScalarField { parts: vec![part], units }
    }

    /// Closed-form field built from a jet-valued closure, shared by every chart.
    pub fn from_jet_fn<F>(charts: &[Chart], max_deg: usize, units: Units, f: F) -> Self
    where
        F: Fn(f64, f64, usize) -> Jet + Send + Sync + 'static,
    {
        let eval: PointFn = Arc::new(f);
        let parts = charts.iter().map(|c| ChartField::analytic(c.clone(), eval.clone(), max_deg)).collect();
        ScalarField { parts, units }
    }

    pub fn constant(charts: &[Chart], value: f64) -> Self {
        Self::from_jet_fn(charts, MAX_DEG, Units::Dimensionless, move |_, _, d| Jet::constant(value, d))
    }

    pub fn samples(&self) -> Vec<Vec<f64>> {
        self.parts.iter().map(|p| p.samples()).collect()
    }

    /// Sup of |value| over all sample points, ignoring excluded (NaN) samples.
    pub fn sup_abs(&self) -> f64 {
        self.samples()
            .iter()
            .flat_map(|v| v.iter())
            .filter(|v| !v.is_nan())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.samples()
            .iter()
            .flat_map(|v| v.iter())
            .filter(|v| !v.is_nan())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn charts(&self) -> Vec<Chart> {
        self.parts.iter().map(|p| p.chart.clone()).collect()
    }

    /// Pointwise map of sampled values, producing a grid field.
    pub fn map_samples<F: Fn(f64) -> f64>(&self, f: F) -> Result<ScalarField> {
        let parts = self
            .parts
            .iter()
            .map(|p| ChartField::grid(p.chart.clone(), p.samples().into_iter().map(&f).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScalarField { parts, units: self.units })
    }

    /// Grid field holding the sampled values of this field.
    pub fn to_grid(&self) -> Result<ScalarField> {
        self.map_samples(|v| v)
    }
}
