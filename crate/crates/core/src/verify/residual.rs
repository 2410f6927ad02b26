//! Pointwise residuals of the defining equation and the two integral identities.

use std::f64::consts::PI;
use std::sync::Arc;

use super::zeros::{chart_delta, chart_images, zero_candidates};
use crate::error::{Error, Result};
use crate::geom::{
    curvature, curvature_jet, grid_derivatives, integrate, Atlas, ChartField, ConformalMetric, PointFn, RicciType,
    ScalarField, Units, Values,
};
use crate::jet::Jet;
use crate::tolerances;

/// Outcome of the residual Δlog|K−c| − (aK+b).
#[derive(Clone, Debug)]
pub enum Residual {
    /// K ≡ c: the defining equation holds identically.
    Trivial,
    Field(ScalarField),
}

impl Residual {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Residual::Trivial)
    }

    /// Sup-norm over the non-excluded samples (0 for the trivial case).
    pub fn sup(&self) -> f64 {
        match self {
            Residual::Trivial => 0.0,
            Residual::Field(f) => f.sup_abs(),
        }
    }
}

/// K − c as a field on the metric's charts.
pub fn k_minus_c(metric: &ConformalMetric, c: f64) -> Result<ScalarField> {
    let k = curvature(metric)?;
    let parts = k
        .parts
        .iter()
        .map(|p| match &p.values {
            Values::Analytic { eval, max_deg } => {
                let eval = eval.clone();
                let g: PointFn = Arc::new(move |x, y, d| eval(x, y, d).add_const(-c));
                Ok(ChartField::analytic(p.chart.clone(), g, *max_deg))
            }
            Values::Grid(v) => ChartField::grid(p.chart.clone(), v.iter().map(|k| k - c).collect()),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarField::new(parts, Units::Curvature))
}

/// True when sup|K − c| is at rounding level.
pub fn is_trivial_type(metric: &ConformalMetric, c: f64) -> Result<bool> {
    let d = k_minus_c(metric, c)?.sup_abs();
    Ok(d <= tolerances::TRIVIAL_TYPE * c.abs().max(1.0))
}

/// Per-chart lists of exclusion centres for the zeros of K − c.
pub(crate) fn exclusion_centres(metric: &ConformalMetric, kc: &ScalarField) -> Vec<Vec<(f64, f64)>> {
    let mut out = vec![Vec::new(); metric.factor.parts.len()];
    for c in zero_candidates(kc, metric.atlas) {
        for (part, x, y) in chart_images(metric.atlas, c.z) {
            out[part].push((x, y));
        }
    }
    out
}

pub(crate) fn near(chart: &crate::geom::Chart, centres: &[(f64, f64)], radius: f64, x: f64, y: f64) -> bool {
    centres.iter().any(|&(px, py)| {
        let (dx, dy) = chart_delta(chart, x, y, px, py);
        dx.hypot(dy) < radius
    })
}

/// Δlog|K−c| − (aK + b) with disks of `exclusion_radius` around zeros of K − c
/// removed (marked NaN).
pub fn ricci_residual(metric: &ConformalMetric, ty: &RicciType, exclusion_radius: f64) -> Result<Residual> {
    let hmax = metric.charts().iter().map(|c| c.h()).fold(0.0, f64::max);
    if !(exclusion_radius >= 2.0 * hmax * (1.0 - 1e-12)) {
        return Err(Error::Precondition(format!(
            "exclusion radius {exclusion_radius} below twice the grid spacing {hmax}"
        )));
    }
    if is_trivial_type(metric, ty.c)? {
        return Ok(Residual::Trivial);
    }
    let kc = k_minus_c(metric, ty.c)?;
    let centres = exclusion_centres(metric, &kc);
    let (a, b, c) = (ty.a, ty.b, ty.c);
    let mut parts = Vec::new();
    for (k, mp) in metric.factor.parts.iter().enumerate() {
        let chart = mp.chart.clone();
        let cs = centres[k].clone();
        match &mp.values {
            Values::Analytic { eval, max_deg } => {
                if *max_deg < 4 {
                    return Err(Error::InsufficientSmoothness { need: 4, have: *max_deg });
                }
                let eval = eval.clone();
                let ch = chart.clone();
                let g: PointFn = Arc::new(move |x, y, d| {
                    if near(&ch, &cs, exclusion_radius, x, y) {
                        return Jet::constant(f64::NAN, d);
                    }
                    let f = eval(x, y, d + 4);
                    let kj = curvature_jet(&f);
                    let lg = (kj - c).ln_abs();
                    (f.truncate(d) * 2.0).exp() * lg.laplacian() - (kj.truncate(d) * a + b)
                });
                parts.push(ChartField::analytic(chart, g, max_deg - 4));
            }
            Values::Grid(fv) => {
                let kv = kc.parts[k].samples();
                let lg: Vec<f64> = kv.iter().map(|v| v.abs().ln()).collect();
                let (_, _, lap) = grid_derivatives(&chart, &lg)?;
                let pts = chart.points();
                let vals = (0..fv.len())
                    .map(|i| {
                        let (x, y) = pts[i];
                        if near(&chart, &cs, exclusion_radius, x, y) || !lg[i].is_finite() {
                            return f64::NAN;
                        }
                        (2.0 * fv[i]).exp() * lap[i] - (a * (kv[i] + c) + b)
                    })
                    .collect();
                parts.push(ChartField::grid(chart, vals)?);
            }
        }
    }
    Ok(Residual::Field(ScalarField::new(parts, Units::Curvature)))
}

/// (c−K)ΔK + ‖∇K‖² + (aK+b)(K−c)², defined across the zeros of K − c.
pub fn curvature_equation_residual(metric: &ConformalMetric, ty: &RicciType) -> Result<ScalarField> {
    let (a, b, c) = (ty.a, ty.b, ty.c);
    let mut parts = Vec::new();
    for mp in &metric.factor.parts {
        let chart = mp.chart.clone();
        match &mp.values {
            Values::Analytic { eval, max_deg } => {
                if *max_deg < 4 {
                    return Err(Error::InsufficientSmoothness { need: 4, have: *max_deg });
                }
                let eval = eval.clone();
                let g: PointFn = Arc::new(move |x, y, d| {
                    let f = eval(x, y, d + 4);
                    let kj = curvature_jet(&f);
                    let e2f = (f.truncate(d) * 2.0).exp();
                    let k0 = kj.truncate(d);
                    (k0 * -1.0 + c) * e2f * kj.laplacian() + e2f * kj.grad_sq().truncate(d) + (k0 * a + b) * (k0 - c) * (k0 - c)
                });
                parts.push(ChartField::analytic(chart, g, max_deg - 4));
            }
            Values::Grid(fv) => {
                let (_, _, lapf) = grid_derivatives(&chart, fv)?;
                let kv: Vec<f64> = fv.iter().zip(&lapf).map(|(f, l)| (2.0 * f).exp() * l).collect();
                let (kx, ky, lapk) = grid_derivatives(&chart, &kv)?;
                let vals = (0..fv.len())
                    .map(|i| {
                        let e2f = (2.0 * fv[i]).exp();
                        let k = kv[i];
                        (c - k) * e2f * lapk[i] + e2f * (kx[i] * kx[i] + ky[i] * ky[i]) + (a * k + b) * (k - c) * (k - c)
                    })
                    .collect();
                parts.push(ChartField::grid(chart, vals)?);
            }
        }
    }
    Ok(ScalarField::new(parts, Units::Dimensionless))
}

/// Total area ∫ μ.
pub fn area(metric: &ConformalMetric) -> Result<f64> {
    let one = ScalarField::constant(&metric.charts(), 1.0);
    integrate(metric, &one)
}

/// πaχ + (b/2)·Area + 2πN.
pub fn zero_count_identity(metric: &ConformalMetric, ty: &RicciType, genus: u32, n: u32) -> Result<f64> {
    if metric.atlas == Atlas::Plane {
        return Err(Error::UnsupportedTopology("the zero-count identity needs a compact atlas".into()));
    }
    if is_trivial_type(metric, ty.c)? {
        return Err(Error::Precondition("K ≡ c: the zero-count identity does not apply".into()));
    }
    let chi = 2.0 - 2.0 * genus as f64;
    let b_term = if ty.b == 0.0 { 0.0 } else { 0.5 * ty.b * area(metric)? };
    Ok(PI * ty.a * chi + b_term + 2.0 * PI * n as f64)
}

/// 2∫‖∇K‖²μ + ∫(aK+b)(K−c)²μ.
pub fn stokes_identity(metric: &ConformalMetric, ty: &RicciType) -> Result<f64> {
    if metric.atlas == Atlas::Plane {
        return Err(Error::UnsupportedTopology("the Stokes identity needs a compact atlas".into()));
    }
    let (a, b, c) = (ty.a, ty.b, ty.c);
    let mut parts = Vec::new();
    for mp in &metric.factor.parts {
        let chart = mp.chart.clone();
        match &mp.values {
            Values::Analytic { eval, max_deg } => {
                if *max_deg < 3 {
                    return Err(Error::InsufficientSmoothness { need: 3, have: *max_deg });
                }
                let eval = eval.clone();
                let g: PointFn = Arc::new(move |x, y, d| {
                    let f = eval(x, y, d + 3);
                    let kj = curvature_jet(&f);
                    let k0 = kj.truncate(d);
                    (f.truncate(d) * 2.0).exp() * kj.grad_sq() * 2.0 + (k0 * a + b) * (k0 - c) * (k0 - c)
                });
                parts.push(ChartField::analytic(chart, g, max_deg - 3));
            }
            Values::Grid(fv) => {
                let (_, _, lapf) = grid_derivatives(&chart, fv)?;
                let kv: Vec<f64> = fv.iter().zip(&lapf).map(|(f, l)| (2.0 * f).exp() * l).collect();
                let (kx, ky, _) = grid_derivatives(&chart, &kv)?;
                let vals = (0..fv.len())
                    .map(|i| {
                        let k = kv[i];
                        2.0 * (2.0 * fv[i]).exp() * (kx[i] * kx[i] + ky[i] * ky[i]) + (a * k + b) * (k - c) * (k - c)
                    })
                    .collect();
                parts.push(ChartField::grid(chart, vals)?);
            }
        }
    }
    integrate(metric, &ScalarField::new(parts, Units::Dimensionless))
}
