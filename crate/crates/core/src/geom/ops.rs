use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::fd::grid_derivatives;
use super::field::{ChartField, PointFn, ScalarField, Units, Values};
use super::quadrature::polar_disk;
use super::{Atlas, ConformalMetric};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// K = 4 e^(2f) f_zz̄ = e^(2f) Δ_flat f as a jet of degree deg(f) − 2.
pub fn curvature_jet(f: &Jet) -> Jet {
    (*f * 2.0).exp() * f.laplacian()
}

fn check_parts(metric: &ConformalMetric, field: &ScalarField) -> Result<()> {
    let a: Vec<_> = metric.factor.parts.iter().map(|p| (p.chart.kind, p.chart.nx, p.chart.ny)).collect();
    let b: Vec<_> = field.parts.iter().map(|p| (p.chart.kind, p.chart.nx, p.chart.ny)).collect();
    if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.0 != y.0) {
        return Err(Error::ChartMismatch(format!("metric charts {a:?} vs field charts {b:?}")));
    }
    Ok(())
}

pub fn curvature(metric: &ConformalMetric) -> Result<ScalarField> {
    let mut parts = Vec::with_capacity(metric.factor.parts.len());
    for p in &metric.factor.parts {
        match &p.values {
            Values::Analytic { eval, max_deg } => {
                if *max_deg < 2 {
                    return Err(Error::InsufficientSmoothness { need: 2, have: *max_deg });
                }
                let eval = eval.clone();
                let k: PointFn = Arc::new(move |x, y, d| curvature_jet(&eval(x, y, d + 2)));
                parts.push(ChartField::analytic(p.chart.clone(), k, max_deg - 2));
            }
            Values::Grid(v) => {
                let (_, _, lap) = grid_derivatives(&p.chart, v)?;
                let k = v.iter().zip(lap).map(|(f, l)| (2.0 * f).exp() * l).collect();
                parts.push(ChartField::grid(p.chart.clone(), k)?);
            }
        }
    }
    Ok(ScalarField::new(parts, Units::Curvature))
}

/// Δ = e^(2f) Δ_flat applied to `field`.
pub fn laplace_beltrami(metric: &ConformalMetric, field: &ScalarField) -> Result<ScalarField> {
    apply_operator(metric, field, 2, |f, g| (f * 2.0).exp() * g.laplacian(), |f, _gx, _gy, lap| {
        (2.0 * f).exp() * lap
    })
}

/// ‖∇u‖² = e^(2f)(u_x² + u_y²).
pub fn gradient_norm_sq(metric: &ConformalMetric, field: &ScalarField) -> Result<ScalarField> {
    apply_operator(metric, field, 1, |f, g| (f * 2.0).exp() * g.grad_sq(), |f, gx, gy, _lap| {
        (2.0 * f).exp() * (gx * gx + gy * gy)
    })
}

fn apply_operator<A, G>(metric: &ConformalMetric, field: &ScalarField, order: usize, analytic: A, grid: G) -> Result<ScalarField>
where
    A: Fn(Jet, Jet) -> Jet + Send + Sync + Clone + 'static,
    G: Fn(f64, f64, f64, f64) -> f64,
{
    check_parts(metric, field)?;
    let mut parts = Vec::new();
    for (mp, fp) in metric.factor.parts.iter().zip(&field.parts) {
        match (&mp.values, &fp.values) {
            (Values::Analytic { eval: fe, max_deg: fd }, Values::Analytic { eval: ge, max_deg: gd }) => {
                if *gd < order {
                    return Err(Error::InsufficientSmoothness { need: order, have: *gd });
                }
                let (fe, ge) = (fe.clone(), ge.clone());
                let op = analytic.clone();
                let out: PointFn = Arc::new(move |x, y, d| op(fe(x, y, d), ge(x, y, d + order)));
                parts.push(ChartField::analytic(fp.chart.clone(), out, (*fd).min(gd - order)));
            }
            _ => {
                let fv = mp.samples();
                let gv = fp.samples();
                let (gx, gy, lap) = grid_derivatives(&fp.chart, &gv)?;
                let vals = (0..fv.len()).map(|k| grid(fv[k], gx[k], gy[k], lap[k])).collect();
                parts.push(ChartField::grid(fp.chart.clone(), vals)?);
            }
        }
    }
    Ok(ScalarField::new(parts, field.units))
}

/// ∫ field · e^(−2f) dx dy over the atlas.
pub fn integrate(metric: &ConformalMetric, field: &ScalarField) -> Result<f64> {
    check_parts(metric, field)?;
    for c in &metric.cones {
        if c.beta <= -1.0 {
            return Err(Error::NonIntegrable(format!(
                "cone at ({}, {}) on chart {} with exponent {}",
                c.x, c.y, c.part, c.beta
            )));
        }
    }
    match metric.atlas {
        Atlas::Sphere { rho } => {
            let mut total = 0.0;
            for (k, (mp, fp)) in metric.factor.parts.iter().zip(&field.parts).enumerate() {
                total += integrate_disk(metric, k, mp, fp, rho.sqrt())?;
            }
            Ok(total)
        }
        Atlas::Torus => {
            let (mp, fp) = (&metric.factor.parts[0], &field.parts[0]);
            let fv = mp.samples();
            let gv = fp.samples();
            let area = mp.chart.cell_area().expect("torus chart carries a lattice");
            let w = area / mp.chart.len() as f64;
            sum_checked(mp, fv.iter().zip(&gv).map(|(f, g)| g * (-2.0 * f).exp() * w))
        }
        Atlas::Plane => {
            let (mp, fp) = (&metric.factor.parts[0], &field.parts[0]);
            let fv = mp.samples();
            let gv = fp.samples();
            let (hx, hy) = mp.chart.spacing();
            let (nx, ny) = (mp.chart.nx, mp.chart.ny);
            let terms = (0..fv.len()).map(|k| {
                let (i, j) = (k % nx, k / nx);
                let wx = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                let wy = if j == 0 || j == ny - 1 { 0.5 } else { 1.0 };
                gv[k] * (-2.0 * fv[k]).exp() * wx * wy * hx * hy
            });
            sum_checked(mp, terms)
        }
    }
}

fn sum_checked<I: Iterator<Item = f64>>(mp: &ChartField, it: I) -> Result<f64> {
    let mut s = 0.0;
    for (k, t) in it.enumerate() {
        if !t.is_finite() {
            let (x, y) = mp.chart.point(k % mp.chart.nx, k / mp.chart.nx);
            return Err(Error::NonFinite { chart: mp.chart.kind.to_string(), x, y });
        }
        s += t;
    }
    Ok(s)
}

/// Polar rule on one sphere chart. Singular cones off the chart centre are
/// excluded by a disk of radius δ and the result extrapolated in δ.
fn integrate_disk(metric: &ConformalMetric, part: usize, mp: &ChartField, fp: &ChartField, radius: f64) -> Result<f64> {
    if !(mp.is_analytic() && fp.is_analytic()) {
        return Err(Error::Precondition("sphere quadrature needs closed-form factor and field".into()));
    }
    let nr = mp.chart.nx.clamp(64, 256);
    let nodes = polar_disk(radius, nr, 2 * nr);
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|&(x, y, _)| fp.value_at(x, y) * (-2.0 * mp.value_at(x, y)).exp())
        .collect();
    let singular: Vec<_> = metric
        .cones
        .iter()
        .filter(|c| c.part == part && c.beta < 0.0 && (c.x != 0.0 || c.y != 0.0))
        .collect();
    let masked = |delta: f64| -> Result<f64> {
        let mut s = 0.0;
        for (&(x, y, w), v) in nodes.iter().zip(&vals) {
            if singular.iter().any(|c| (x - c.x).hypot(y - c.y) < delta) {
                continue;
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { chart: mp.chart.kind.to_string(), x, y });
            }
            s += w * v;
        }
        Ok(s)
    };
    if singular.is_empty() {
        return masked(0.0);
    }
    let h = mp.chart.h();
    let beta = singular.iter().map(|c| c.beta).fold(0.0_f64, f64::min);
    let p = 2.0 * beta + 2.0;
    let (i1, i2) = (masked(2.0 * h)?, masked(4.0 * h)?);
    Ok(i1 + (i1 - i2) / (2f64.powf(p) - 1.0))
}

/// ∫K μ − 2πχ with χ = 2 − 2·genus.
pub fn gauss_bonnet_check(metric: &ConformalMetric, genus: u32) -> Result<f64> {
    if metric.atlas == Atlas::Plane {
        return Err(Error::UnsupportedTopology("Gauss–Bonnet needs a compact atlas".into()));
    }
    let k = curvature(metric)?;
    let chi = 2.0 - 2.0 * genus as f64;
    Ok(integrate(metric, &k)? - 2.0 * PI * chi)
}
