//! The holomorphic witness h with ε|h|² = e^(−af)(K − c) (b = 0 only).

use std::sync::Arc;

use super::residual::k_minus_c;
use super::zeros::{chart_delta, chart_images, zero_candidates};
use crate::error::{Error, Result};
use crate::geom::{
    curvature_jet, grid_derivatives, ChartField, ChartKind, ConformalMetric, PointFn, RicciType, ScalarField, Units,
    Values,
};
use crate::jet::Jet;
use crate::tolerances;

#[derive(Clone, Debug)]
pub struct HolomorphicWitness {
    pub h_modulus: ScalarField,
    pub epsilon: i8,
    /// Auxiliary potential with Δφ = 1; never populated (b ≠ 0 is rejected).
    pub phi: Option<ScalarField>,
    /// arg h up to an additive constant, on zero-free planar charts.
    pub arg: Option<ScalarField>,
    /// Sup of |Δ_flat log|h|| away from the zeros.
    pub cr_residual: f64,
}

impl HolomorphicWitness {
    /// (min, max) of |h| over the samples.
    pub fn modulus_range(&self) -> (f64, f64) {
        self.h_modulus.min_max()
    }
}

/// Sign of K − c, or an error if it takes both signs beyond the zero threshold.
pub fn curvature_sign(kc: &ScalarField) -> Result<i8> {
    let (lo, hi) = kc.min_max();
    let thr = tolerances::ZERO_THRESHOLD * lo.abs().max(hi.abs());
    if lo < -thr && hi > thr {
        return Err(Error::NotGeneralizedRicci(format!("K − c changes sign (range [{lo:.3e}, {hi:.3e}])")));
    }
    Ok(if hi > thr { 1 } else if lo < -thr { -1 } else { 0 })
}

pub fn extract_witness(metric: &ConformalMetric, ty: &RicciType) -> Result<HolomorphicWitness> {
    if ty.b != 0.0 {
        return Err(Error::Precondition("witness extraction is implemented for b = 0 only".into()));
    }
    let kc = k_minus_c(metric, ty.c)?;
    let eps = match curvature_sign(&kc)? {
        0 => ty.epsilon.unwrap_or(1),
        s => s,
    };
    let a = ty.a;
    let epsf = eps as f64;

    let mut centres = vec![Vec::new(); metric.factor.parts.len()];
    for c in zero_candidates(&kc, metric.atlas) {
        for (part, x, y) in chart_images(metric.atlas, c.z) {
            centres[part].push((x, y));
        }
    }

    let mut modulus = Vec::new();
    let mut cr = 0.0_f64;
    let mut arg = None;
    for (k, (mp, kp)) in metric.factor.parts.iter().zip(&kc.parts).enumerate() {
        let chart = mp.chart.clone();
        let radius = 4.0 * chart.h();
        let excluded = |x: f64, y: f64| {
            centres[k].iter().any(|&(px, py)| {
                let (dx, dy) = chart_delta(&chart, x, y, px, py);
                dx.hypot(dy) < radius
            })
        };
        match (&mp.values, &kp.values) {
            (Values::Analytic { eval, .. }, Values::Analytic { .. }) => {
                let ev = eval.clone();
                let c = ty.c;
                let m: PointFn = Arc::new(move |x, y, d| {
                    let f = ev(x, y, d + 2);
                    let h2 = (f.truncate(d) * -a).exp() * (curvature_jet(&f) - c) * epsf;
                    if h2.value() <= 0.0 {
                        return Jet::constant(0.0, d);
                    }
                    h2.sqrt()
                });
                modulus.push(ChartField::analytic(chart.clone(), m, mp.max_deg() - 2));
                let ev = eval.clone();
                let log_h_lap = |x: f64, y: f64| -> f64 {
                    let f = ev(x, y, 4);
                    let lg = (curvature_jet(&f) - c).ln_abs();
                    0.5 * (lg.laplacian_value() - a * f.laplacian_value())
                };
                for (x, y) in chart.points() {
                    if excluded(x, y) {
                        continue;
                    }
                    let v = log_h_lap(x, y);
                    if v.is_finite() {
                        cr = cr.max(v.abs());
                    }
                }
                if chart.kind == ChartKind::PlaneRect && centres[k].is_empty() {
                    arg = Some(ScalarField::single(planar_arg(&chart, eval.clone(), c, a)?, Units::Dimensionless));
                }
            }
            _ => {
                let fv = mp.samples();
                let kv = kp.samples();
                let h2: Vec<f64> = fv.iter().zip(&kv).map(|(f, kc)| epsf * (-a * f).exp() * kc).collect();
                let lg: Vec<f64> = h2.iter().map(|v| 0.5 * v.abs().ln()).collect();
                let (_, _, lap) = grid_derivatives(&chart, &lg)?;
                for (i, (x, y)) in chart.points().into_iter().enumerate() {
                    if !excluded(x, y) && lap[i].is_finite() {
                        cr = cr.max(lap[i].abs());
                    }
                }
                modulus.push(ChartField::grid(chart.clone(), h2.iter().map(|v| v.max(0.0).sqrt()).collect())?);
            }
        }
    }
    Ok(HolomorphicWitness {
        h_modulus: ScalarField::new(modulus, Units::Dimensionless),
        epsilon: eps,
        phi: None,
        arg,
        cr_residual: cr,
    })
}

/// Integrates d(arg h) = −∂_y log|h| dx + ∂_x log|h| dy along the bottom row, then up each column.
fn planar_arg(chart: &crate::geom::Chart, eval: PointFn, c: f64, a: f64) -> Result<ChartField> {
    let grad = |x: f64, y: f64| -> (f64, f64) {
        let f = eval(x, y, 3);
        let lh = ((f.truncate(1) * -a).exp() * (curvature_jet(&f) - c)).ln_abs().scale(0.5);
        (lh.dx_value(), lh.dy_value())
    };
    let (hx, hy) = chart.spacing();
    let mut v = vec![0.0; chart.len()];
    let mut prev = grad(chart.point(0, 0).0, chart.point(0, 0).1);
    for i in 1..chart.nx {
        let (x, y) = chart.point(i, 0);
        let g = grad(x, y);
        v[chart.index(i, 0)] = v[chart.index(i - 1, 0)] - 0.5 * hx * (prev.1 + g.1);
        prev = g;
    }
    for i in 0..chart.nx {
        let (x, y) = chart.point(i, 0);
        let mut prev = grad(x, y);
        for j in 1..chart.ny {
            let (x, y) = chart.point(i, j);
            let g = grad(x, y);
            v[chart.index(i, j)] = v[chart.index(i, j - 1)] + 0.5 * hy * (prev.0 + g.0);
            prev = g;
        }
    }
    ChartField::grid(chart.clone(), v)
}
