//! Toda/Cartan classification of the conformal system, the sinh-Gordon and
//! Tzitzeica reductions, Gauss–Codazzi data of CMC immersions and the energy
//! ℰ = ∫K log|K| μ.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{
    curvature, curvature_jet, grid_derivatives, integrate, Chart, ChartField, ChartKind, ConformalMetric, PointFn,
    RicciType, ScalarField, Units, Values,
};
use crate::jet::Jet;
use crate::tolerances;
use crate::verify::{extract_witness, is_trivial_type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TodaLabel {
    A2,
    B2,
    #[serde(rename = "tB2")]
    TB2,
    G2,
    #[serde(rename = "tG2")]
    TG2,
    A1affine,
    A2affine,
    #[serde(rename = "tA2affine")]
    TA2affine,
    None,
}

/// Off-diagonal entries (m₁₂, m₂₁) of the Cartan matrices with diagonal 2.
pub const CARTAN_PATTERNS: [(TodaLabel, i64, i64); 8] = [
    (TodaLabel::A2, -1, -1),
    (TodaLabel::B2, -2, -1),
    (TodaLabel::TB2, -1, -2),
    (TodaLabel::G2, -1, -3),
    (TodaLabel::TG2, -3, -1),
    (TodaLabel::A1affine, -2, -2),
    (TodaLabel::A2affine, -1, -4),
    (TodaLabel::TA2affine, -4, -1),
];

#[derive(Clone, Debug, PartialEq)]
pub struct TodaClassification {
    pub input: RicciType,
    /// ξ = 2c/(2 − a).
    pub xi: f64,
    /// (−c/4)·[[2, 4/(2−a)], [2−a−b/c, 2]].
    pub matrix: [[f64; 2]; 2],
    pub label: TodaLabel,
}

impl Serialize for TodaClassification {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            a: f64,
            b: f64,
            c: f64,
            xi: f64,
            matrix: &'a [[f64; 2]; 2],
            label: TodaLabel,
        }
        let RicciType { a, b, c, .. } = self.input;
        Out { a, b, c, xi: self.xi, matrix: &self.matrix, label: self.label }.serialize(s)
    }
}

/// Nearest continued-fraction convergent with denominator ≤ 10⁶ that agrees
/// with v to rounding; a homothety can move b/c by an ulp or two.
fn exact(v: f64) -> Option<Ratio<i64>> {
    let tol = 1e-12 * v.abs().max(1.0);
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut x = v;
    for _ in 0..64 {
        if !x.is_finite() || x.abs() > 1e15 {
            break;
        }
        let q = x.floor();
        let qi = q as i64;
        let (h2, k2) = (qi.checked_mul(h1).and_then(|t| t.checked_add(h0)), qi.checked_mul(k1).and_then(|t| t.checked_add(k0)));
        let (Some(h2), Some(k2)) = (h2, k2) else { break };
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - v).abs() <= tol {
            return Some(Ratio::new(h1, k1));
        }
        let frac = x - q;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Matches the coefficient matrix of the system in the gauge |h|² = εξ against
/// the Cartan matrices, comparing (a, b/c) as exact rationals.
pub fn toda_classify(ty: &RicciType) -> Result<TodaClassification> {
    let RicciType { a, b, c, .. } = *ty;
    if !ty.is_finite() {
        return Err(Error::Precondition(format!("non-finite type {ty:?}")));
    }
    if a == 0.0 || a == 2.0 {
        return Err(Error::Precondition(format!("a must avoid {{0, 2}}, got a = {a}")));
    }
    if c == 0.0 {
        return Err(Error::Precondition("c must be nonzero".into()));
    }
    let eps = (c / (2.0 - a)).signum() as i8;
    if let Some(e) = ty.epsilon {
        if e != eps {
            return Err(Error::Precondition(format!("ε must be sgn(c/(2−a)) = {eps}, got {e}")));
        }
    }
    let two = Ratio::from_integer(2);
    // an irrational a or b/c matches no Cartan pattern
    let label = match (exact(a), exact(b / c)) {
        (Some(ar), Some(qr)) => {
            let (m12, m21) = (Ratio::from_integer(4) / (two - ar), two - ar - qr);
            CARTAN_PATTERNS
                .iter()
                .find(|&&(_, p, q)| m12 == Ratio::from_integer(p) && m21 == Ratio::from_integer(q))
                .map_or(TodaLabel::None, |p| p.0)
        }
        _ => TodaLabel::None,
    };
    let s = -c / 4.0;
    let matrix = [[2.0 * s, s * 4.0 / (2.0 - a)], [s * (2.0 - a - b / c), 2.0 * s]];
    Ok(TodaClassification { input: *ty, xi: 2.0 * c / (2.0 - a), matrix, label })
}

/// Applies op(ω, ¼Δω) pointwise, with ω = g(u₁).
fn pointwise_with_laplacian<G, F>(u1: &ScalarField, g: G, op: F) -> Result<ScalarField>
where
    G: Fn(Jet) -> Jet + Send + Sync + 'static,
    F: Fn(Jet, Jet) -> Jet + Send + Sync + 'static,
{
    let (g, op) = (Arc::new(g), Arc::new(op));
    let mut parts = Vec::new();
    for p in &u1.parts {
        match &p.values {
            Values::Analytic { eval, max_deg } => {
                if *max_deg < 2 {
                    return Err(Error::InsufficientSmoothness { need: 2, have: *max_deg });
                }
                let (eval, g, op) = (eval.clone(), g.clone(), op.clone());
                let r: PointFn = Arc::new(move |x, y, d| {
                    let w = g(eval(x, y, d + 2));
                    op(w.truncate(d), w.laplacian().scale(0.25))
                });
                parts.push(ChartField::analytic(p.chart.clone(), r, max_deg - 2));
            }
            Values::Grid(v) => {
                let w: Vec<f64> = v.iter().map(|&u| g(Jet::constant(u, 0)).value()).collect();
                let (_, _, lap) = grid_derivatives(&p.chart, &w)?;
                let vals = w
                    .iter()
                    .zip(lap)
                    .map(|(&w, l)| op(Jet::constant(w, 0), Jet::constant(0.25 * l, 0)).value())
                    .collect();
                parts.push(ChartField::grid(p.chart.clone(), vals)?);
            }
        }
    }
    Ok(ScalarField::new(parts, Units::Dimensionless))
}

/// ω_zz̄ + ½sinh(2ω) with ω = ½(u₁ + log c).
pub fn sinh_gordon_residual(u1: &ScalarField, c: f64) -> Result<ScalarField> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("need c > 0, got {c}")));
    }
    let lc = c.ln();
    pointwise_with_laplacian(
        u1,
        move |u| (u.add_const(lc)).scale(0.5),
        |w, wzz| wzz + ((w.scale(2.0)).exp() - (w.scale(-2.0)).exp()).scale(0.25),
    )
}

/// ω_zz̄ − e^(−2ω) + e^ω with ω = u₁ + log(c/2).
pub fn tzitzeica_residual(u1: &ScalarField, c: f64) -> Result<ScalarField> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("need c > 0, got {c}")));
    }
    let lc = (0.5 * c).ln();
    pointwise_with_laplacian(u1, move |u| u.add_const(lc), |w, wzz| wzz - w.scale(-2.0).exp() + w.exp())
}

/// Coordinate scale λ (z = λw) taking a Delaunay torus of type (a, 0, c), whose
/// witness has |h|² = |c|, to the coordinate where the reduction holds:
/// |h|² = 1/c for a = 4 and |h|² = 8/c² for a = 6.
pub fn reduction_scale(a: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("the reductions need c > 0, got {c}")));
    }
    if a == 4.0 {
        Ok(c.powf(-0.5))
    } else if a == 6.0 {
        Ok((8.0 / (c * c * c)).powf(1.0 / 6.0))
    } else {
        Err(Error::Precondition(format!("reductions exist for a ∈ {{4, 6}}, got {a}")))
    }
}

/// u₁ = −2F in the coordinate w = z/λ, where F(w) = f(λw) − log λ, sampled on
/// the rescaled torus chart.
pub fn reduction_u1(metric: &ConformalMetric, lambda: f64) -> Result<ScalarField> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!("need λ > 0, got {lambda}")));
    }
    let p = &metric.factor.parts[0];
    let (g1, g2) = match (p.chart.kind, p.chart.lattice) {
        (ChartKind::TorusFundamental, Some(l)) => l,
        _ => return Err(Error::UnsupportedTopology("the reduction is transported on torus charts".into())),
    };
    let chart = Chart::torus(g1 / lambda, g2 / lambda, p.chart.nx, p.chart.ny)?;
    let lnl = lambda.ln();
    let part = match &p.values {
        Values::Analytic { eval, max_deg } => {
            let eval = eval.clone();
            let u: PointFn = Arc::new(move |x, y, d| {
                eval(lambda * x, lambda * y, d).rescale_args(lambda).add_const(-lnl).scale(-2.0)
            });
            ChartField::analytic(chart, u, *max_deg)
        }
        Values::Grid(v) => ChartField::grid(chart, v.iter().map(|f| -2.0 * (f - lnl)).collect())?,
    };
    Ok(ScalarField::single(part, Units::Dimensionless))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Signature {
    /// Immersion into the Riemannian space form M³(c).
    Riemannian,
    /// Spacelike immersion into the Lorentzian space form M³₁(c).
    Lorentzian,
}

#[derive(Clone, Debug)]
pub struct ImmersionData {
    pub signature: Signature,
    pub space_curvature: f64,
    pub mean_curvature: f64,
    /// |Q| = |h|/2.
    pub q_modulus: ScalarField,
    /// sup |K − (c + H² − 4e^(4f)|Q|²)| (signs flipped for the Lorentzian case).
    pub gauss_residual: f64,
    /// sup |Δ log|Q|| away from zeros; zero iff Q is locally holomorphic up to a phase.
    pub codazzi_residual: f64,
    pub umbilic: bool,
}

/// Gauss–Codazzi data of the CMC immersion attached to a metric of type
/// (4, 0, c ± H²) with Q = h/2.
pub fn immersion_data_check(
    metric: &ConformalMetric,
    ty: &RicciType,
    space_curvature: f64,
    mean_curvature: f64,
    signature: Signature,
) -> Result<ImmersionData> {
    let h2 = mean_curvature * mean_curvature;
    let (ctilde, sign) = match signature {
        Signature::Riemannian => (space_curvature + h2, 1.0),
        Signature::Lorentzian => (space_curvature - h2, -1.0),
    };
    if ty.a != 4.0 || ty.b != 0.0 || (ty.c - ctilde).abs() > 1e-12 * ctilde.abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "{signature:?} data need type (4, 0, {ctilde}), got ({}, {}, {})",
            ty.a, ty.b, ty.c
        )));
    }
    let k = curvature(metric)?;
    let (klo, khi) = k.min_max();
    let slack = tolerances::RESIDUAL_GRID;
    let violated = match signature {
        Signature::Riemannian => khi > ctilde + slack,
        Signature::Lorentzian => klo < ctilde - slack,
    };
    if violated {
        return Err(Error::NoImmersion(format!(
            "{signature:?}: K ranges over [{klo}, {khi}], which violates the sign condition relative to {ctilde}"
        )));
    }
    if is_trivial_type(metric, ctilde)? {
        let gauss = k.map_samples(move |v| v - ctilde)?.sup_abs();
        return Ok(ImmersionData {
            signature,
            space_curvature,
            mean_curvature,
            q_modulus: ScalarField::constant(&metric.charts(), 0.0),
            gauss_residual: gauss,
            codazzi_residual: 0.0,
            umbilic: true,
        });
    }
    let w = extract_witness(metric, ty)?;
    let q = w.h_modulus.map_samples(|v| 0.5 * v)?;
    // K − c̃ = ∓4e^(4f)|Q|²
    let mut gauss = 0.0_f64;
    for ((fp, kp), qp) in metric.factor.parts.iter().zip(&k.parts).zip(&q.parts) {
        for ((f, kv), qv) in fp.samples().into_iter().zip(kp.samples()).zip(qp.samples()) {
            let d = kv - ctilde + sign * 4.0 * (4.0 * f).exp() * qv * qv;
            if d.is_finite() {
                gauss = gauss.max(d.abs());
            }
        }
    }
    Ok(ImmersionData {
        signature,
        space_curvature,
        mean_curvature,
        q_modulus: q,
        gauss_residual: gauss,
        codazzi_residual: w.cr_residual,
        umbilic: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyValue {
    pub value: f64,
    /// Radius of the disks removed around zeros of K; K log|K| is continuous
    /// there, so none are removed.
    pub exclusion_radius: f64,
}

fn k_log_k(k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * k.abs().ln()
    }
}

/// ℰ = ∫K log|K| μ, with K log|K| = 0 where K = 0.
pub fn energy(metric: &ConformalMetric) -> Result<EnergyValue> {
    if metric.euler_characteristic().is_none() {
        return Err(Error::UnsupportedTopology("the energy needs a compact atlas".into()));
    }
    let k = curvature(metric)?;
    let mut parts = Vec::new();
    for (mp, kp) in metric.factor.parts.iter().zip(&k.parts) {
        match &mp.values {
            Values::Analytic { eval, .. } => {
                let eval = eval.clone();
                let g: PointFn = Arc::new(move |x, y, _| Jet::constant(k_log_k(curvature_jet(&eval(x, y, 2)).value()), 0));
                parts.push(ChartField::analytic(mp.chart.clone(), g, 0));
            }
            Values::Grid(_) => {
                parts.push(ChartField::grid(mp.chart.clone(), kp.samples().into_iter().map(k_log_k).collect())?);
            }
        }
    }
    let value = integrate(metric, &ScalarField::new(parts, Units::Dimensionless))?;
    Ok(EnergyValue { value, exclusion_radius: 0.0 })
}

/// ℰ(e^(2t)ds²) − ℰ(ds²) + 4πtχ.
pub fn energy_scaling_defect(metric: &ConformalMetric, t: f64) -> Result<f64> {
    let chi = metric
        .euler_characteristic()
        .ok_or_else(|| Error::UnsupportedTopology("the energy needs a compact atlas".into()))?;
    let e0 = energy(metric)?.value;
    let et = energy(&metric.scaled(t))?.value;
    Ok(et - e0 + 4.0 * std::f64::consts::PI * t * chi as f64)
}

#[cfg(test)]
mod tests;
