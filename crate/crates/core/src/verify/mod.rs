//! Numerical checks that a metric is a generalized Ricci metric of a given type:
//! residuals, zeros of K − c with orders, the holomorphic witness, the two
//! integral identities and the topological obstructions.

mod admissibility;
mod residual;
mod witness;
mod zeros;

use serde::Serialize;

pub use admissibility::{admissibility, Admissibility, AdmissibilityQuery, ZeroData};
pub use residual::{
    area, curvature_equation_residual, is_trivial_type, k_minus_c, ricci_residual, stokes_identity,
    zero_count_identity, Residual,
};
pub(crate) use residual::{exclusion_centres, near};
pub use witness::{curvature_sign, extract_witness, HolomorphicWitness};
pub use zeros::{detect_zeros, detect_zeros_of, ZeroRecord};

use crate::error::{Error, Result};
use crate::geom::{Atlas, ConformalMetric, RicciType};
use crate::tolerances;

/// Text shown when K ≡ c.
pub const TRIVIAL_TEXT: &str = "K ≡ c (the defining equation holds identically)";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ToleranceSet {
    pub residual: f64,
    pub identity: f64,
    pub overlap: f64,
}

impl ToleranceSet {
    /// Defaults for the metric's representation, multiplied by `scale`.
    pub fn for_metric(metric: &ConformalMetric, scale: f64) -> Self {
        let residual = if metric.is_analytic() { tolerances::RESIDUAL_ODE } else { tolerances::RESIDUAL_GRID };
        ToleranceSet {
            residual: residual * scale,
            identity: tolerances::IDENTITY * scale,
            overlap: metric.overlap_tolerance() * scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    /// "trivial type", "generalized Ricci" or "not generalized Ricci".
    pub status: String,
    /// "constant curvature" or "non-constant curvature".
    pub curvature: String,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub residual_sup: f64,
    pub zeros: Vec<ZeroRecord>,
    #[serde(rename = "N")]
    pub n: u32,
    pub identity_51: Option<f64>,
    pub identity_52: Option<f64>,
    pub verdict: Verdict,
    pub tolerances: ToleranceSet,
}

fn genus_of(atlas: Atlas) -> Option<u32> {
    match atlas {
        Atlas::Sphere { .. } => Some(0),
        Atlas::Torus => Some(1),
        Atlas::Plane => None,
    }
}

/// Runs every check for `ty` on `metric` and collects a report.
pub fn verify(metric: &ConformalMetric, ty: &RicciType, tolerance_scale: f64) -> Result<VerificationReport> {
    metric.check_finite()?;
    let tol = ToleranceSet::for_metric(metric, tolerance_scale);
    let mut reasons = Vec::new();
    let overlap = metric.chart_consistency()?;
    if overlap > tol.overlap {
        reasons.push(format!("chart overlap mismatch {overlap:.3e} > {:.1e}", tol.overlap));
    }
    let (klo, khi) = crate::geom::curvature(metric)?.min_max();
    let constant = (khi - klo) <= tolerances::TRIVIAL_TYPE * klo.abs().max(khi.abs()).max(1.0);
    let curvature_label = if constant { "constant curvature" } else { "non-constant curvature" }.to_string();

    if is_trivial_type(metric, ty.c)? {
        return Ok(VerificationReport {
            residual_sup: 0.0,
            zeros: Vec::new(),
            n: 0,
            identity_51: None,
            identity_52: None,
            verdict: Verdict {
                pass: reasons.is_empty(),
                status: "trivial type".into(),
                curvature: curvature_label,
                reasons: if reasons.is_empty() { vec![TRIVIAL_TEXT.into()] } else { reasons },
            },
            tolerances: tol,
        });
    }

    let kc = k_minus_c(metric, ty.c)?;
    match curvature_sign(&kc) {
        Ok(s) => {
            if let Some(e) = ty.epsilon {
                if s != 0 && s != e {
                    reasons.push(format!("sign of K − c is {s}, declared ε = {e}"));
                }
            }
        }
        Err(e) => reasons.push(e.to_string()),
    }

    let zeros = match detect_zeros_of(&kc, metric.atlas) {
        Ok(z) => z,
        Err(e @ Error::NotAbsoluteValueType { .. }) => {
            reasons.push(e.to_string());
            Vec::new()
        }
        Err(e) => return Err(e),
    };
    let n: u32 = zeros.iter().map(|z| z.order).sum();

    let hmax = metric.charts().iter().map(|c| c.h()).fold(0.0, f64::max);
    let residual_sup = ricci_residual(metric, ty, 2.0 * hmax)?.sup();
    if !(residual_sup <= tol.residual) {
        reasons.push(format!("residual {residual_sup:.3e} > {:.1e}", tol.residual));
    }

    let (mut id51, mut id52) = (None, None);
    if let Some(g) = genus_of(metric.atlas) {
        let d51 = zero_count_identity(metric, ty, g, n)?;
        if !(d51.abs() <= tol.identity) {
            reasons.push(format!("zero-count identity defect {d51:.3e} > {:.1e}", tol.identity));
        }
        let d52 = stokes_identity(metric, ty)?;
        if !(d52.abs() <= tol.identity) {
            reasons.push(format!("Stokes identity defect {d52:.3e} > {:.1e}", tol.identity));
        }
        id51 = Some(d51);
        id52 = Some(d52);
    }

    let pass = reasons.is_empty();
    Ok(VerificationReport {
        residual_sup,
        zeros,
        n,
        identity_51: id51,
        identity_52: id52,
        verdict: Verdict {
            pass,
            status: if pass { "generalized Ricci" } else { "not generalized Ricci" }.into(),
            curvature: curvature_label,
            reasons,
        },
        tolerances: tol,
    })
}
