//! Conformal changes by powers of |K − c|, type transport, the γ = 1 duality
//! and metrics built from a flat metric and a constant-curvature multiple of it.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{curvature, Chart, ChartField, ConformalMetric, PointFn, RicciType, ScalarField, Units, Values};
use crate::jet::{Jet, MAX_DEG};
use crate::tolerances;
use crate::verify::{curvature_sign, exclusion_centres, is_trivial_type, k_minus_c, near};

/// The conformal change ds² ↦ |K − c|^γ ds² for a metric of a given type.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransformSpec {
    pub gamma: f64,
    pub source_type: RicciType,
}

impl TransformSpec {
    pub fn new(gamma: f64, source_type: RicciType) -> Result<Self> {
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::Precondition(format!("γ must be a nonzero real, got {gamma}")));
        }
        Ok(TransformSpec { gamma, source_type })
    }

    /// K̃ = |K−c|^(−γ)((1 − γa/2)K − γb/2).
    pub fn predicted_curvature(&self, k: f64) -> f64 {
        let RicciType { a, b, c, .. } = self.source_type;
        let g = self.gamma;
        (k - c).abs().powf(-g) * ((1.0 - 0.5 * g * a) * k - 0.5 * g * b)
    }

    /// Jet version of [`Self::predicted_curvature`] in terms of K − c.
    fn predicted_jet(&self, kc: Jet) -> Jet {
        let RicciType { a, b, c, .. } = self.source_type;
        let g = self.gamma;
        kc.abs().powf(-g) * ((kc + c) * (1.0 - 0.5 * g * a) - 0.5 * g * b)
    }

    /// True when the transformed metric is flat (γ = 2/a and b = 0).
    pub fn predicts_flat(&self) -> bool {
        let RicciType { a, b, .. } = self.source_type;
        b == 0.0 && (self.gamma * a - 2.0).abs() < 1e-14
    }

    /// Predicted type of the transformed metric, or `None` when it is a
    /// constant-curvature metric outside the two transport formulas.
    pub fn predicted_type(&self) -> Option<RicciType> {
        type_transport(&self.source_type, self.gamma).ok()
    }
}

/// Applies `op(part, x, y, f, g)` chartwise to two fields on the same charts.
/// Closed-form inputs give a closed-form result of degree min(deg f, deg g).
pub(crate) fn zip_fields<F>(f: &ScalarField, g: &ScalarField, units: Units, op: F) -> Result<ScalarField>
where
    F: Fn(usize, f64, f64, Jet, Jet) -> Jet + Send + Sync + 'static,
{
    if f.parts.len() != g.parts.len()
        || f.parts.iter().zip(&g.parts).any(|(p, q)| p.chart.kind != q.chart.kind || p.chart.len() != q.chart.len())
    {
        return Err(Error::ChartMismatch(format!("{f:?} vs {g:?}")));
    }
    let op = Arc::new(op);
    let mut parts = Vec::with_capacity(f.parts.len());
    for (k, (p, q)) in f.parts.iter().zip(&g.parts).enumerate() {
        match (&p.values, &q.values) {
            (Values::Analytic { eval: ef, max_deg: df }, Values::Analytic { eval: eg, max_deg: dg }) => {
                let (ef, eg, op) = (ef.clone(), eg.clone(), op.clone());
                let h: PointFn = Arc::new(move |x, y, d| op(k, x, y, ef(x, y, d), eg(x, y, d)));
                parts.push(ChartField::analytic(p.chart.clone(), h, (*df).min(*dg)));
            }
            _ => {
                let (fv, gv) = (p.samples(), q.samples());
                let vals = p
                    .chart
                    .points()
                    .into_iter()
                    .enumerate()
                    .map(|(i, (x, y))| op(k, x, y, Jet::constant(fv[i], 0), Jet::constant(gv[i], 0)).value())
                    .collect();
                parts.push(ChartField::grid(p.chart.clone(), vals)?);
            }
        }
    }
    Ok(ScalarField::new(parts, units))
}

fn working_region(metric: &ConformalMetric, kc: &ScalarField) -> (Arc<Vec<Vec<(f64, f64)>>>, Arc<Vec<Chart>>, f64) {
    let hmax = metric.charts().iter().map(|c| c.h()).fold(0.0, f64::max);
    (Arc::new(exclusion_centres(metric, kc)), Arc::new(metric.charts()), 4.0 * hmax)
}

/// The metric |K−c|^γ ds² with factor f − (γ/2)log|K−c|, together with the
/// predicted curvature K̃. Disks of radius 4h around zeros of K − c are
/// excluded (NaN) from both fields.
pub fn power_transform(metric: &ConformalMetric, ty: &RicciType, gamma: f64) -> Result<(ConformalMetric, ScalarField)> {
    let spec = TransformSpec::new(gamma, *ty)?;
    if is_trivial_type(metric, ty.c)? {
        return Err(Error::DomainCollapse("K ≡ c, so |K − c|^γ ds² is degenerate everywhere".into()));
    }
    let kc = k_minus_c(metric, ty.c)?;
    let (centres, charts, radius) = working_region(metric, &kc);
    let excluded = move |k: usize, x: f64, y: f64| near(&charts[k], &centres[k], radius, x, y);
    let ex = excluded.clone();
    let factor = zip_fields(&metric.factor, &kc, Units::Dimensionless, move |k, x, y, f, kc| {
        if ex(k, x, y) {
            return Jet::constant(f64::NAN, f.deg().min(kc.deg()));
        }
        f.truncate(kc.deg()) - kc.ln_abs().scale(0.5 * gamma)
    })?;
    let predicted = zip_fields(&kc, &kc, Units::Curvature, move |k, x, y, kc, _| {
        if excluded(k, x, y) {
            return Jet::constant(f64::NAN, kc.deg());
        }
        spec.predicted_jet(kc)
    })?;
    let name = format!("|K − {}|^{gamma} · ({})", ty.c, metric.name);
    let out = ConformalMetric { atlas: metric.atlas, factor, cones: Vec::new(), name };
    Ok((out, predicted))
}

/// sup |K(transformed) − K̃| over the working region.
pub fn prediction_defect(transformed: &ConformalMetric, predicted: &ScalarField) -> Result<f64> {
    let k = curvature(transformed)?;
    Ok(zip_fields(&k, predicted, Units::Curvature, |_, _, _, a, b| a - b)?.sup_abs())
}

/// Type of |K−c|^γ ds²: the b = c = 0 rule for γ ≠ 1, or the γ = 1 duality rule.
pub fn type_transport(ty: &RicciType, gamma: f64) -> Result<RicciType> {
    let RicciType { a, b, c, .. } = *ty;
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::Precondition(format!("γ must be a nonzero real, got {gamma}")));
    }
    if gamma == 1.0 {
        let d = b + (a - 2.0) * c;
        if d == 0.0 {
            return Err(Error::Precondition(format!(
                "γ = 1 needs b ≠ (2 − a)c, got b = {b}, (2 − a)c = {}",
                (2.0 - a) * c
            )));
        }
        let eps = ty
            .epsilon
            .ok_or_else(|| Error::Precondition("γ = 1 needs the sign ε of K − c".into()))? as f64;
        let out = RicciType::new(2.0 * (a * c + b) / d, -2.0 * eps * b / d, eps * (1.0 - 0.5 * a));
        // K̃ − c̃ = −(d/2) ε (K − c)^(−1) = −(d/2)/|K − c|
        return Ok(out.with_epsilon(if d > 0.0 { -1 } else { 1 }));
    }
    if b != 0.0 || c != 0.0 {
        return Err(Error::Precondition(format!("γ ≠ 1 needs b = c = 0, got b = {b}, c = {c}")));
    }
    let den = 2.0 - gamma * a;
    if den == 0.0 {
        return Err(Error::Precondition(format!("γa ≠ 2 violated: γ = {gamma}, a = {a}")));
    }
    let mut out = RicciType::new(2.0 * a * (1.0 - gamma) / den, 0.0, 0.0);
    // K̃ = (1 − γa/2)|K|^(−γ)K
    if let Some(e) = ty.epsilon {
        out = out.with_epsilon(e * den.signum() as i8);
    }
    Ok(out)
}

/// Applies the γ = 1 transform twice and returns the sup distance of the
/// resulting factor from f − ½log|(b + (a−2)c)/2|.
pub fn duality_involution_check(metric: &ConformalMetric, ty: &RicciType) -> Result<f64> {
    let eps = match ty.epsilon {
        Some(e) => e,
        None => curvature_sign(&k_minus_c(metric, ty.c)?)?,
    };
    let ty = ty.with_epsilon(eps);
    let dual = type_transport(&ty, 1.0)?;
    let (m1, _) = power_transform(metric, &ty, 1.0)?;
    let (m2, _) = power_transform(&m1, &dual, 1.0)?;
    let shift = 0.5 * (0.5 * (ty.b + (ty.a - 2.0) * ty.c)).abs().ln();
    let d = zip_fields(&m2.factor, &metric.factor, Units::Dimensionless, move |_, _, _, f2, f| f2 - f.truncate(f2.deg()) + shift)?;
    Ok(d.sup_abs())
}

/// Types (2 + 2|κ|, 0, 0) and (2 − 2|κ|, 0, 0) of the two V-metrics.
pub fn v_construction_types(kappa: f64) -> (RicciType, RicciType) {
    let k = kappa.abs();
    (RicciType::new(2.0 + 2.0 * k, 0.0, 0.0), RicciType::new(2.0 - 2.0 * k, 0.0, 0.0))
}

/// From a flat metric and V > 0 with V·flat of constant curvature κ ≠ 0,
/// returns ds²₊ = V^(−1/|κ|)·flat and ds²₋ = V^(1/|κ|)·flat.
pub fn v_construction(flat: &ConformalMetric, v: &ScalarField, kappa: f64) -> Result<(ConformalMetric, ConformalMetric)> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(Error::Precondition(format!("κ must be nonzero, got {kappa}")));
    }
    let tol = if flat.is_analytic() { tolerances::RESIDUAL_CLOSED_FORM } else { tolerances::RESIDUAL_GRID };
    let (vlo, _) = v.min_max();
    if !(vlo > 0.0) {
        return Err(Error::Precondition(format!("V must be positive, min V = {vlo}")));
    }
    let k0 = curvature(flat)?.sup_abs();
    if k0 > tol {
        return Err(Error::Precondition(format!("base metric is not flat: sup|K| = {k0:.3e}")));
    }
    let with_power = |s: f64| -> Result<ScalarField> {
        zip_fields(&flat.factor, v, Units::Dimensionless, move |_, _, _, f, v| f - v.ln().scale(0.5 * s))
    };
    let conformal = ConformalMetric { factor: with_power(1.0)?, cones: Vec::new(), name: "V·flat".into(), ..flat.clone() };
    let dk = curvature(&conformal)?.map_samples(|k| k - kappa)?.sup_abs();
    if dk > tol {
        return Err(Error::Precondition(format!("V·flat does not have curvature κ = {kappa}: defect {dk:.3e}")));
    }
    let e = 1.0 / kappa.abs();
    let plus = ConformalMetric { factor: with_power(-e)?, name: format!("V^(−{e})·({})", flat.name), ..flat.clone() };
    let minus = ConformalMetric { factor: with_power(e)?, name: format!("V^({e})·({})", flat.name), ..flat.clone() };
    Ok((plus, minus))
}

/// Factor f of the conical model 4(β+1)²|z|^(2β) / (1 + κ|z|^(2β+2))² |dz|²,
/// which has constant curvature κ and a cone of order β at 0.
pub fn conical_model_factor(beta: f64, kappa: f64) -> PointFn {
    Arc::new(move |x, y, d| {
        let (jx, jy) = (Jet::var_x(x, d), Jet::var_y(y, d));
        let r2 = jx * jx + jy * jy;
        let p = r2.powf(beta + 1.0);
        (p * kappa + 1.0).ln() - r2.ln().scale(0.5 * beta) - (2.0 * (beta + 1.0)).ln()
    })
}

/// Metric with a zero of order m of √|K| at 0, assembled from the conical
/// constant-curvature model e^(2v)|z|^(2m)|dz|² of curvature κ and the flat cone
/// |z|^(4m/a)|dz|² (u = 0): ds² = e^(4v/(2−a))|dz|², of type (a, 0, 0).
/// κ = a/2 − 1 for a ∈ (0,2) ∪ (2,∞) (K < 0 off 0) and κ = 1 − a/2 for a < 0 (K > 0).
pub fn conical_v_metric(a: f64, m: u32, n: usize) -> Result<ConformalMetric> {
    if m == 0 || !(a < 0.0 || (a > 0.0 && a != 2.0)) || !a.is_finite() {
        return Err(Error::Precondition(format!("need m ≥ 1 and a ∈ (−∞,0) ∪ (0,2) ∪ (2,∞), got a = {a}, m = {m}")));
    }
    let kappa = if a > 0.0 { 0.5 * a - 1.0 } else { 1.0 - 0.5 * a };
    let p = m + 1;
    // keep 1 + κ|z|^(2m+2) ≥ 1/2 when κ < 0
    let radius = if kappa < 0.0 { (0.5 / kappa.abs()).powf(1.0 / (2.0 * p as f64)) } else { 1.0 };
    let chart = Chart::plane((-radius, radius), (-radius, radius), n, n)?;
    let s = -2.0 / (2.0 - a);
    let f: PointFn = Arc::new(move |x, y, d| {
        let (jx, jy) = (Jet::var_x(x, d), Jet::var_y(y, d));
        let v = ((jx * jx + jy * jy).powi(p) * kappa + 1.0).ln().scale(-1.0) + (2.0 * p as f64).ln();
        v.scale(s)
    });
    ConformalMetric::plane(chart, f, MAX_DEG, &format!("conical V-metric a={a} m={m}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::standard::{flat_plane, round_sphere};
    use crate::ode::{rotational_metric, solve_rotational, sphere2_metric, Sphere2Params};
    use crate::verify::{detect_zeros_of, ricci_residual};
    use crate::geom::Atlas;

    fn sphere2(ell: u32, n: usize) -> ConformalMetric {
        sphere2_metric(Sphere2Params::new(ell, 0.0).unwrap(), n).unwrap()
    }

    #[test]
    fn flatness_and_constant_curvature_of_powers() {
        let m = sphere2(1, 64);
        let ty = RicciType::new(-2.0, 0.0, 0.0);
        let (flat, pred) = power_transform(&m, &ty, -1.0).unwrap();
        assert!(pred.sup_abs() < 1e-14);
        let k = curvature(&flat).unwrap().sup_abs();
        assert!(k < 1e-5, "{k}");
        let (cc, _) = power_transform(&m, &ty, 1.0).unwrap();
        let (lo, hi) = curvature(&cc).unwrap().min_max();
        assert!((lo - 2.0).abs() < 1e-5 && (hi - 2.0).abs() < 1e-5, "{lo} {hi}");
    }

    #[test]
    fn prediction_matches_recomputed_curvature() {
        let m = sphere2(2, 48);
        let ty = RicciType::new(-4.0, 0.0, 0.0);
        for g in [-0.7, 0.3, 1.0, 2.5] {
            let (t, pred) = power_transform(&m, &ty, g).unwrap();
            let d = prediction_defect(&t, &pred).unwrap();
            assert!(d < 1e-5, "γ={g}: {d}");
        }
    }

    #[test]
    fn constants_through_the_formula() {
        let m = round_sphere(1.0, 32).unwrap();
        let ty = RicciType::new(3.0, 1.0, 4.0);
        let (t, pred) = power_transform(&m, &ty, 1.0).unwrap();
        let want = (1.0f64 / 3.0) * ((1.0 - 1.5) * 1.0 - 0.5);
        let (lo, hi) = pred.min_max();
        assert!((lo - want).abs() < 1e-14 && (hi - want).abs() < 1e-14);
        // curvature of the rescaled round sphere is 1/|1 − 4|, not the prediction: the type is wrong
        let (klo, _) = curvature(&t).unwrap().min_max();
        assert!((klo - 1.0 / 3.0).abs() < 1e-10);
        assert!(matches!(
            power_transform(&m, &RicciType::new(0.0, 0.0, 1.0), 1.0),
            Err(Error::DomainCollapse(_))
        ));
        assert!(power_transform(&m, &ty, 0.0).is_err());
    }

    #[test]
    fn transported_types() {
        let t = type_transport(&RicciType::new(4.0, 0.0, 0.0), -1.0).unwrap();
        assert!((t.a - 8.0 / 3.0).abs() < 1e-15 && t.b == 0.0 && t.c == 0.0);
        let t = type_transport(&RicciType::new(6.0, -2.0, 1.0).with_epsilon(-1), 1.0).unwrap();
        assert_eq!((t.a, t.b, t.c), (4.0, -2.0, 2.0));
        for g in [-3.0, 0.5, 2.0, 7.0] {
            let t = type_transport(&RicciType::new(2.0, 0.0, 0.0), g).unwrap();
            assert!((t.a - 2.0).abs() < 1e-14);
        }
        assert!(type_transport(&RicciType::new(2.0, 0.0, 0.0), 1.0).is_err());
        assert!(type_transport(&RicciType::new(4.0, 0.0, 0.0), 0.5).is_err());
        assert!(type_transport(&RicciType::new(4.0, 1.0, 0.0), 0.5).is_err());
        assert!(type_transport(&RicciType::new(6.0, -2.0, 1.0), 1.0).is_err());
        assert!(type_transport(&RicciType::new(1.0, 1.0, 1.0).with_epsilon(1), 1.0).is_err());
    }

    #[test]
    fn transported_type_is_verified() {
        // rotational sphere of type (−2, 0, 1) with K > 1 away from the origin
        let p = solve_rotational(1, 1.0, 1.0, 0.5 * (1.0f64 / 16.0 + 1.0 / 8.0).ln()).unwrap();
        let m = rotational_metric(&p, 48).unwrap();
        let ty = RicciType::new(-2.0, 0.0, 1.0).with_epsilon(1);
        let dual = type_transport(&ty, 1.0).unwrap();
        assert_eq!((dual.a, dual.b, dual.c), (1.0, 0.0, 2.0));
        let (t, pred) = power_transform(&m, &ty, 1.0).unwrap();
        assert!(prediction_defect(&t, &pred).unwrap() < 1e-5);
        let hmax = t.charts().iter().map(|c| c.h()).fold(0.0, f64::max);
        let r = ricci_residual(&t, &dual, 2.0 * hmax).unwrap();
        assert!(r.sup() < 1e-5, "{}", r.sup());
        let d = duality_involution_check(&m, &ty).unwrap();
        assert!(d < 1e-5, "{d}");
    }

    #[test]
    fn duality_on_constant_curvature_is_exact() {
        // aκ + b = 0 makes the round sphere a metric of type (2, −2, 3)
        let m = round_sphere(1.0, 24).unwrap();
        let d = duality_involution_check(&m, &RicciType::new(2.0, -2.0, 3.0)).unwrap();
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn homothety_commutes_with_power_transform() {
        let m = sphere2(1, 32);
        let ty = RicciType::new(-2.0, 0.0, 0.0);
        let (t, g) = (0.4, 0.6);
        let (a, _) = power_transform(&m.scaled(t), &ty.homothety(t.exp()), g).unwrap();
        let (b, _) = power_transform(&m, &ty, g).unwrap();
        let b = b.scaled(t * (1.0 - g));
        let d = zip_fields(&a.factor, &b.factor, Units::Dimensionless, |_, _, _, x, y| x - y).unwrap();
        assert!(d.sup_abs() < 1e-10);
    }

    #[test]
    fn flatness_check_detects_perturbations() {
        let m = sphere2(1, 64).perturbed(0.05, (0.4, 0.1), 0.3);
        let ty = RicciType::new(-2.0, 0.0, 0.0);
        let hmax = m.charts().iter().map(|c| c.h()).fold(0.0, f64::max);
        assert!(ricci_residual(&m, &ty, 2.0 * hmax).unwrap().sup() > 1e-2);
        let (flat, _) = power_transform(&m, &ty, -1.0).unwrap();
        assert!(curvature(&flat).unwrap().sup_abs() > 1e-3);
    }

    #[test]
    fn v_construction_of_round_metric() {
        let chart = Chart::plane((-1.5, 1.5), (-1.5, 1.5), 48, 48).unwrap();
        let flat = flat_plane(chart.clone()).unwrap();
        let v = ScalarField::from_jet_fn(&[chart], MAX_DEG, Units::Dimensionless, |x, y, d| {
            let (jx, jy) = (Jet::var_x(x, d), Jet::var_y(y, d));
            (jx * jx + jy * jy + 1.0).powi(2).recip().scale(4.0)
        });
        let (plus, minus) = v_construction(&flat, &v, 1.0).unwrap();
        let (lo, hi) = curvature(&minus).unwrap().min_max();
        assert!((lo - 1.0).abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
        let kp = curvature(&plus).unwrap();
        let vv = v.samples();
        let want = kp.samples()[0].iter().zip(&vv[0]).map(|(k, v)| (k + v * v).abs()).fold(0.0, f64::max);
        assert!(want < 1e-10);
        let (tp, _) = v_construction_types(1.0);
        assert_eq!(tp.a, 4.0);
        let h = plus.charts()[0].h();
        assert!(ricci_residual(&plus, &tp, 2.0 * h).unwrap().sup() < 1e-5);
        // V that is not a constant-curvature multiple is rejected
        let bad = ScalarField::constant(&flat.charts(), 2.0);
        assert!(matches!(v_construction(&flat, &bad, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn conical_v_metric_extends_with_zero_of_order_m() {
        let m = conical_v_metric(4.0, 1, 256).unwrap();
        let kc = k_minus_c(&m, 0.0).unwrap();
        let (_, hi) = kc.min_max();
        assert!(hi <= 0.0);
        let z = detect_zeros_of(&kc, Atlas::Plane).unwrap();
        assert_eq!(z.len(), 1, "{z:?}");
        assert_eq!(z[0].order, 1);
        assert!(z[0].x.hypot(z[0].y) < 1e-6);
        let h = m.charts()[0].h();
        let r = ricci_residual(&m, &RicciType::new(4.0, 0.0, 0.0), 2.0 * h).unwrap();
        assert!(r.sup() < 1e-6, "{}", r.sup());
        // a < 0 gives K > 0 with a zero of order m
        let m = conical_v_metric(-3.0, 2, 256).unwrap();
        let kc = k_minus_c(&m, 0.0).unwrap();
        assert!(kc.min_max().0 >= 0.0);
        let z = detect_zeros_of(&kc, Atlas::Plane).unwrap();
        assert_eq!(z.iter().map(|z| z.order).collect::<Vec<_>>(), vec![2]);
        assert!(conical_v_metric(2.0, 1, 32).is_err());
    }

    #[test]
    fn conical_model_has_constant_curvature() {
        let f = conical_model_factor(0.5, 2.0);
        for &(x, y) in &[(0.3, 0.2), (-0.5, 0.1), (0.05, -0.4)] {
            let k = crate::geom::curvature_jet(&f(x, y, 2)).value();
            assert!((k - 2.0).abs() < 1e-10, "{k}");
        }
    }
}
