//! Sphere metrics from a rational map G: pullback spherical cone metric,
//! flat cone metric with the same cone points, and their combination
//! V^(2/(2−a))·dσ₀² with V = dσ²/dσ₀².

pub mod poly;

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{curvature, curvature_jet, Cone, ConformalMetric, PointFn, Units};
use crate::jet::{CJet, Jet, MAX_DEG};
use crate::tolerances;
use crate::transform::zip_fields;
use poly::Poly;

/// G = numerator/denominator, coefficients in ascending powers as [re, im].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalMap {
    pub numerator: Vec<[f64; 2]>,
    #[serde(default = "one")]
    pub denominator: Vec<[f64; 2]>,
}

fn one() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

fn to_poly(c: &[[f64; 2]]) -> Poly {
    poly::trim(c.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
}

fn from_poly(p: &[Complex64]) -> Vec<[f64; 2]> {
    p.iter().map(|c| [c.re, c.im]).collect()
}

impl RationalMap {
    pub fn new(numerator: &[Complex64], denominator: &[Complex64]) -> Result<Self> {
        let m = RationalMap { numerator: from_poly(numerator), denominator: from_poly(denominator) };
        m.validate()?;
        Ok(m)
    }

    /// The polynomial map with the given real coefficients.
    pub fn polynomial(coefficients: &[f64]) -> Result<Self> {
        let p: Poly = coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Self::new(&p, &[Complex64::new(1.0, 0.0)])
    }

    /// z^k.
    pub fn monomial(k: usize) -> Result<Self> {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Self::polynomial(&c)
    }

    pub fn numerator_poly(&self) -> Poly {
        to_poly(&self.numerator)
    }

    pub fn denominator_poly(&self) -> Poly {
        to_poly(&self.denominator)
    }

    pub fn degree(&self) -> usize {
        let p = poly::degree(&self.numerator_poly()).unwrap_or(0);
        let q = poly::degree(&self.denominator_poly()).unwrap_or(0);
        p.max(q)
    }

    /// Degree ≥ 1, finite coefficients, nonzero denominator, no common roots.
    pub fn validate(&self) -> Result<()> {
        let (p, q) = (self.numerator_poly(), self.denominator_poly());
        if p.iter().chain(&q).any(|c| !c.is_finite()) {
            return Err(Error::Precondition("rational map has non-finite coefficients".into()));
        }
        let (dp, dq) = match (poly::degree(&p), poly::degree(&q)) {
            (Some(dp), Some(dq)) => (dp, dq),
            (_, None) => return Err(Error::Precondition("denominator is zero".into())),
            (None, _) => return Err(Error::Precondition("numerator is zero".into())),
        };
        if dp.max(dq) == 0 {
            return Err(Error::Precondition("constant map".into()));
        }
        let (small, other) = if dp <= dq { (&p, &q) } else { (&q, &p) };
        if poly::degree(small).unwrap_or(0) > 0 {
            for (r, _) in poly::roots(small)? {
                if poly::eval(other, r).norm() <= 1e-10 * poly::eval_scale(other, r) {
                    return Err(Error::Precondition(format!("numerator and denominator share the root {r}")));
                }
            }
        }
        Ok(())
    }

    /// G(z), `None` at poles.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let q = poly::eval(&self.denominator_poly(), z);
        if q.norm() == 0.0 {
            None
        } else {
            Some(poly::eval(&self.numerator_poly(), z) / q)
        }
    }

    /// The pair (w^d P(1/w), w^d Q(1/w)) describing G(1/w).
    pub fn reversed(&self) -> (Poly, Poly) {
        let d = self.degree();
        (poly::reversed(&self.numerator_poly(), d), poly::reversed(&self.denominator_poly(), d))
    }

    /// G∘M for M(z) = (αz + β)/(γz + δ) given as [α, β, γ, δ].
    pub fn precompose_mobius(&self, m: [Complex64; 4]) -> Result<Self> {
        let [al, be, ga, de] = m;
        if (al * de - be * ga).norm() == 0.0 {
            return Err(Error::Precondition("degenerate Möbius transformation".into()));
        }
        let d = self.degree();
        let num = vec![be, al];
        let den = vec![de, ga];
        let compose = |p: &Poly| -> Poly {
            let mut out = vec![Complex64::new(0.0, 0.0)];
            for (k, c) in p.iter().enumerate() {
                let mut term = vec![*c];
                for _ in 0..k {
                    term = poly::mul(&term, &num);
                }
                for _ in k..d {
                    term = poly::mul(&term, &den);
                }
                out = poly::add(&out, &term);
            }
            poly::trim(out)
        };
        Self::new(&compose(&self.numerator_poly()), &compose(&self.denominator_poly()))
    }

    /// P′Q − PQ′. Its degree is at most 2d − 2; coefficients above that, or
    /// leading ones below 10⁻¹³ of the largest, are rounding and dropped.
    pub fn wronskian(&self) -> Poly {
        let mut w = wronskian(&self.numerator_poly(), &self.denominator_poly());
        let big = w.iter().map(|c| c.norm()).fold(0.0, f64::max);
        w.truncate(2 * self.degree() - 1);
        while w.len() > 1 && w.last().map_or(false, |c| c.norm() <= 1e-13 * big) {
            w.pop();
        }
        w
    }
}

fn wronskian(p: &[Complex64], q: &[Complex64]) -> Poly {
    poly::trim(poly::sub(&poly::mul(&poly::derivative(p), q), &poly::mul(p, &poly::derivative(q))))
}

/// A cone point p (None = ∞) with integer order m.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicalDatum {
    pub point: Option<(f64, f64)>,
    pub order: u32,
}

impl ConicalDatum {
    pub fn z(&self) -> Option<Complex64> {
        self.point.map(|(x, y)| Complex64::new(x, y))
    }
}

/// Critical points of G with multiplicities, ∞ included; Riemann–Hurwitz
/// Σm = 2·deg G − 2 is asserted.
pub fn critical_data(map: &RationalMap) -> Result<Vec<ConicalDatum>> {
    map.validate()?;
    let d = map.degree();
    let w = map.wronskian();
    let dw = poly::degree(&w).ok_or_else(|| Error::RootFinding {
        msg: "Wronskian vanishes identically".into(),
        condition: f64::INFINITY,
    })?;
    let mut out: Vec<ConicalDatum> = if dw == 0 {
        Vec::new()
    } else {
        poly::roots(&w)?.into_iter().map(|(r, m)| ConicalDatum { point: Some((r.re, r.im)), order: m }).collect()
    };
    let m_inf = 2 * d - 2 - dw;
    if m_inf > 0 {
        out.push(ConicalDatum { point: None, order: m_inf as u32 });
    }
    let total: u32 = out.iter().map(|c| c.order).sum();
    if 2 + total as usize != 2 * d {
        return Err(Error::RootFinding {
            msg: format!("Riemann–Hurwitz fails: 2 + Σm = {} but 2·deg G = {}", 2 + total, 2 * d),
            condition: f64::INFINITY,
        });
    }
    Ok(out)
}

/// Σm = 2ℓ and every m ≤ ℓ.
pub fn validate_partition(orders: &[u32], ell: u32) -> Result<()> {
    let total: u32 = orders.iter().sum();
    if total != 2 * ell {
        return Err(Error::Precondition(format!("orders {orders:?} sum to {total}, not 2ℓ = {}", 2 * ell)));
    }
    if let Some(m) = orders.iter().find(|&&m| m == 0 || m > ell) {
        return Err(Error::Precondition(format!("order {m} is outside 1..=ℓ = {ell}")));
    }
    Ok(())
}

/// Cones on the ρ = 1 sphere atlas, each in the chart where it is interior.
fn cones_of(data: &[ConicalDatum], beta: impl Fn(u32) -> f64) -> Vec<Cone> {
    data.iter()
        .map(|c| {
            let (part, x, y) = match c.z() {
                None => (1, 0.0, 0.0),
                Some(z) if z.norm() > 1.0 => {
                    let w = 1.0 / z;
                    (1, w.re, w.im)
                }
                Some(z) => (0, z.re, z.im),
            };
            Cone { part, x, y, beta: beta(c.order) }
        })
        .collect()
}

/// −½log(4/κ) − log|W| + log(|P|² + |Q|²) for the polynomial pair (P, Q).
fn spherical_factor(p: Poly, q: Poly, kappa: f64) -> PointFn {
    let w = wronskian(&p, &q);
    let c = -0.5 * (4.0 / kappa).ln();
    Arc::new(move |x, y, d| {
        let z = CJet::z(x, y, d);
        let (pv, qv, wv) = (poly::eval_jet(&p, z), poly::eval_jet(&q, z), poly::eval_jet(&w, z));
        (pv.norm_sqr() + qv.norm_sqr()).ln() - wv.norm_sqr().ln().scale(0.5) + c
    })
}

/// dσ² = (4/(ℓ+1))|G′|²/(1+|G|²)²|dz|², curvature ℓ+1 off the critical points,
/// with cones of order m at the critical points.
pub fn pullback_spherical(map: &RationalMap, ell: u32, n: usize) -> Result<ConformalMetric> {
    map.validate()?;
    if map.degree() != ell as usize + 1 {
        return Err(Error::Precondition(format!("deg G = {} but ℓ + 1 = {}", map.degree(), ell + 1)));
    }
    let kappa = ell as f64 + 1.0;
    let (pr, qr) = map.reversed();
    let fz = spherical_factor(map.numerator_poly(), map.denominator_poly(), kappa);
    let fw = spherical_factor(pr, qr, kappa);
    let data = critical_data(map)?;
    let metric = ConformalMetric::sphere(1.0, n, fz, fw, MAX_DEG, &format!("pullback of dσ² (K = {kappa})"))?;
    Ok(metric.with_cones(cones_of(&data, |m| m as f64)))
}

/// dσ₀² = C·Π|z − p_j|^((4/a)m_j)|dz|² for finite p_j; the exponent at ∞ is
/// determined by Σm_j = −a.
pub fn flat_conical(data: &[ConicalDatum], a: f64, scale: f64, n: usize) -> Result<ConformalMetric> {
    if !(a < 0.0) || !(scale > 0.0) {
        return Err(Error::Precondition(format!("need a < 0 and C > 0, got a = {a}, C = {scale}")));
    }
    let total: u32 = data.iter().map(|c| c.order).sum();
    if (total as f64 + a).abs() > 1e-12 {
        return Err(Error::Precondition(format!("Σm = {total} but −a = {}", -a)));
    }
    if data.iter().filter(|c| c.point.is_none()).count() > 1 {
        return Err(Error::Precondition("∞ listed twice".into()));
    }
    for (i, c) in data.iter().enumerate() {
        for e in &data[i + 1..] {
            if let (Some(p), Some(q)) = (c.z(), e.z()) {
                if (p - q).norm() <= 1e-12 * p.norm().max(1.0) {
                    return Err(Error::Precondition(format!("coincident cone points at {p}")));
                }
            }
        }
    }
    let finite: Vec<(Complex64, f64)> = data.iter().filter_map(|c| c.z().map(|p| (p, (2.0 / a) * c.order as f64))).collect();
    let m_fin: f64 = finite.iter().map(|(_, b)| b).sum();
    let c0 = -0.5 * scale.ln();
    let fin = Arc::new(finite);
    let fz_pts = fin.clone();
    let fz: PointFn = Arc::new(move |x, y, d| {
        let z = CJet::z(x, y, d);
        fz_pts.iter().fold(Jet::constant(c0, d), |acc, (p, b)| {
            acc - z.add_complex(-p.re, -p.im).norm_sqr().ln().scale(0.5 * b)
        })
    });
    let fw: PointFn = Arc::new(move |x, y, d| {
        let w = CJet::z(x, y, d);
        let base = w.norm_sqr().ln().scale(0.5 * (m_fin + 2.0)).add_const(c0);
        fin.iter().fold(base, |acc, (p, b)| {
            acc - w.mul_complex(-p.re, -p.im).add_complex(1.0, 0.0).norm_sqr().ln().scale(0.5 * b)
        })
    });
    let metric = ConformalMetric::sphere(1.0, n, fz, fw, MAX_DEG, &format!("flat cone metric a = {a}"))?;
    Ok(metric.with_cones(cones_of(data, |m| (2.0 / a) * m as f64)))
}

const CLOSED_FORM_RADIUS: f64 = 1e-3;

/// Circle-mean log-slope β of the area density e^(−2f) ~ r^(2β) at a chart
/// point, fitted over radii in [4h, 16h] (in [r₀, 4r₀], r₀ = 10⁻³, for closed-form factors).
pub fn cone_exponent(metric: &ConformalMetric, part: usize, x: f64, y: f64) -> f64 {
    let field = &metric.factor.parts[part];
    let base = if field.is_analytic() { CLOSED_FORM_RADIUS } else { 4.0 * field.chart.h() };
    let k = 12;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..k {
        let r = base * 4f64.powf(i as f64 / (k - 1) as f64);
        let mean = (0..64)
            .map(|j| {
                let t = TAU * (j as f64 + 0.5) / 64.0;
                field.value_at(x + r * t.cos(), y + r * t.sin())
            })
            .sum::<f64>()
            / 64.0;
        let (lx, ly) = (r.ln(), -mean);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let kf = k as f64;
    (kf * sxy - sx * sy) / (kf * sxx - sx * sx)
}

/// Annulus means of the factor on r ∈ [r_k, 2r_k], r_k = r0·2^(−k), k = 1..6,
/// must be finite and settle (last jump ≤ 0.6·first jump).
fn extension_check(metric: &ConformalMetric, cone: &Cone, r0: f64) -> Result<()> {
    let field = &metric.factor.parts[cone.part];
    let mut means = Vec::new();
    for k in 1..=6 {
        let rk = r0 * 0.5f64.powi(k);
        let mut s = 0.0;
        let mut cnt = 0.0;
        for i in 0..4 {
            let r = rk * (1.0 + (i as f64 + 0.5) / 4.0);
            for j in 0..32 {
                let t = TAU * (j as f64 + 0.5) / 32.0;
                s += field.value_at(cone.x + r * t.cos(), cone.y + r * t.sin());
                cnt += 1.0;
            }
        }
        let m = s / cnt;
        if !m.is_finite() {
            return Err(Error::Extension(format!("factor not finite near cone at ({}, {}) on chart {}", cone.x, cone.y, cone.part)));
        }
        means.push(m);
    }
    let first = (means[1] - means[0]).abs();
    let last = (means[5] - means[4]).abs();
    if last > 0.6 * first + 1e-9 {
        return Err(Error::Extension(format!(
            "factor does not settle near cone at ({}, {}) on chart {}: annulus jumps {first:.3e} → {last:.3e}",
            cone.x, cone.y, cone.part
        )));
    }
    Ok(())
}

/// ds² = V^(2/(2−a))·dσ₀², factor f₀ + (2/(2−a))(f_σ − f₀), checked to extend
/// across every cone point.
pub fn assemble_ricci_sphere(spherical: &ConformalMetric, flat: &ConformalMetric, a: f64) -> Result<ConformalMetric> {
    if !(a < 0.0) {
        return Err(Error::Precondition(format!("need a < 0, got {a}")));
    }
    if spherical.atlas != flat.atlas || spherical.rho().is_none() {
        return Err(Error::Precondition("both metrics must live on the same sphere atlas".into()));
    }
    let same = spherical.cones.len() == flat.cones.len()
        && spherical.cones.iter().all(|c| {
            flat.cones.iter().any(|e| e.part == c.part && (e.x - c.x).hypot(e.y - c.y) <= 1e-9)
        });
    if !same {
        return Err(Error::Precondition("spherical and flat metrics have different cone points".into()));
    }
    let s = 2.0 / (2.0 - a);
    let factor = zip_fields(&flat.factor, &spherical.factor, Units::Dimensionless, move |_, _, _, f0, fs| {
        f0 + (fs - f0).scale(s)
    })?;
    let out = ConformalMetric {
        atlas: spherical.atlas,
        factor,
        cones: Vec::new(),
        name: format!("V^(2/(2−a))·dσ₀², a = {a}"),
    };
    for (i, c) in spherical.cones.iter().enumerate() {
        let nearest = spherical
            .cones
            .iter()
            .enumerate()
            .filter(|(j, e)| *j != i && e.part == c.part)
            .map(|(_, e)| (e.x - c.x).hypot(e.y - c.y))
            .fold(f64::INFINITY, f64::min);
        let r0 = 0.25f64.min(0.5 * nearest);
        extension_check(&out, c, r0)?;
    }
    Ok(out)
}

/// All stages of the construction from one rational map.
#[derive(Clone, Debug)]
pub struct SphereConstruction {
    pub ell: u32,
    pub a: f64,
    pub data: Vec<ConicalDatum>,
    pub spherical: ConformalMetric,
    pub flat: ConformalMetric,
    pub metric: ConformalMetric,
    /// sup |f_direct − f| at samples at least 4h away from every cone, where
    /// f_direct is the factor returned by [`assemble_ricci_sphere`].
    pub simplification_defect: f64,
}

/// Runs the pipeline with ℓ = deg G − 1, a = −2ℓ and flat scale C = 1.
pub fn construct_sphere(map: &RationalMap, n: usize) -> Result<SphereConstruction> {
    map.validate()?;
    let d = map.degree();
    if d < 2 {
        return Err(Error::Precondition(format!("need deg G ≥ 2, got {d}")));
    }
    let ell = (d - 1) as u32;
    let a = -2.0 * ell as f64;
    let data = critical_data(map)?;
    let orders: Vec<u32> = data.iter().map(|c| c.order).collect();
    validate_partition(&orders, ell)?;
    let spherical = pullback_spherical(map, ell, n)?;
    let flat = flat_conical(&data, a, 1.0, n)?;
    let direct = assemble_ricci_sphere(&spherical, &flat, a)?;
    let metric = simplified_metric(map, a, 1.0, n)?;
    let simplification_defect = away_from_cones_defect(&direct, &metric, &spherical.cones)?;
    if !(simplification_defect <= tolerances::RESIDUAL_CLOSED_FORM) {
        return Err(Error::Extension(format!(
            "assembled factor differs from (1/(ℓ+1))·log(|P|² + |Q|²) + const by {simplification_defect:.3e}"
        )));
    }
    Ok(SphereConstruction { ell, a, data, spherical, flat, metric, simplification_defect })
}

/// The assembled factor with the cone logarithms cancelled by hand:
/// f = s·log(|P|² + |Q|²) + (1 − s)(−½log C) + s(−½log(4/(ℓ+1)) − log|lc W|),
/// s = 2/(2 − a), on both charts (s = 1/deg G makes the w-chart form the same).
fn simplified_metric(map: &RationalMap, a: f64, scale: f64, n: usize) -> Result<ConformalMetric> {
    let s = 2.0 / (2.0 - a);
    let kappa = map.degree() as f64;
    let w = map.wronskian();
    let lc = w[poly::degree(&w).unwrap_or(0)].norm();
    let c = (1.0 - s) * (-0.5 * scale.ln()) + s * (-0.5 * (4.0 / kappa).ln() - lc.ln());
    let smooth = |p: Poly, q: Poly| -> PointFn {
        Arc::new(move |x, y, d| {
            let z = CJet::z(x, y, d);
            (poly::eval_jet(&p, z).norm_sqr() + poly::eval_jet(&q, z).norm_sqr()).ln().scale(s).add_const(c)
        })
    };
    let (pr, qr) = map.reversed();
    let fz = smooth(map.numerator_poly(), map.denominator_poly());
    let fw = smooth(pr, qr);
    ConformalMetric::sphere(1.0, n, fz, fw, MAX_DEG, &format!("V^(2/(2−a))·dσ₀², a = {a}"))
}

fn away_from_cones_defect(direct: &ConformalMetric, smooth: &ConformalMetric, cones: &[Cone]) -> Result<f64> {
    let d = zip_fields(&direct.factor, &smooth.factor, Units::Dimensionless, |_, _, _, f, g| f - g)?;
    let mut sup = 0.0_f64;
    for (k, part) in d.parts.iter().enumerate() {
        let r = 4.0 * part.chart.h();
        for ((x, y), v) in part.chart.points().into_iter().zip(part.samples()) {
            if cones.iter().any(|c| c.part == k && (x - c.x).hypot(y - c.y) < r) {
                continue;
            }
            sup = sup.max(if v.is_finite() { v.abs() } else { f64::INFINITY });
        }
    }
    Ok(sup)
}

/// Maximum of K, refined from the best sample of each chart by Newton steps
/// on ∇K (closed-form factors only).
pub fn max_curvature(metric: &ConformalMetric) -> Result<f64> {
    let k = curvature(metric)?;
    let mut best = f64::NEG_INFINITY;
    for (mp, kp) in metric.factor.parts.iter().zip(&k.parts) {
        let pts = mp.chart.points();
        let (i0, _) = kp
            .samples()
            .into_iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let (mut x, mut y) = pts[i0];
        let (x0, y0, h) = (x, y, mp.chart.h());
        let mut val = kp.value_at(x, y);
        for _ in 0..20 {
            let kj = curvature_jet(&mp.jet(x, y, 4)?);
            val = kj.value();
            let (gx, gy) = (kj.coef(1, 0), kj.coef(0, 1));
            let (hxx, hxy, hyy) = (2.0 * kj.coef(2, 0), kj.coef(1, 1), 2.0 * kj.coef(0, 2));
            let det = hxx * hyy - hxy * hxy;
            if !(hxx < 0.0 && det > 0.0) {
                break;
            }
            let (dx, dy) = ((hyy * gx - hxy * gy) / det, (hxx * gy - hxy * gx) / det);
            if (x - dx - x0).hypot(y - dy - y0) > 2.0 * h {
                break;
            }
            x -= dx;
            y -= dy;
            if dx.hypot(dy) < 1e-14 {
                val = curvature_jet(&mp.jet(x, y, 2)?).value();
                break;
            }
        }
        best = best.max(val);
    }
    Ok(best)
}

/// Mean and spread (max − min) of f₁ − f₂ over the sample points of both charts.
pub fn factor_offset(m1: &ConformalMetric, m2: &ConformalMetric) -> Result<(f64, f64)> {
    let d = zip_fields(&m1.factor, &m2.factor, Units::Dimensionless, |_, _, _, f, g| f - g)?;
    let all: Vec<f64> = d.samples().into_iter().flatten().filter(|v| v.is_finite()).collect();
    if all.is_empty() {
        return Err(Error::Precondition("no finite samples".into()));
    }
    let (lo, hi) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    Ok((all.iter().sum::<f64>() / all.len() as f64, hi - lo))
}

#[cfg(test)]
mod tests;
