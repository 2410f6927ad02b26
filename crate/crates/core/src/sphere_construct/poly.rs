//! Dense complex polynomials in ascending powers and Aberth root finding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::CJet;

pub type Poly = Vec<Complex64>;

const ABERTH_ITER: usize = 2000;
/// Roots closer than this (relative to max(1, |z|)) are one multiple root.
const CLUSTER: f64 = 1e-2;

pub fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().map_or(false, |c| c.norm() == 0.0) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Complex64::new(0.0, 0.0));
    }
    p
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[Complex64]) -> Option<usize> {
    p.iter().rposition(|c| c.norm() != 0.0)
}

pub fn eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Σ|a_k||z|^k, the scale of rounding errors in eval.
pub fn eval_scale(p: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

pub fn derivative(p: &[Complex64]) -> Poly {
    if p.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

pub fn mul(p: &[Complex64], q: &[Complex64]) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn sub(p: &[Complex64], q: &[Complex64]) -> Poly {
    let n = p.len().max(q.len());
    let z = Complex64::new(0.0, 0.0);
    (0..n).map(|k| p.get(k).copied().unwrap_or(z) - q.get(k).copied().unwrap_or(z)).collect()
}

pub fn add(p: &[Complex64], q: &[Complex64]) -> Poly {
    let n = p.len().max(q.len());
    let z = Complex64::new(0.0, 0.0);
    (0..n).map(|k| p.get(k).copied().unwrap_or(z) + q.get(k).copied().unwrap_or(z)).collect()
}

/// Coefficients of w^d p(1/w).
pub fn reversed(p: &[Complex64], d: usize) -> Poly {
    (0..=d).map(|k| p.get(d - k).copied().unwrap_or(Complex64::new(0.0, 0.0))).collect()
}

pub fn eval_jet(p: &[Complex64], z: CJet) -> CJet {
    let d = z.deg();
    p.iter().rev().fold(CJet::constant(0.0, 0.0, d), |acc, c| (acc * z).add_complex(c.re, c.im))
}

/// Roots with multiplicities; exact zeros at the origin are split off first,
/// the rest come from Aberth iteration with clustering of multiple roots.
pub fn roots(p: &[Complex64]) -> Result<Vec<(Complex64, u32)>> {
    let p = trim(p.to_vec());
    let n = match degree(&p) {
        None => return Err(Error::Precondition("roots of the zero polynomial".into())),
        Some(n) => n,
    };
    let zeros = p.iter().position(|c| c.norm() != 0.0).unwrap_or(0);
    let mut out = Vec::new();
    if zeros > 0 {
        out.push((Complex64::new(0.0, 0.0), zeros as u32));
    }
    let q: Poly = p[zeros..=n].to_vec();
    let m = n - zeros;
    if m == 0 {
        return Ok(out);
    }
    let lead = q[m];
    let q: Poly = q.iter().map(|c| c / lead).collect();
    let dq = derivative(&q);
    let radius = (0..m).map(|k| q[k].norm().powf(1.0 / (m - k) as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(0.7 * radius, std::f64::consts::TAU * k as f64 / m as f64 + 0.4))
        .collect();
    for _ in 0..ABERTH_ITER {
        let mut moved = 0.0_f64;
        for i in 0..m {
            let pv = eval(&q, z[i]);
            if pv.norm() <= 1e-15 * eval_scale(&q, z[i]) {
                continue;
            }
            let ratio = pv / eval(&dq, z[i]);
            let s: Complex64 = (0..m).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for &r in &z {
        let back = eval(&q, r).norm() / eval_scale(&q, r);
        if !(back < 1e-8) {
            let c = eval_scale(&q, r) / eval(&dq, r).norm();
            return Err(Error::RootFinding {
                msg: format!("Aberth iteration left backward error {back:.2e} at {r}"),
                condition: c,
            });
        }
    }
    // cluster approximations of multiple roots
    let mut used = vec![false; m];
    for i in 0..m {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![z[i]];
        for j in i + 1..m {
            if !used[j] && (z[j] - z[i]).norm() < CLUSTER * z[i].norm().max(1.0) {
                used[j] = true;
                members.push(z[j]);
            }
        }
        let mut c = members.iter().sum::<Complex64>() / members.len() as f64;
        if members.len() > 1 {
            c = refine_multiple(&q, c, members.len());
        }
        out.push((c, members.len() as u32));
    }
    Ok(out)
}

/// Newton on p^(m−1), for which a root of multiplicity m is simple.
fn refine_multiple(p: &[Complex64], z0: Complex64, m: usize) -> Complex64 {
    let mut d = p.to_vec();
    for _ in 1..m {
        d = derivative(&d);
    }
    let dd = derivative(&d);
    let mut z = z0;
    let mut last = f64::INFINITY;
    for _ in 0..20 {
        let step = eval(&d, z) / eval(&dd, z);
        if !step.is_finite() || step.norm() >= last {
            break;
        }
        last = step.norm();
        z -= step;
    }
    if (z - z0).norm() < CLUSTER * z0.norm().max(1.0) {
        z
    } else {
        z0
    }
}
