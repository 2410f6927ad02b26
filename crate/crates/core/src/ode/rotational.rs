//! Rotationally invariant spheres of type (−2ℓ, 0, c): f(z) = y(|z|) with
//! y'' + y'/t = c e^(−2y) + ξ t^(2ℓ) e^(−2(ℓ+1)y), y(0) = y0.
//!
//! The profile is integrated in u = log t through L(u) = y(e^u) − u, which obeys
//! L'' = c e^(−2L) + ξ e^(−2(ℓ+1)L) and L'² + Φ(L) = 1.

use std::sync::Arc;

use serde::Serialize;

use super::rk::{integrate, Trajectory};
use super::taylor::{radial_origin_coefficients, second_order_coefficients};
use crate::error::{Error, Result};
use crate::geom::{ConformalMetric, PointFn};
use crate::jet::{Jet, MAX_DEG};
use crate::tolerances;

/// Closure tolerance for y(e^(2q)/t) + 2 log t − y(t) − 2q.
pub const CLOSURE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct RotationalProfile {
    pub ell: u32,
    pub c: f64,
    pub xi: f64,
    pub y0: f64,
    /// Critical point of L; the profile satisfies L(−u) = L(u + 2q).
    pub q: f64,
    /// Sup of |L'² + Φ(L) − 1| over the accepted nodes.
    pub e_check: f64,
    /// Sup over u < q of the defect of the first-order form
    /// t y' = Φ(L)/(1 + √(1 − Φ(L))).
    pub first_order_defect: f64,
    pub u: Vec<f64>,
    pub l: Vec<f64>,
    pub dl: Vec<f64>,
    #[serde(skip)]
    traj: Trajectory<2>,
    #[serde(skip)]
    origin: [f64; MAX_DEG + 1],
    #[serde(skip)]
    r_small: f64,
}

fn check_signs(ell: u32, c: f64, xi: f64) -> Result<()> {
    if ell < 1 || c == 0.0 || xi == 0.0 || !c.is_finite() || !xi.is_finite() {
        return Err(Error::Precondition(format!("need ℓ ≥ 1, c ≠ 0, ξ ≠ 0; got ℓ={ell} c={c} ξ={xi}")));
    }
    let l = ell as f64;
    if c > 0.0 && xi < 0.0 && xi + (l / (l + 1.0)).powf(l) * c.powf(l + 1.0) <= 0.0 {
        return Err(Error::Precondition(format!(
            "c > 0, ξ < 0 requires ξ + (ℓ/(ℓ+1))^ℓ c^(ℓ+1) > 0; got {}",
            xi + (l / (l + 1.0)).powf(l) * c.powf(l + 1.0)
        )));
    }
    if c < 0.0 && xi < 0.0 {
        return Err(Error::Precondition("c < 0 requires ξ > 0".into()));
    }
    Ok(())
}

impl RotationalProfile {
    /// Φ(r) = c e^(−2r) + (ξ/(ℓ+1)) e^(−2(ℓ+1)r).
    pub fn phi(&self, r: f64) -> f64 {
        let l1 = self.ell as f64 + 1.0;
        self.c * (-2.0 * r).exp() + self.xi / l1 * (-2.0 * l1 * r).exp()
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
        let (c, xi, l1) = (self.c, self.xi, self.ell as f64 + 1.0);
        move |_u, s| [s[1], c * (-2.0 * s[0]).exp() + xi * (-2.0 * l1 * s[0]).exp()]
    }

    fn start_u(&self) -> f64 {
        self.u[0]
    }

    /// (L, L') at u. Below the integrated span the small-t expansion
    /// y = y0 + (c e^(−2y0)/4) t² is used.
    pub fn l_state(&self, u: f64) -> [f64; 2] {
        if u < self.start_u() {
            let a = self.c * (-2.0 * self.y0).exp() / 4.0;
            let e = (2.0 * u).exp();
            return [self.y0 + a * e - u, 2.0 * a * e - 1.0];
        }
        if u > *self.u.last().unwrap() {
            return [f64::NAN, f64::NAN];
        }
        self.traj.eval(&self.rhs(), u)
    }

    pub fn big_l(&self, u: f64) -> f64 {
        self.l_state(u)[0]
    }

    pub fn y(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return self.y0;
        }
        self.big_l(t.ln()) + t.ln()
    }

    pub fn dy(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let s = self.l_state(t.abs().ln());
        (s[1] + 1.0) / t
    }

    /// y(e^(2q)/t) + 2 log t − y(t) − 2q.
    pub fn closure_defect(&self, t: f64) -> f64 {
        self.y((2.0 * self.q).exp() / t) + 2.0 * t.ln() - self.y(t) - 2.0 * self.q
    }

    /// Sup of the closure defect over t ∈ [e^q/8, 8e^q].
    pub fn closure_sup(&self) -> f64 {
        let m = 200;
        (0..=m)
            .map(|k| {
                let t = (self.q + (k as f64 / m as f64 * 2.0 - 1.0) * 8f64.ln()).exp();
                self.closure_defect(t).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Jet of f(x, y) = y(√(x²+y²)) of degree `deg` at (x, y).
    pub fn factor_jet(&self, x: f64, y: f64, deg: usize) -> Jet {
        let xs = Jet::var_x(x, deg);
        let ys = Jet::var_y(y, deg);
        let s = xs * xs + ys * ys;
        if s.value().sqrt() < self.r_small {
            // even series in t, so a polynomial in s = t²
            let mut out = Jet::constant(self.origin[MAX_DEG], deg);
            for k in (0..MAX_DEG / 2).rev() {
                out = out * s + self.origin[2 * k];
            }
            return out;
        }
        let u = s.ln().scale(0.5);
        let st = self.l_state(u.value());
        let (c, xi, l1) = (self.c, self.xi, self.ell as f64 + 1.0);
        let t = second_order_coefficients(st[0], st[1], deg, |l| {
            (l * -2.0).exp() * c + (l * (-2.0 * l1)).exp() * xi
        });
        u.compose(&t[..=deg]) + u
    }
}

/// Integrates the profile with y(0) = y0 and locates the symmetry shift q.
pub fn solve_rotational(ell: u32, c: f64, xi: f64, y0: f64) -> Result<RotationalProfile> {
    check_signs(ell, c, xi)?;
    if !y0.is_finite() {
        return Err(Error::Precondition(format!("y0 must be finite, got {y0}")));
    }
    let scale = c.abs().max(xi.abs()).max(1.0);
    let mut u_start = (y0 - 12.0 - 0.5 * scale.ln()).min(-6.0);
    for _ in 0..4 {
        let p = integrate_from(ell, c, xi, y0, u_start)?;
        if u_start <= (2.0 * p.q - 6.0).min(-6.0) {
            return Ok(p);
        }
        u_start = 2.0 * p.q - 12.0;
    }
    Err(Error::StepSize(format!("could not cover the symmetric span for ℓ={ell}, c={c}, ξ={xi}")))
}

fn integrate_from(ell: u32, c: f64, xi: f64, y0: f64, u_start: f64) -> Result<RotationalProfile> {
    let l1 = ell as f64 + 1.0;
    let rhs = move |_u: f64, s: &[f64; 2]| [s[1], c * (-2.0 * s[0]).exp() + xi * (-2.0 * l1 * s[0]).exp()];
    let a = c * (-2.0 * y0).exp() / 4.0;
    let e = (2.0 * u_start).exp();
    let init = [y0 + a * e - u_start, 2.0 * a * e - 1.0];
    let mut traj = integrate(&rhs, u_start, init, u_start + 8.0, tolerances::ODE_TOL, 1e-2)?;
    let cap = u_start + 400.0;
    let mut q = None;
    loop {
        if q.is_none() {
            q = find_turn(&traj, &rhs);
        }
        let (u_last, _) = traj.last();
        if let Some(q) = q {
            let need = (2.0 * q).max(0.0) + 6.0;
            let need = need.max(q + 2.0).max(10f64.ln() + 1.0);
            if u_last >= need {
                break;
            }
            traj.extend(&rhs, need, tolerances::ODE_TOL)?;
        } else {
            if u_last >= cap {
                return Err(Error::RootFinding {
                    msg: format!("L' has no sign change for ℓ={ell}, c={c}, ξ={xi}"),
                    condition: f64::INFINITY,
                });
            }
            traj.extend(&rhs, u_last + 8.0, tolerances::ODE_TOL)?;
        }
    }
    let q = q.unwrap();

    let phi = |r: f64| c * (-2.0 * r).exp() + xi / l1 * (-2.0 * l1 * r).exp();
    let mut e_check = 0.0_f64;
    let mut first_order = 0.0_f64;
    for (&u, s) in traj.t.iter().zip(&traj.y) {
        let b = phi(s[0]);
        e_check = e_check.max((s[1] * s[1] + b - 1.0).abs());
        if u < q {
            if 1.0 - b < -tolerances::PRIME_INTEGRAL {
                return Err(Error::StepSize(format!("square-root argument 1 − Φ(L) = {} at u = {u}", 1.0 - b)));
            }
            let first = b / (1.0 + (1.0 - b).max(0.0).sqrt());
            first_order = first_order.max((s[1] + 1.0 - first).abs());
        }
    }

    let origin = radial_origin_coefficients(y0, |t, y| {
        (y * -2.0).exp() * c + t.powi(2 * ell) * (y * (-2.0 * l1)).exp() * xi
    });
    Ok(RotationalProfile {
        ell,
        c,
        xi,
        y0,
        q,
        e_check,
        first_order_defect: first_order,
        u: traj.t.clone(),
        l: traj.y.iter().map(|s| s[0]).collect(),
        dl: traj.y.iter().map(|s| s[1]).collect(),
        traj,
        origin,
        r_small: 1e-3 * y0.exp() / c.abs().max(xi.abs()).max(1.0).sqrt(),
    })
}

/// First zero of L' (from negative to non-negative), by bisection on the dense output.
fn find_turn<F: Fn(f64, &[f64; 2]) -> [f64; 2]>(traj: &Trajectory<2>, rhs: &F) -> Option<f64> {
    let k = traj.y.iter().position(|s| s[1] >= 0.0)?;
    if k == 0 {
        return Some(traj.t[0]);
    }
    let (mut lo, mut hi) = (traj.t[k - 1], traj.t[k]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if traj.eval(rhs, mid)[1] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Two-chart sphere with ρ = e^(2q) and factor y(|·|) on both charts.
pub fn rotational_metric(profile: &RotationalProfile, n: usize) -> Result<ConformalMetric> {
    check_signs(profile.ell, profile.c, profile.xi)?;
    let defect = profile.closure_sup();
    if !(defect <= CLOSURE_TOL) {
        return Err(Error::Closure { defect, tol: CLOSURE_TOL });
    }
    let rho = (2.0 * profile.q).exp();
    let p = Arc::new(profile.clone());
    let f: PointFn = Arc::new(move |x, y, d| p.factor_jet(x, y, d));
    let name = format!("rotational sphere ℓ={} c={} ξ={}", profile.ell, profile.c, profile.xi);
    ConformalMetric::sphere(rho, n, f.clone(), f, MAX_DEG, &name)
}
