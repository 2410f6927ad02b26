//! Translation-invariant tori of type (a, 0, c): f(u+iv) = y(v) with
//! y'' = −c e^((a−2)y) + c e^(−2y) and prime integral ½y'² + Φ(y) = E.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::rk::{integrate, Trajectory};
use super::taylor::second_order_coefficients;
use crate::error::{Error, Result};
use crate::geom::quadrature::gauss_legendre;
use crate::geom::{Chart, ConformalMetric, PointFn};
use crate::jet::{Jet, MAX_DEG};
use crate::tolerances;

const PERIOD_NODES: usize = 128;

#[derive(Clone, Debug, Serialize)]
pub struct DelaunayProfile {
    pub a: f64,
    pub c: f64,
    pub energy: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    /// Period from the turning-point quadrature.
    pub period: f64,
    /// Period measured on the integrated orbit.
    pub period_ode: f64,
    /// Sup of |½y'² + Φ(y) − E| / max(1, |E|) along the orbit.
    pub energy_defect: f64,
    /// max(|y(T) − y(0)|, |y'(T) − y'(0)|).
    pub closure_defect: f64,
    pub v: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    #[serde(skip)]
    traj: Trajectory<2>,
}

/// Φ(r) = c/(a−2)·e^((a−2)r) + (c/2)e^(−2r) (c·r + (c/2)e^(−2r) when a = 2).
pub fn potential(a: f64, c: f64, r: f64) -> f64 {
    if a == 2.0 {
        c * r + 0.5 * c * (-2.0 * r).exp()
    } else {
        c / (a - 2.0) * ((a - 2.0) * r).exp() + 0.5 * c * (-2.0 * r).exp()
    }
}

/// lim_{r→+∞} Φ(r).
fn upper_limit(a: f64) -> f64 {
    if a >= 2.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

impl DelaunayProfile {
    pub fn phi(&self, r: f64) -> f64 {
        potential(self.a, self.c, r)
    }

    pub fn dphi(&self, r: f64) -> f64 {
        self.c * ((self.a - 2.0) * r).exp() - self.c * (-2.0 * r).exp()
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
        let (a, c) = (self.a, self.c);
        move |_v, s| [s[1], -c * ((a - 2.0) * s[0]).exp() + c * (-2.0 * s[0]).exp()]
    }

    /// (y, y') at v, reduced modulo the period.
    pub fn state(&self, v: f64) -> [f64; 2] {
        let v = v.rem_euclid(self.period);
        self.traj.eval(&self.rhs(), v)
    }

    pub fn y_at(&self, v: f64) -> f64 {
        self.state(v)[0]
    }

    /// Period lattice (α, β + iT).
    pub fn lattice(&self, alpha: f64, beta: f64) -> (Complex64, Complex64) {
        (Complex64::new(alpha, 0.0), Complex64::new(beta, self.period))
    }

    /// Jet in (x, y) of f = y(Im z) at (x, v).
    pub fn factor_jet(&self, _x: f64, v: f64, deg: usize) -> Jet {
        let s = self.state(v);
        let (a, c) = (self.a, self.c);
        let t = second_order_coefficients(s[0], s[1], deg, |y| {
            (y * (a - 2.0)).exp() * (-c) + (y * -2.0).exp() * c
        });
        Jet::var_y(v, deg).compose(&t[..=deg])
    }
}

/// Bisection for Φ(r) = E on the monotone branch between 0 and ±∞.
fn turning_point(a: f64, c: f64, energy: f64, dir: f64) -> Result<f64> {
    let mut hi = dir;
    let mut n = 0;
    while potential(a, c, hi) < energy {
        hi *= 2.0;
        n += 1;
        if n > 60 {
            return Err(Error::RootFinding {
                msg: format!("no turning point bracket for a={a}, c={c}, E={energy}, direction {dir}"),
                condition: f64::INFINITY,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if potential(a, c, mid) < energy {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= 1e-16 * hi.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// T = 2∫ dr/√(2(E−Φ)), with r = r± ∓ s² on each half.
fn period_quadrature(a: f64, c: f64, energy: f64, r_minus: f64, r_plus: f64) -> f64 {
    let (x, w) = gauss_legendre(PERIOD_NODES);
    let half = |end: f64, sign: f64| -> f64 {
        let smax = end.abs().sqrt();
        x.iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let s = 0.5 * smax * (xi + 1.0);
                let r = end - sign * s * s;
                let gap = (energy - potential(a, c, r)).max(0.0);
                0.5 * smax * wi * 2.0 * s / (2.0 * gap).sqrt()
            })
            .sum()
    };
    2.0 * (half(r_plus, 1.0) + half(r_minus, -1.0))
}

pub fn solve_delaunay(a: f64, c: f64, energy: f64) -> Result<DelaunayProfile> {
    if !(a * c > 0.0) || !energy.is_finite() {
        return Err(Error::Precondition(format!("need a·c > 0 and finite E; got a={a}, c={c}, E={energy}")));
    }
    let phi0 = potential(a, c, 0.0);
    let top = upper_limit(a);
    if !(energy > phi0 && energy < top) {
        return Err(Error::Precondition(format!(
            "E = {energy} must lie in (min Φ = Φ(0) = {phi0}, {top})"
        )));
    }
    let r_plus = turning_point(a, c, energy, 1.0)?;
    let r_minus = turning_point(a, c, energy, -1.0)?;
    let period = period_quadrature(a, c, energy, r_minus, r_plus);

    let rhs = move |_v: f64, s: &[f64; 2]| [s[1], -c * ((a - 2.0) * s[0]).exp() + c * (-2.0 * s[0]).exp()];
    let tol = tolerances::ODE_TOL * 1e-2;
    let traj = integrate(&rhs, 0.0, [r_minus, 0.0], 1.25 * period, tol, period * 1e-3)?;

    // second upward crossing of y' = 0 is the measured period
    let k = (1..traj.y.len())
        .find(|&k| traj.t[k] > 0.75 * period && traj.y[k - 1][1] < 0.0 && traj.y[k][1] >= 0.0)
        .ok_or_else(|| Error::Closure { defect: f64::NAN, tol: tolerances::PRIME_INTEGRAL })?;
    let (mut lo, mut hi) = (traj.t[k - 1], traj.t[k]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if traj.eval(&rhs, mid)[1] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * period {
            break;
        }
    }
    let period_ode = 0.5 * (lo + hi);

    let end = traj.eval(&rhs, period);
    let closure_defect = (end[0] - r_minus).abs().max(end[1].abs());
    let energy_defect = traj
        .y
        .iter()
        .map(|s| (0.5 * s[1] * s[1] + potential(a, c, s[0]) - energy).abs())
        .fold(0.0, f64::max)
        / energy.abs().max(1.0);

    Ok(DelaunayProfile {
        a,
        c,
        energy,
        r_minus,
        r_plus,
        period,
        period_ode,
        energy_defect,
        closure_defect,
        v: traj.t.clone(),
        y: traj.y.iter().map(|s| s[0]).collect(),
        dy: traj.y.iter().map(|s| s[1]).collect(),
        traj,
    })
}

/// Torus ℂ/(αℤ ⊕ (β+iT)ℤ) with factor f(u+iv) = y(v).
pub fn delaunay_torus_metric(profile: &DelaunayProfile, alpha: f64, beta: f64, n: usize) -> Result<ConformalMetric> {
    if alpha == 0.0 || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Precondition(format!("need α ≠ 0 and finite β; got α={alpha}, β={beta}")));
    }
    let (g1, g2) = profile.lattice(alpha, beta);
    let chart = Chart::torus(g1, g2, n, n)?;
    let p = Arc::new(profile.clone());
    let f: PointFn = Arc::new(move |x, y, d| p.factor_jet(x, y, d));
    let name = format!("Delaunay torus a={} c={} E={}", profile.a, profile.c, profile.energy);
    ConformalMetric::torus(chart, f, MAX_DEG, &name)
}
