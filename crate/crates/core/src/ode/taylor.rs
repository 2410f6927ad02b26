//! Taylor coefficients of ODE solutions, used to build exact derivative jets
//! of profile-based factors.

use crate::jet::{Jet, MAX_DEG};

/// Univariate jet in the first variable with coefficients `t`.
pub fn series(t: &[f64]) -> Jet {
    let deg = (t.len() - 1).min(MAX_DEG);
    let mut j = Jet::constant(t[0], deg);
    let s = Jet::var_x(0.0, deg);
    let mut p = Jet::constant(1.0, deg);
    for tk in t.iter().take(deg + 1).skip(1) {
        p = p * s;
        j = j + p.scale(*tk);
    }
    j
}

/// Taylor coefficients y^(k)(s0)/k!, k ≤ MAX_DEG, of the solution of the autonomous
/// equation y'' = rhs(y) through (y0, p0); entries beyond `deg` are left at zero.
pub fn second_order_coefficients<F: Fn(Jet) -> Jet>(y0: f64, p0: f64, deg: usize, rhs: F) -> [f64; MAX_DEG + 1] {
    let mut t = [0.0; MAX_DEG + 1];
    t[0] = y0;
    t[1] = p0;
    for k in 2..=deg.min(MAX_DEG) {
        let y = series(&t[..k]);
        let r = rhs(y.truncate(k - 2));
        t[k] = r.coef(k - 2, 0) / (k * (k - 1)) as f64;
    }
    t
}

/// Even Taylor coefficients at t = 0 of the radial solution of
/// y'' + y'/t = g(t, y) with y(0) = y0 (so y(t) = Σ a_j t^j, odd a_j = 0).
pub fn radial_origin_coefficients<G: Fn(Jet, Jet) -> Jet>(y0: f64, g: G) -> [f64; MAX_DEG + 1] {
    let mut a = [0.0; MAX_DEG + 1];
    a[0] = y0;
    for j in (2..=MAX_DEG).step_by(2) {
        let y = series(&a[..j]);
        let tj = Jet::var_x(0.0, j - 2);
        let r = g(tj, y.truncate(j - 2));
        a[j] = r.coef(j - 2, 0) / (j * j) as f64;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_coefficients() {
        // y'' = y through (1, 1) is e^s
        let t = second_order_coefficients(1.0, 1.0, MAX_DEG, |y| y);
        let mut fact = 1.0;
        for (k, tk) in t.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((tk - 1.0 / fact).abs() < 1e-15);
        }
    }
}
