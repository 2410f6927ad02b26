//! Truncated bivariate Taylor polynomials ("jets") in the chart offsets (dx, dy).
//!
//! A jet stores the Taylor coefficients of a function around a base point up to
//! a total degree `deg <= MAX_DEG`. Arithmetic truncates to the smaller degree of
//! the operands, so derivatives of closed-form factors are exact up to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Largest total degree a jet can carry.
pub const MAX_DEG: usize = 6;
const N_COEF: usize = (MAX_DEG + 1) * (MAX_DEG + 2) / 2;

#[inline]
const fn offset(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Index of the monomial dx^i dy^j.
#[inline]
const fn idx(i: usize, j: usize) -> usize {
    offset(i + j) + j
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; N_COEF],
    deg: usize,
}

impl Jet {
    pub fn constant(v: f64, deg: usize) -> Self {
        let mut c = [0.0; N_COEF];
        c[0] = v;
        Jet { c, deg: deg.min(MAX_DEG) }
    }

    /// The coordinate function x around x0.
    pub fn var_x(x0: f64, deg: usize) -> Self {
        let mut j = Jet::constant(x0, deg);
        if j.deg >= 1 {
            j.c[idx(1, 0)] = 1.0;
        }
        j
    }

    pub fn var_y(y0: f64, deg: usize) -> Self {
        let mut j = Jet::constant(y0, deg);
        if j.deg >= 1 {
            j.c[idx(0, 1)] = 1.0;
        }
        j
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of dx^i dy^j (zero beyond the carried degree).
    pub fn coef(&self, i: usize, j: usize) -> f64 {
        if i + j > self.deg {
            0.0
        } else {
            self.c[idx(i, j)]
        }
    }

    pub fn dx_value(&self) -> f64 {
        self.coef(1, 0)
    }

    pub fn dy_value(&self) -> f64 {
        self.coef(0, 1)
    }

    /// Flat Laplacian at the base point.
    pub fn laplacian_value(&self) -> f64 {
        2.0 * (self.coef(2, 0) + self.coef(0, 2))
    }

    pub fn truncate(mut self, deg: usize) -> Self {
        let deg = deg.min(self.deg);
        for d in deg + 1..=self.deg {
            for k in 0..=d {
                self.c[offset(d) + k] = 0.0;
            }
        }
        self.deg = deg;
        self
    }

    pub fn dx(&self) -> Self {
        let deg = self.deg.saturating_sub(1);
        let mut out = Jet::constant(0.0, deg);
        if self.deg == 0 {
            return out;
        }
        for d in 0..=deg {
            for j in 0..=d {
                let i = d - j;
                out.c[idx(i, j)] = (i + 1) as f64 * self.c[idx(i + 1, j)];
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let deg = self.deg.saturating_sub(1);
        let mut out = Jet::constant(0.0, deg);
        if self.deg == 0 {
            return out;
        }
        for d in 0..=deg {
            for j in 0..=d {
                let i = d - j;
                out.c[idx(i, j)] = (j + 1) as f64 * self.c[idx(i, j + 1)];
            }
        }
        out
    }

    /// Flat Laplacian as a jet of degree `deg - 2`.
    pub fn laplacian(&self) -> Self {
        self.dx().dx() + self.dy().dy()
    }

    /// Squared flat gradient as a jet of degree `deg - 1`.
    pub fn grad_sq(&self) -> Self {
        let gx = self.dx();
        let gy = self.dy();
        gx * gx + gy * gy
    }

    /// Evaluate g(self) given the Taylor coefficients `t[k] = g^(k)(a0)/k!` of a
    /// univariate function g at a0 = self.value().
    pub fn compose(&self, t: &[f64]) -> Self {
        let deg = self.deg;
        let mut p = *self;
        p.c[0] = 0.0;
        let top = deg.min(t.len().saturating_sub(1));
        let mut out = Jet::constant(t[top], deg);
        for k in (0..top).rev() {
            out = out * p;
            out.c[0] += t[k];
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let mut t = [0.0; MAX_DEG + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate().take(self.deg + 1) {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = e / fact;
        }
        self.compose(&t[..=self.deg])
    }

    /// Natural log; the base value must be positive.
    pub fn ln(&self) -> Self {
        let a = self.value();
        let mut t = [0.0; MAX_DEG + 1];
        t[0] = a.ln();
        let mut p = 1.0;
        for k in 1..=self.deg {
            p *= a;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t[k] = sign / (k as f64 * p);
        }
        self.compose(&t[..=self.deg])
    }

    /// log|self|, valid wherever the base value is nonzero.
    pub fn ln_abs(&self) -> Self {
        if self.value() < 0.0 {
            (-*self).ln()
        } else {
            self.ln()
        }
    }

    pub fn abs(&self) -> Self {
        if self.value() < 0.0 {
            -*self
        } else {
            *self
        }
    }

    /// Real power s of a positive base.
    pub fn powf(&self, s: f64) -> Self {
        let a = self.value();
        let mut t = [0.0; MAX_DEG + 1];
        let mut binom = 1.0;
        for k in 0..=self.deg {
            if k > 0 {
                binom *= (s - (k - 1) as f64) / k as f64;
            }
            t[k] = binom * a.powf(s - k as f64);
        }
        self.compose(&t[..=self.deg])
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet::constant(1.0, self.deg);
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let mut t = [0.0; MAX_DEG + 1];
        let mut p = 1.0 / a;
        for (k, tk) in t.iter_mut().enumerate().take(self.deg + 1) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *tk = sign * p;
            p /= a;
        }
        self.compose(&t[..=self.deg])
    }

    pub fn sin(&self) -> Self {
        self.trig(0)
    }

    pub fn cos(&self) -> Self {
        self.trig(1)
    }

    fn trig(&self, phase: usize) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let mut t = [0.0; MAX_DEG + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate().take(self.deg + 1) {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = cycle[(k + phase) % 4] / fact;
        }
        self.compose(&t[..=self.deg])
    }

    pub fn scale(mut self, s: f64) -> Self {
        for v in self.c.iter_mut() {
            *v *= s;
        }
        self
    }

    /// Jet of w ↦ g(λw) at w₀ from the jet of g at λw₀.
    pub fn rescale_args(mut self, lambda: f64) -> Self {
        for d in 1..=self.deg {
            let f = lambda.powi(d as i32);
            for j in 0..=d {
                self.c[idx(d - j, j)] *= f;
            }
        }
        self
    }

    pub fn add_const(mut self, s: f64) -> Self {
        self.c[0] += s;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.c[..offset(self.deg + 1)].iter().all(|v| v.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let deg = self.deg.min(rhs.deg);
        let mut out = Jet::constant(0.0, deg);
        for k in 0..offset(deg + 1) {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let deg = self.deg.min(rhs.deg);
        let mut out = Jet::constant(0.0, deg);
        for d1 in 0..=deg {
            for j1 in 0..=d1 {
                let a = self.c[offset(d1) + j1];
                if a == 0.0 {
                    continue;
                }
                for d2 in 0..=deg - d1 {
                    let o = offset(d1 + d2) + j1;
                    let ob = offset(d2);
                    for j2 in 0..=d2 {
                        out.c[o + j2] += a * rhs.c[ob + j2];
                    }
                }
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_const(rhs)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self.add_const(-rhs)
    }
}

/// Complex-valued jet, used for holomorphic expressions in z = x + iy.
#[derive(Clone, Copy, Debug)]
pub struct CJet {
    pub re: Jet,
    pub im: Jet,
}

impl CJet {
    /// The coordinate z around (x0, y0).
    pub fn z(x0: f64, y0: f64, deg: usize) -> Self {
        CJet { re: Jet::var_x(x0, deg), im: Jet::var_y(y0, deg) }
    }

    pub fn constant(re: f64, im: f64, deg: usize) -> Self {
        CJet { re: Jet::constant(re, deg), im: Jet::constant(im, deg) }
    }

    pub fn deg(&self) -> usize {
        self.re.deg.min(self.im.deg)
    }

    pub fn norm_sqr(&self) -> Jet {
        self.re * self.re + self.im * self.im
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = CJet::constant(1.0, 0.0, self.deg());
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        CJet { re: self.re.scale(s), im: self.im.scale(s) }
    }

    pub fn add_complex(&self, re: f64, im: f64) -> Self {
        CJet { re: self.re.add_const(re), im: self.im.add_const(im) }
    }

    /// Multiply by the complex constant (re + i im).
    pub fn mul_complex(&self, re: f64, im: f64) -> Self {
        CJet {
            re: self.re.scale(re) - self.im.scale(im),
            im: self.re.scale(im) + self.im.scale(re),
        }
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, rhs: CJet) -> CJet {
        CJet { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for CJet {
    type Output = CJet;
    fn sub(self, rhs: CJet) -> CJet {
        CJet { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, rhs: CJet) -> CJet {
        CJet {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_derivatives_are_exact() {
        // f = x^3 y + 2 y^2 at (1, 2)
        let x = Jet::var_x(1.0, 4);
        let y = Jet::var_y(2.0, 4);
        let f = x.powi(3) * y + y * y * 2.0;
        assert_abs_diff_eq!(f.value(), 10.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.dx_value(), 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.dy_value(), 9.0, epsilon = 1e-14);
        // f_xx = 6xy = 12, f_yy = 4
        assert_abs_diff_eq!(f.laplacian_value(), 16.0, epsilon = 1e-13);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = Jet::var_x(0.3, 6);
        let y = Jet::var_y(-0.7, 6);
        let g = (x * y + 2.0).exp().ln();
        let h = x * y + 2.0;
        for d in 0..=6 {
            for j in 0..=d {
                assert_abs_diff_eq!(g.coef(d - j, j), h.coef(d - j, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn trig_and_power_match_finite_differences() {
        let f = |x: f64, y: f64| (x * x + y).sin() * (1.0 + x * x + y * y).powf(0.3);
        let (x0, y0) = (0.4, 0.2);
        let jx = Jet::var_x(x0, 4);
        let jy = Jet::var_y(y0, 4);
        let j = (jx * jx + jy).sin() * (jx * jx + jy * jy + 1.0).powf(0.3);
        let h = 1e-3;
        let lap = (f(x0 + h, y0) + f(x0 - h, y0) + f(x0, y0 + h) + f(x0, y0 - h)
            - 4.0 * f(x0, y0))
            / (h * h);
        assert_abs_diff_eq!(j.laplacian_value(), lap, epsilon = 1e-5);
    }

    #[test]
    fn complex_power_is_holomorphic() {
        let z = CJet::z(0.5, -0.25, 6);
        let w = z.powi(4).add_complex(1.0, 0.5);
        assert_abs_diff_eq!(w.re.laplacian_value(), 0.0, epsilon = 1e-12);
        // ln|w|^2 is harmonic where w != 0
        assert_abs_diff_eq!(w.norm_sqr().ln().laplacian_value(), 0.0, epsilon = 1e-11);
    }
}
