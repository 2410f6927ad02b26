//! Adaptive Dormand–Prince 5(4) integration with step-by-step dense evaluation.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the 5th-order update and the error estimate.
pub fn dp_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (r, a) in A[s].iter().enumerate().take(s) {
            for i in 0..N {
                ys[i] += h * a * k[r][i];
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for i in 0..N {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        err[i] = h * (d5 - d4);
    }
    (y5, err)
}

/// Accepted nodes of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    /// State at any t inside the integrated span: one sub-step from the
    /// preceding accepted node (never longer than the accepted step).
    pub fn eval<F>(&self, f: &F, t: f64) -> [f64; N]
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let forward = self.t.len() < 2 || self.t[1] >= self.t[0];
        let k = if forward {
            self.t.partition_point(|&s| s <= t).saturating_sub(1)
        } else {
            self.t.partition_point(|&s| s >= t).saturating_sub(1)
        };
        let h = t - self.t[k];
        if h == 0.0 {
            return self.y[k];
        }
        dp_step(f, self.t[k], &self.y[k], h).0
    }

    /// Extend the trajectory to t1 with the same tolerance.
    pub fn extend<F>(&mut self, f: &F, t1: f64, tol: f64) -> Result<()>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let (t0, y0) = self.last();
        let n = self.t.len();
        let h0 = if n >= 2 { self.t[n - 1] - self.t[n - 2] } else { (t1 - t0) * 1e-3 };
        let more = integrate(f, t0, y0, t1, tol, h0)?;
        self.t.extend_from_slice(&more.t[1..]);
        self.y.extend_from_slice(&more.y[1..]);
        Ok(())
    }
}

/// Integrate y' = f(t, y) from t0 to t1 with mixed tolerance
/// |err_i| ≤ tol·(1 + |y_i|).
pub fn integrate<const N: usize, F>(f: &F, t0: f64, y0: [f64; N], t1: f64, tol: f64, h0: f64) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut h = h0.abs().max(1e-12) * dir;
    let mut t = t0;
    let mut y = y0;
    let mut out = Trajectory { t: vec![t0], y: vec![y0] };
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let (yn, e) = dp_step(f, t, &y, h);
        let mut err = 0.0_f64;
        for i in 0..N {
            let sc = tol * (1.0 + y[i].abs().max(yn[i].abs()));
            err = err.max(e[i].abs() / sc);
        }
        if !err.is_finite() || yn.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
        } else if err <= 1.0 {
            t += h;
            y = yn;
            out.t.push(t);
            out.y.push(y);
            h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        steps += 1;
        if h.abs() < 1e-14 * (1.0 + t.abs()) || steps > 2_000_000 {
            return Err(Error::StepSize(format!("step collapsed near t = {t}")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let tr = integrate(&f, 0.0, [1.0, 0.0], std::f64::consts::TAU, 1e-10, 1e-2).unwrap();
        let (_, y) = tr.last();
        assert!((y[0] - 1.0).abs() < 1e-8 && y[1].abs() < 1e-8);
        let mid = tr.eval(&f, 1.234);
        assert!((mid[0] - 1.234f64.cos()).abs() < 1e-9);
    }
}
