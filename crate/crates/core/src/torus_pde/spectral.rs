//! Diagonal operators on periodic grids via 2D FFT.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{PeriodicGrid, Stencil};

pub(crate) struct Fft2 {
    n1: usize,
    n2: usize,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

fn wavenumber(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

impl Fft2 {
    pub fn new(n1: usize, n2: usize) -> Self {
        let mut p = FftPlanner::new();
        Fft2 {
            n1,
            n2,
            fwd1: p.plan_fft_forward(n1),
            inv1: p.plan_fft_inverse(n1),
            fwd2: p.plan_fft_forward(n2),
            inv2: p.plan_fft_inverse(n2),
        }
    }

    fn transform(&self, data: &mut [Complex64], rows: &Arc<dyn Fft<f64>>, cols: &Arc<dyn Fft<f64>>) {
        let (n1, n2) = (self.n1, self.n2);
        rows.process(data);
        let mut t = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for j in 0..n2 {
            for i in 0..n1 {
                t[i * n2 + j] = data[j * n1 + i];
            }
        }
        cols.process(&mut t);
        for j in 0..n2 {
            for i in 0..n1 {
                data[j * n1 + i] = t[i * n2 + j];
            }
        }
    }

    /// Real part of F⁻¹(symbol · F v).
    pub fn apply(&self, v: &[f64], symbol: &[f64]) -> Vec<f64> {
        let mut d: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut d, &self.fwd1, &self.fwd2);
        for (z, s) in d.iter_mut().zip(symbol) {
            *z *= *s;
        }
        self.transform(&mut d, &self.inv1, &self.inv2);
        let scale = 1.0 / (self.n1 * self.n2) as f64;
        d.iter().map(|z| z.re * scale).collect()
    }
}

/// Fourier symbol of the flat Laplacian on the grid.
pub(crate) fn laplacian_symbol(grid: &PeriodicGrid, stencil: Stencil) -> Vec<f64> {
    let (n1, n2) = (grid.n1, grid.n2);
    let (h1, h2) = (grid.period_u / n1 as f64, grid.period_v / n2 as f64);
    let tau = std::f64::consts::TAU;
    let mut s = Vec::with_capacity(n1 * n2);
    for j in 0..n2 {
        for i in 0..n1 {
            let v = match stencil {
                Stencil::Spectral => {
                    let k1 = tau * wavenumber(i, n1) / grid.period_u;
                    let k2 = tau * wavenumber(j, n2) / grid.period_v;
                    -(k1 * k1 + k2 * k2)
                }
                Stencil::FivePoint => {
                    let c1 = (tau * i as f64 / n1 as f64).cos();
                    let c2 = (tau * j as f64 / n2 as f64).cos();
                    (2.0 * c1 - 2.0) / (h1 * h1) + (2.0 * c2 - 2.0) / (h2 * h2)
                }
            };
            s.push(v);
        }
    }
    s
}
