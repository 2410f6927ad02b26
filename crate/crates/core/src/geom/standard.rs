//! Reference metrics: round spheres and flat planes/tori.

use std::sync::Arc;

use num_complex::Complex64;

use super::{Chart, ConformalMetric, PointFn};
use crate::error::Result;
use crate::jet::{Jet, MAX_DEG};

/// Round sphere of curvature κ > 0: ds² = 4|dz|² / (κ (1+|z|²)²), ρ = 1.
pub fn round_sphere(kappa: f64, n: usize) -> Result<ConformalMetric> {
    let shift = 0.5 * kappa.ln() - 2f64.ln();
    let f: PointFn = Arc::new(move |x, y, d| {
        let (jx, jy) = (Jet::var_x(x, d), Jet::var_y(y, d));
        (jx * jx + jy * jy + 1.0).ln() + shift
    });
    ConformalMetric::sphere(1.0, n, f.clone(), f, MAX_DEG, &format!("round sphere K={kappa}"))
}

/// |dz|² on a plane rectangle.
pub fn flat_plane(chart: Chart) -> Result<ConformalMetric> {
    let f: PointFn = Arc::new(|_, _, d| Jet::constant(0.0, d));
    ConformalMetric::plane(chart, f, MAX_DEG, "flat plane")
}

/// Flat torus ℂ/(γ₁ℤ ⊕ γ₂ℤ).
pub fn flat_torus(g1: Complex64, g2: Complex64, n: usize) -> Result<ConformalMetric> {
    let chart = Chart::torus(g1, g2, n, n)?;
    let f: PointFn = Arc::new(|_, _, d| Jet::constant(0.0, d));
    ConformalMetric::torus(chart, f, MAX_DEG, "flat torus")
}
