use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartKind {
    PlaneRect,
    SphereZ,
    SphereW,
    TorusFundamental,
}

impl std::fmt::Display for ChartKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ChartKind::PlaneRect => "plane",
            ChartKind::SphereZ => "sphere_z",
            ChartKind::SphereW => "sphere_w",
            ChartKind::TorusFundamental => "torus",
        };
        f.write_str(s)
    }
}

/// A uniformly sampled coordinate patch.
///
/// Plane and sphere charts sample the rectangle `x_range × y_range` including
/// both endpoints. Torus charts sample the fundamental parallelogram in lattice
/// coordinates (s, t) ∈ [0,1)², z = s γ₁ + t γ₂.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub kind: ChartKind,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub lattice: Option<(Complex64, Complex64)>,
}

pub const MIN_RESOLUTION: usize = 16;

fn check_resolution(nx: usize, ny: usize) -> Result<()> {
    if nx < MIN_RESOLUTION || ny < MIN_RESOLUTION {
        return Err(Error::Precondition(format!(
            "resolution {nx}x{ny} below the minimum {MIN_RESOLUTION}"
        )));
    }
    Ok(())
}

impl Chart {
    pub fn plane(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        check_resolution(nx, ny)?;
        if !(x_range.1 > x_range.0 && y_range.1 > y_range.0) {
            return Err(Error::Precondition("empty plane rectangle".into()));
        }
        Ok(Chart { kind: ChartKind::PlaneRect, x_range, y_range, nx, ny, lattice: None })
    }

    /// The two stereographic charts glued by w = ρ/z. Each covers |·| ≤ 2√ρ so
    /// that the overlap annulus √ρ/2 < |z| < 2√ρ is sampled on both sides.
    pub fn sphere_pair(rho: f64, n: usize) -> Result<(Self, Self)> {
        check_resolution(n, n)?;
        if !(rho > 0.0) {
            return Err(Error::Precondition(format!("transition constant ρ = {rho} must be positive")));
        }
        let r = 2.0 * rho.sqrt();
        let mk = |kind| Chart { kind, x_range: (-r, r), y_range: (-r, r), nx: n, ny: n, lattice: None };
        Ok((mk(ChartKind::SphereZ), mk(ChartKind::SphereW)))
    }

    pub fn torus(g1: Complex64, g2: Complex64, n1: usize, n2: usize) -> Result<Self> {
        check_resolution(n1, n2)?;
        let cross = (g1.conj() * g2).im;
        if cross.abs() <= 1e-12 * g1.norm() * g2.norm() {
            return Err(Error::Precondition("torus periods are dependent over the reals".into()));
        }
        Ok(Chart {
            kind: ChartKind::TorusFundamental,
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            nx: n1,
            ny: n2,
            lattice: Some((g1, g2)),
        })
    }

    pub fn with_resolution(&self, nx: usize, ny: usize) -> Result<Self> {
        check_resolution(nx, ny)?;
        Ok(Chart { nx, ny, ..self.clone() })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Chart coordinates of sample (i, j).
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        match self.lattice {
            Some((g1, g2)) => {
                let z = g1 * (i as f64 / self.nx as f64) + g2 * (j as f64 / self.ny as f64);
                (z.re, z.im)
            }
            None => {
                let x = self.x_range.0 + (self.x_range.1 - self.x_range.0) * i as f64 / (self.nx - 1) as f64;
                let y = self.y_range.0 + (self.y_range.1 - self.y_range.0) * j as f64 / (self.ny - 1) as f64;
                (x, y)
            }
        }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(self.point(i, j));
            }
        }
        out
    }

    /// Grid spacing along each sampling axis.
    pub fn spacing(&self) -> (f64, f64) {
        match self.lattice {
            Some((g1, g2)) => (g1.norm() / self.nx as f64, g2.norm() / self.ny as f64),
            None => (
                (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64,
                (self.y_range.1 - self.y_range.0) / (self.ny - 1) as f64,
            ),
        }
    }

    pub fn h(&self) -> f64 {
        let (a, b) = self.spacing();
        a.max(b)
    }

    /// Torus with γ₁ on the real axis and γ₂ on the imaginary axis.
    pub fn rectangular_periods(&self) -> Option<(f64, f64)> {
        match self.lattice {
            Some((g1, g2)) if g1.im == 0.0 && g2.re == 0.0 && g1.re > 0.0 && g2.im > 0.0 => {
                Some((g1.re, g2.im))
            }
            _ => None,
        }
    }

    /// Area of the fundamental domain (torus charts).
    pub fn cell_area(&self) -> Option<f64> {
        self.lattice.map(|(g1, g2)| (g1.conj() * g2).im.abs())
    }
}
