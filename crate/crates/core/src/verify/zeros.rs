//! Zeros of K − c and their orders from circle-mean log-slope fits.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Atlas, Chart, ChartField, ChartKind, ConformalMetric, ScalarField};
use crate::tolerances;

/// Grid minima below this fraction of sup|F| are refined before the zero test.
const CANDIDATE_FRACTION: f64 = 0.05;
const FIT_RADII: usize = 8;
const FIT_ANGLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroRecord {
    /// Index of the chart the zero was located on.
    pub part: usize,
    pub chart: ChartKind,
    pub x: f64,
    pub y: f64,
    /// Global coordinate; `None` for the point at infinity.
    pub z: Option<(f64, f64)>,
    pub order: u32,
    pub slope: f64,
    /// RMS deviation of the log-slope fit.
    pub fit_quality: f64,
}

impl ZeroRecord {
    pub fn is_infinity(&self) -> bool {
        self.z.is_none()
    }
}

/// A refined grid minimum of |F| before order estimation.
#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub part: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub z: Option<Complex64>,
}

/// Shortest displacement between two chart points (periodic on tori).
pub(crate) fn chart_delta(chart: &Chart, x: f64, y: f64, px: f64, py: f64) -> (f64, f64) {
    let (dx, dy) = (x - px, y - py);
    match chart.lattice {
        Some((g1, g2)) => {
            let det = g1.re * g2.im - g1.im * g2.re;
            let s = (dx * g2.im - dy * g2.re) / det;
            let t = (g1.re * dy - g1.im * dx) / det;
            let (s, t) = (s - s.round(), t - t.round());
            let d = g1 * s + g2 * t;
            (d.re, d.im)
        }
        None => (dx, dy),
    }
}

/// Global coordinate of a chart point; w-chart points within `snap` of the pole are ∞.
fn global_z(atlas: Atlas, part: usize, x: f64, y: f64, snap: f64) -> Option<Complex64> {
    match (atlas, part) {
        (Atlas::Sphere { rho }, 1) => {
            let w = Complex64::new(x, y);
            if w.norm() <= snap {
                None
            } else {
                Some(rho / w)
            }
        }
        _ => Some(Complex64::new(x, y)),
    }
}

/// Whether the chart point lies in the half of the sphere this chart is responsible for.
fn responsible(atlas: Atlas, part: usize, x: f64, y: f64) -> bool {
    match atlas {
        Atlas::Sphere { rho } => {
            let r = x.hypot(y);
            if part == 0 {
                r <= rho.sqrt() * (1.0 + 1e-6)
            } else {
                r < rho.sqrt() * (1.0 - 1e-6)
            }
        }
        _ => true,
    }
}

/// Chart coordinates of a global point on every chart where it is sampled.
pub(crate) fn chart_images(atlas: Atlas, z: Option<Complex64>) -> Vec<(usize, f64, f64)> {
    match (atlas, z) {
        (Atlas::Sphere { .. }, None) => vec![(1, 0.0, 0.0)],
        (Atlas::Sphere { rho }, Some(z)) => {
            let mut v = vec![(0, z.re, z.im)];
            if z.norm() > 0.0 {
                let w = rho / z;
                v.push((1, w.re, w.im));
            }
            v
        }
        (_, Some(z)) => vec![(0, z.re, z.im)],
        (_, None) => vec![],
    }
}

fn is_local_min(chart: &Chart, v: &[f64], i: usize, j: usize) -> bool {
    let (nx, ny) = (chart.nx as isize, chart.ny as isize);
    let periodic = chart.lattice.is_some();
    let c = v[chart.index(i, j)];
    for dj in -1..=1isize {
        for di in -1..=1isize {
            if di == 0 && dj == 0 {
                continue;
            }
            let (mut ii, mut jj) = (i as isize + di, j as isize + dj);
            if periodic {
                ii = ii.rem_euclid(nx);
                jj = jj.rem_euclid(ny);
            } else if ii < 0 || jj < 0 || ii >= nx || jj >= ny {
                return false;
            }
            let n = v[(jj * nx + ii) as usize];
            if n.is_nan() {
                continue;
            }
            if n < c {
                return false;
            }
        }
    }
    true
}

/// Nested pattern search for the minimum of |F| near (x, y).
fn refine(part: &ChartField, x: f64, y: f64, h: f64) -> (f64, f64, f64) {
    let (mut bx, mut by) = (x, y);
    let mut best = part.value_at(x, y).abs();
    let mut s = 0.5 * h;
    for _ in 0..24 {
        let (cx, cy) = (bx, by);
        for j in -2..=2 {
            for i in -2..=2 {
                let (px, py) = (cx + i as f64 * s, cy + j as f64 * s);
                let v = part.value_at(px, py).abs();
                if v < best {
                    best = v;
                    bx = px;
                    by = py;
                }
            }
        }
        s *= 0.5;
    }
    (bx, by, best)
}

/// Refined minima of |F| below the zero threshold, clustered and deduplicated across charts.
pub(crate) fn zero_candidates(field: &ScalarField, atlas: Atlas) -> Vec<Candidate> {
    let samples = field.samples();
    let sup = samples.iter().flatten().filter(|v| !v.is_nan()).fold(0.0_f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return Vec::new();
    }
    let mut out: Vec<Candidate> = Vec::new();
    for (k, (part, vals)) in field.parts.iter().zip(&samples).enumerate() {
        let chart = &part.chart;
        let h = chart.h();
        let abs: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
        let mut local: Vec<Candidate> = Vec::new();
        for j in 0..chart.ny {
            for i in 0..chart.nx {
                let v = abs[chart.index(i, j)];
                if !(v < CANDIDATE_FRACTION * sup) || !is_local_min(chart, &abs, i, j) {
                    continue;
                }
                let (x0, y0) = chart.point(i, j);
                let (x, y, value) = if part.is_analytic() { refine(part, x0, y0, h) } else { (x0, y0, v) };
                if !(value < tolerances::ZERO_THRESHOLD * sup) || !responsible(atlas, k, x, y) {
                    continue;
                }
                local.push(Candidate { part: k, x, y, value, z: global_z(atlas, k, x, y, 1e-6 * h) });
            }
        }
        local.sort_by(|a, b| a.value.total_cmp(&b.value));
        for c in local {
            let dup = out.iter().any(|o| {
                o.part == c.part && {
                    let (dx, dy) = chart_delta(chart, c.x, c.y, o.x, o.y);
                    dx.hypot(dy) < 4.0 * h
                }
            });
            if !dup {
                out.push(c);
            }
        }
    }
    // the same zero seen from both sphere charts
    let mut merged: Vec<Candidate> = Vec::new();
    for c in out {
        let dup = merged.iter().any(|o| match (o.z, c.z) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).norm() < 4.0 * field.parts[0].chart.h() * (1.0 + a.norm()),
            _ => false,
        });
        if !dup {
            merged.push(c);
        }
    }
    merged
}

/// Least-squares slope of the circle means of log√|F| against log r over r ∈ [4h, 16h].
fn fit_order(part: &ChartField, x: f64, y: f64) -> (f64, f64) {
    let h = part.chart.h();
    let mut pts = Vec::with_capacity(FIT_RADII);
    for k in 0..FIT_RADII {
        let r = 4.0 * h * 4f64.powf(k as f64 / (FIT_RADII - 1) as f64);
        let mut s = 0.0;
        let mut n = 0;
        for q in 0..FIT_ANGLES {
            let th = std::f64::consts::TAU * (q as f64 + 0.5) / FIT_ANGLES as f64;
            let v = part.value_at(x + r * th.cos(), y + r * th.sin()).abs();
            if v > 0.0 && v.is_finite() {
                s += 0.5 * v.ln();
                n += 1;
            }
        }
        if n > 0 {
            pts.push((r.ln(), s / n as f64));
        }
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for p in &pts {
        sxx += (p.0 - mx) * (p.0 - mx);
        sxy += (p.0 - mx) * (p.1 - my);
    }
    let slope = sxy / sxx;
    let rms = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / m).sqrt();
    (slope, rms)
}

/// Zeros of the field F with orders of √|F|.
pub fn detect_zeros_of(field: &ScalarField, atlas: Atlas) -> Result<Vec<ZeroRecord>> {
    let mut out = Vec::new();
    for c in zero_candidates(field, atlas) {
        let part = &field.parts[c.part];
        let (slope, fit_quality) = fit_order(part, c.x, c.y);
        let m = slope.round();
        if !slope.is_finite() || (slope - m).abs() > tolerances::ORDER_ACCEPTANCE {
            return Err(Error::NotAbsoluteValueType {
                slope,
                location: format!("{} ({:.6}, {:.6})", part.chart.kind, c.x, c.y),
            });
        }
        if m < 1.0 {
            continue;
        }
        out.push(ZeroRecord {
            part: c.part,
            chart: part.chart.kind,
            x: c.x,
            y: c.y,
            z: c.z.map(|z| (z.re, z.im)),
            order: m as u32,
            slope,
            fit_quality,
        });
    }
    Ok(out)
}

/// Zeros of K − c on the metric's atlas.
pub fn detect_zeros(metric: &ConformalMetric, c: f64) -> Result<Vec<ZeroRecord>> {
    let f = super::k_minus_c(metric, c)?;
    detect_zeros_of(&f, metric.atlas)
}
