//! Fourth-order central differences on uniform grids.

use super::chart::{Chart, ChartKind};
use crate::error::{Error, Result};

/// First derivatives and flat Laplacian of grid samples.
///
/// Rectangular tori wrap periodically; plane charts return NaN within two
/// samples of the border where the stencil does not fit.
pub fn grid_derivatives(chart: &Chart, v: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let periodic = match chart.kind {
        ChartKind::TorusFundamental => {
            if chart.rectangular_periods().is_none() {
                return Err(Error::UnsupportedTopology(
                    "grid differentiation needs periods on the real and imaginary axes".into(),
                ));
            }
            true
        }
        ChartKind::PlaneRect => false,
        k => {
            return Err(Error::UnsupportedTopology(format!(
                "grid differentiation is not available on {k} charts"
            )))
        }
    };
    let (hx, hy) = chart.spacing();
    let (nx, ny) = (chart.nx as isize, chart.ny as isize);
    let at = |i: isize, j: isize| -> Option<f64> {
        if periodic {
            Some(v[(j.rem_euclid(ny) * nx + i.rem_euclid(nx)) as usize])
        } else if i < 0 || j < 0 || i >= nx || j >= ny {
            None
        } else {
            Some(v[(j * nx + i) as usize])
        }
    };
    let n = chart.len();
    let mut fx = vec![f64::NAN; n];
    let mut fy = vec![f64::NAN; n];
    let mut lap = vec![f64::NAN; n];
    for j in 0..ny {
        for i in 0..nx {
            let k = (j * nx + i) as usize;
            let xs = [at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j), at(i + 2, j)];
            let ys = [at(i, j - 2), at(i, j - 1), at(i, j), at(i, j + 1), at(i, j + 2)];
            if let (Some(xs), Some(ys)) = (collect5(xs), collect5(ys)) {
                fx[k] = (xs[0] - 8.0 * xs[1] + 8.0 * xs[3] - xs[4]) / (12.0 * hx);
                fy[k] = (ys[0] - 8.0 * ys[1] + 8.0 * ys[3] - ys[4]) / (12.0 * hy);
                let dxx = (-xs[0] + 16.0 * xs[1] - 30.0 * xs[2] + 16.0 * xs[3] - xs[4]) / (12.0 * hx * hx);
                let dyy = (-ys[0] + 16.0 * ys[1] - 30.0 * ys[2] + 16.0 * ys[3] - ys[4]) / (12.0 * hy * hy);
                lap[k] = dxx + dyy;
            }
        }
    }
    Ok((fx, fy, lap))
}

fn collect5(a: [Option<f64>; 5]) -> Option<[f64; 5]> {
    Some([a[0]?, a[1]?, a[2]?, a[3]?, a[4]?])
}
