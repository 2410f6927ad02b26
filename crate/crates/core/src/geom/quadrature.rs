//! Gauss–Legendre nodes and polar disk rules.

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pnm1 = p0;
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Polar product rule on the disk |z| ≤ radius: Gauss–Legendre in r (with the
/// Jacobian r folded into the weight) and the periodic trapezoid in θ.
pub fn polar_disk(radius: f64, nr: usize, ntheta: usize) -> Vec<(f64, f64, f64)> {
    let (xr, wr) = gauss_legendre(nr);
    let dtheta = std::f64::consts::TAU / ntheta as f64;
    let mut out = Vec::with_capacity(nr * ntheta);
    for (xi, wi) in xr.iter().zip(wr.iter()) {
        let r = 0.5 * radius * (xi + 1.0);
        let wrad = 0.5 * radius * wi * r;
        for k in 0..ntheta {
            let th = (k as f64 + 0.5) * dtheta;
            out.push((r * th.cos(), r * th.sin(), wrad * dtheta));
        }
    }
    out
}
