//! Restarted GMRES with right preconditioning.

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) struct GmresOutcome {
    pub x: Vec<f64>,
    /// ‖b − Ax‖ / ‖b‖.
    pub rel_residual: f64,
    pub iterations: usize,
}

/// Solves A x = b with x = M⁻¹ y, where `precond` applies M⁻¹.
pub(crate) fn gmres<A, P>(apply: A, precond: P, b: &[f64], rtol: f64, restart: usize, max_iter: usize) -> GmresOutcome
where
    A: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return GmresOutcome { x, rel_residual: 0.0, iterations: 0 };
    }
    let mut total = 0;
    loop {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        if beta <= rtol * bnorm || total >= max_iter {
            return GmresOutcome { x, rel_residual: beta / bnorm, iterations: total };
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|x| x / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut kk = 0;
        for k in 0..restart {
            let mut w = apply(&precond(&v[k]));
            total += 1;
            for i in 0..=k {
                h[i][k] = dot(&w, &v[i]);
                for (wj, vj) in w.iter_mut().zip(&v[i]) {
                    *wj -= h[i][k] * vj;
                }
            }
            h[k + 1][k] = norm(&w);
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            if d == 0.0 {
                kk = k;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            let hk1 = h[k + 1][k];
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            kk = k + 1;
            if g[k + 1].abs() <= rtol * bnorm || total >= max_iter || hk1 == 0.0 {
                break;
            }
            v.push(w.iter().map(|x| x / hk1).collect());
        }
        if kk == 0 {
            return GmresOutcome { x, rel_residual: beta / bnorm, iterations: total };
        }
        let mut y = vec![0.0; kk];
        for i in (0..kk).rev() {
            let s: f64 = (i + 1..kk).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut u = vec![0.0; n];
        for (yi, vi) in y.iter().zip(&v) {
            for (uj, vj) in u.iter_mut().zip(vi) {
                *uj += yi * vj;
            }
        }
        for (xj, dj) in x.iter_mut().zip(precond(&u)) {
            *xj += dj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonsymmetric_system() {
        let a = [[4.0, 1.0, 0.0], [-1.0, 3.0, 2.0], [0.5, 0.0, 2.0]];
        let apply = |x: &[f64]| (0..3).map(|i| (0..3).map(|j| a[i][j] * x[j]).sum()).collect::<Vec<f64>>();
        let b = [1.0, -2.0, 0.5];
        let out = gmres(apply, |x: &[f64]| x.to_vec(), &b, 1e-14, 2, 50);
        let ax = apply(&out.x);
        for i in 0..3 {
            assert!((ax[i] - b[i]).abs() < 1e-12);
        }
    }
}
