use std::f64::consts::TAU;

use super::*;
use crate::ode::{delaunay_torus_metric, solve_delaunay, DelaunayProfile};

const ALPHA: f64 = 2.0;

fn profile() -> DelaunayProfile {
    solve_delaunay(4.0, 1.0, 1.2).unwrap()
}

fn lifted(p: &DelaunayProfile, n: usize) -> (PeriodicGrid, Vec<f64>) {
    let grid = PeriodicGrid::new(ALPHA, p.period, n, n).unwrap();
    let m = delaunay_torus_metric(p, ALPHA, 0.0, n).unwrap();
    let f = grid.sample(&m.factor);
    (grid, f)
}

#[test]
fn lifted_profile_is_a_discrete_solution() {
    let p = profile();
    let (grid, f0) = lifted(&p, 128);
    let prob = SemilinearProblem::delaunay(4.0, 1.0);
    let sol = newton_solve_with(&prob, &grid, f0.clone(), 1e-8, Stencil::Spectral).unwrap();
    assert!(sol.iterations <= 5, "{:?}", sol.history);
    assert!(sol.residual() < 1e-8);
    let d = sol.f.iter().zip(&f0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(d < 1e-6, "{d}");
    assert!(prob.derivative_defect(&grid, &sol.f) < 1e-6);
}

#[test]
fn zero_is_the_flat_equilibrium() {
    let grid = PeriodicGrid::new(ALPHA, 3.0, 32, 32).unwrap();
    let prob = SemilinearProblem::delaunay(4.0, 1.0);
    let sol = newton_solve_with(&prob, &grid, vec![0.0; grid.len()], 1e-10, Stencil::Spectral).unwrap();
    assert_eq!(sol.iterations, 0);
    assert!(sol.f.iter().all(|&v| v == 0.0));
}

fn perturbed_initial(grid: &PeriodicGrid, f0: &[f64], shift: usize) -> Vec<f64> {
    let n1 = grid.n1;
    (0..grid.len())
        .map(|k| {
            let (i, j) = (k % n1, k / n1);
            let src = j * n1 + (i + n1 - shift) % n1;
            let (u, _) = grid.point(src);
            f0[src] + 0.01 * (TAU * u / ALPHA).sin()
        })
        .collect()
}

#[test]
fn perturbed_start_reconverges_quadratically() {
    let p = profile();
    let (grid, f0) = lifted(&p, 64);
    let prob = SemilinearProblem::delaunay(4.0, 1.0);
    let sol = newton_solve_with(&prob, &grid, perturbed_initial(&grid, &f0, 0), 1e-8, Stencil::Spectral).unwrap();
    assert!(sol.residual() < 1e-8);
    // e^(−af)(K − c) = −c at a solution
    let lap = discrete_residual(&SemilinearProblem::new("Δ", Arc::new(|_, _, _| 0.0), Arc::new(|_, _, _| 0.0)), &grid, &sol.f, Stencil::Spectral);
    let inv = sol.f.iter().zip(&lap).map(|(f, l)| ((-4.0 * f).exp() * ((2.0 * f).exp() * l - 1.0) + 1.0).abs()).fold(0.0, f64::max);
    assert!(inv < 1e-7, "{inv}");
    for w in sol.history.windows(2) {
        if w[0] < 1e-3 && w[1] > 1e-13 {
            assert!(w[1] <= 1e3 * w[0] * w[0], "{:?}", sol.history);
        }
    }
}

#[test]
fn translation_equivariance() {
    let p = profile();
    let (grid, f0) = lifted(&p, 32);
    let prob = SemilinearProblem::delaunay(4.0, 1.0);
    let a = newton_solve_with(&prob, &grid, perturbed_initial(&grid, &f0, 0), 1e-10, Stencil::Spectral).unwrap();
    let b = newton_solve_with(&prob, &grid, perturbed_initial(&grid, &f0, 5), 1e-10, Stencil::Spectral).unwrap();
    let n1 = grid.n1;
    let d = (0..grid.len())
        .map(|k| {
            let (i, j) = (k % n1, k / n1);
            (b.f[k] - a.f[j * n1 + (i + n1 - 5) % n1]).abs()
        })
        .fold(0.0, f64::max);
    assert!(d < 1e-9, "{d}");
}

#[test]
fn five_point_newton_converges() {
    let p = profile();
    let (grid, f0) = lifted(&p, 64);
    let prob = SemilinearProblem::delaunay(4.0, 1.0);
    let sol = newton_solve_with(&prob, &grid, f0, 1e-10, Stencil::FivePoint).unwrap();
    assert!(sol.residual() < 1e-10);
}

#[test]
fn unsolvable_problems_fail() {
    let grid = PeriodicGrid::new(1.0, 1.0, 16, 16).unwrap();
    let constant = SemilinearProblem::new("Δu = 1", Arc::new(|_, _, _| 1.0), Arc::new(|_, _, _| 0.0));
    assert!(matches!(
        newton_solve_with(&constant, &grid, vec![0.0; grid.len()], 1e-8, Stencil::Spectral),
        Err(Error::SingularLinearization(_))
    ));
    let positive = SemilinearProblem::new("Δu = e^u + 1", Arc::new(|_, _, u| u.exp() + 1.0), Arc::new(|_, _, u| u.exp()));
    let r = newton_solve_with(&positive, &grid, vec![0.0; grid.len()], 1e-8, Stencil::Spectral);
    assert!(matches!(r, Err(Error::Divergence { .. }) | Err(Error::SingularLinearization(_))), "{r:?}");
    assert!(newton_solve_with(&positive, &grid, vec![0.0; grid.len()], 1e-13, Stencil::Spectral).is_err());
}

#[test]
fn monotone_iteration_sandwich() {
    let grid = PeriodicGrid::new(2.0, 3.0, 48, 48).unwrap();
    let one = SemilinearProblem::exp_minus("1", Arc::new(|_, _| 1.0));
    let z = vec![0.0; grid.len()];
    let sol = monotone_solve_values(&one, z.clone(), z, &grid, 1e-12).unwrap();
    assert!(sol.f.iter().all(|&v| v == 0.0));

    let g = |x: f64, y: f64| 1.0 + 0.5 * (TAU * x / 2.0).sin() * (TAU * y / 3.0).sin();
    let prob = SemilinearProblem::exp_minus("1 + ½ sin sin", Arc::new(g));
    assert!(prob.derivative_defect(&grid, &vec![0.3; grid.len()]) < 1e-6);
    let (lo, hi) = (0.5f64.ln(), 1.5f64.ln());
    let sub = vec![lo; grid.len()];
    let sup = vec![hi; grid.len()];
    let sol = monotone_solve_values(&prob, sub, sup, &grid, 1e-12).unwrap();
    assert!(sol.f.iter().all(|&v| lo <= v && v <= hi));
    assert!(sol.residual < 1e-8, "{}", sol.residual);
    // swapped bounds are not a sub/super pair
    let bad = monotone_solve_values(&prob, vec![hi; grid.len()], vec![hi; grid.len()], &grid, 1e-12);
    assert!(matches!(bad, Err(Error::Monotonicity(_))));
    let bad = monotone_solve_values(&prob, vec![hi; grid.len()], vec![lo; grid.len()], &grid, 1e-12);
    assert!(matches!(bad, Err(Error::Monotonicity(_))));
}

#[test]
fn torus_verification_cases() {
    let p = profile();
    let (grid, f0) = lifted(&p, 256);
    let prob = SemilinearProblem::delaunay(4.0, 1.0);
    let sol = newton_solve_with(&prob, &grid, f0, 1e-9, Stencil::Spectral).unwrap();
    let v = verify_torus_ricci(&sol.f, &grid, &RicciType::new(4.0, 0.0, 1.0), 1.0).unwrap();
    assert!(v.report.verdict.pass, "{:?}", v.report.verdict);
    let (lo, hi) = v.witness_modulus.unwrap();
    assert!((lo - 1.0).abs() < 1e-3 && (hi - 1.0).abs() < 1e-3, "{lo} {hi}");

    let flat = PeriodicGrid::new(ALPHA, 3.0, 32, 32).unwrap();
    let v = verify_torus_ricci(&vec![0.0; flat.len()], &flat, &RicciType::new(4.0, 0.0, 0.0), 1.0).unwrap();
    assert_eq!(v.report.verdict.status, "trivial type");

    let s = flat.sample_fn(|u, _| (TAU * u / ALPHA).sin());
    let v = verify_torus_ricci(&s, &flat, &RicciType::new(4.0, 0.0, 1.0), 1.0).unwrap();
    assert!(!v.report.verdict.pass);
    assert!(v.report.residual_sup > 1e-2);
}

#[test]
fn grid_plumbing() {
    let skew = Chart::torus(Complex64::new(1.0, 0.0), Complex64::new(0.3, 1.0), 16, 16).unwrap();
    assert!(matches!(PeriodicGrid::from_chart(&skew), Err(Error::UnsupportedTopology(_))));
    assert!(PeriodicGrid::new(1.0, 1.0, 2000, 2000).is_err());
    let grid = PeriodicGrid::new(1.0, 2.0, 16, 24).unwrap();
    assert_eq!(PeriodicGrid::from_chart(&grid.chart().unwrap()).unwrap(), grid);
    let csv = fields_csv(&grid, &vec![0.0; grid.len()]);
    assert_eq!(csv.lines().count(), 1 + 16 * 24);
    assert!(csv.starts_with("u,v,f,K\n0,0,0,"));
    let json = serde_json::to_value(SemilinearProblem::delaunay(4.0, 1.0)).unwrap();
    assert_eq!(json["description"], "delaunay(4,1)");
}
