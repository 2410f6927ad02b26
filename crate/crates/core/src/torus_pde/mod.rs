//! Semilinear equations Δ_flat f = N(z, f) on rectangular flat tori: damped
//! Newton with preconditioned GMRES, and the shifted monotone iteration between
//! a sub- and a supersolution.

mod gmres;
mod spectral;

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Chart, ConformalMetric, RicciType, ScalarField, MIN_RESOLUTION};
use crate::tolerances;
use crate::verify::{extract_witness, verify, VerificationReport};
use spectral::{laplacian_symbol, Fft2};

/// Largest n₁·n₂ accepted.
pub const MAX_POINTS: usize = 1_000_000;
const MAX_NEWTON: usize = 50;
const MAX_HALVINGS: usize = 20;
const MAX_MONOTONE: usize = 20_000;

/// Discrete flat Laplacian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    FivePoint,
    #[default]
    Spectral,
}

/// Grid on ℂ/(αℤ ⊕ iTℤ); sample (i, j) sits at (α i/n₁, T j/n₂).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    pub period_u: f64,
    pub period_v: f64,
    pub n1: usize,
    pub n2: usize,
}

impl PeriodicGrid {
    pub fn new(period_u: f64, period_v: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(period_u > 0.0 && period_v > 0.0 && period_u.is_finite() && period_v.is_finite()) {
            return Err(Error::Precondition(format!("periods must be positive, got {period_u}, {period_v}")));
        }
        if n1 < MIN_RESOLUTION || n2 < MIN_RESOLUTION || n1 * n2 > MAX_POINTS {
            return Err(Error::Precondition(format!(
                "resolution {n1}x{n2} needs n ≥ {MIN_RESOLUTION} and n₁n₂ ≤ {MAX_POINTS}"
            )));
        }
        Ok(PeriodicGrid { period_u, period_v, n1, n2 })
    }

    /// Grid matching a rectangular torus chart.
    pub fn from_chart(chart: &Chart) -> Result<Self> {
        let (pu, pv) = chart
            .rectangular_periods()
            .ok_or_else(|| Error::UnsupportedTopology("periodic solvers need a rectangular lattice".into()))?;
        Self::new(pu, pv, chart.nx, chart.ny)
    }

    pub fn chart(&self) -> Result<Chart> {
        Chart::torus(Complex64::new(self.period_u, 0.0), Complex64::new(0.0, self.period_v), self.n1, self.n2)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k % self.n1, k / self.n1);
        (self.period_u * i as f64 / self.n1 as f64, self.period_v * j as f64 / self.n2 as f64)
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Values of the first chart of `field` at the grid points.
    pub fn sample(&self, field: &ScalarField) -> Vec<f64> {
        let p = &field.parts[0];
        self.points().into_iter().map(|(x, y)| p.value_at(x, y)).collect()
    }

    pub fn sample_fn<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.points().into_iter().map(|(x, y)| f(x, y)).collect()
    }

    /// Grid-sampled field on the torus chart.
    pub fn field(&self, values: Vec<f64>) -> Result<ScalarField> {
        let part = crate::geom::ChartField::grid(self.chart()?, values)?;
        Ok(ScalarField::single(part, crate::geom::Units::Dimensionless))
    }
}

type PointRule = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Right-hand side N(x, y, f) of Δ_flat f = N and its derivative in f.
#[derive(Clone, Serialize)]
pub struct SemilinearProblem {
    pub description: String,
    #[serde(skip)]
    rhs: PointRule,
    #[serde(skip)]
    deriv: PointRule,
}

impl std::fmt::Debug for SemilinearProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SemilinearProblem({})", self.description)
    }
}

impl SemilinearProblem {
    pub fn new(description: impl Into<String>, rhs: PointRule, deriv: PointRule) -> Self {
        SemilinearProblem { description: description.into(), rhs, deriv }
    }

    /// Δ_flat f = −c e^((a−2)f) + c e^(−2f): curvature equation with constant witness |h|² = c.
    pub fn delaunay(a: f64, c: f64) -> Self {
        Self::new(
            format!("delaunay({a},{c})"),
            Arc::new(move |_, _, f| -c * ((a - 2.0) * f).exp() + c * (-2.0 * f).exp()),
            Arc::new(move |_, _, f| -c * (a - 2.0) * ((a - 2.0) * f).exp() - 2.0 * c * (-2.0 * f).exp()),
        )
    }

    /// Δu = e^u − g(x, y).
    pub fn exp_minus(tag: &str, g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>) -> Self {
        let g2 = g.clone();
        Self::new(
            format!("exp_minus({tag})"),
            Arc::new(move |x, y, u| u.exp() - g2(x, y)),
            Arc::new(|_, _, u| u.exp()),
        )
    }

    pub fn value(&self, x: f64, y: f64, f: f64) -> f64 {
        (self.rhs)(x, y, f)
    }

    pub fn derivative(&self, x: f64, y: f64, f: f64) -> f64 {
        (self.deriv)(x, y, f)
    }

    /// Largest relative gap between the declared derivative and a central
    /// difference at the given samples.
    pub fn derivative_defect(&self, grid: &PeriodicGrid, values: &[f64]) -> f64 {
        let eta = 1e-5;
        grid.points()
            .into_iter()
            .zip(values)
            .map(|((x, y), &u)| {
                let fd = (self.value(x, y, u + eta) - self.value(x, y, u - eta)) / (2.0 * eta);
                let d = self.derivative(x, y, u);
                (fd - d).abs() / d.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

struct Operators {
    fft: Fft2,
    lap: Vec<f64>,
}

impl Operators {
    fn new(grid: &PeriodicGrid, stencil: Stencil) -> Self {
        Operators { fft: Fft2::new(grid.n1, grid.n2), lap: laplacian_symbol(grid, stencil) }
    }

    fn laplacian(&self, v: &[f64]) -> Vec<f64> {
        self.fft.apply(v, &self.lap)
    }

    /// (L − s)⁻¹ v for a shift s with L − s invertible.
    fn shifted_inverse(&self, v: &[f64], s: f64) -> Vec<f64> {
        let sym: Vec<f64> = self.lap.iter().map(|l| 1.0 / (l - s)).collect();
        self.fft.apply(v, &sym)
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn residual(ops: &Operators, p: &SemilinearProblem, pts: &[(f64, f64)], f: &[f64]) -> Vec<f64> {
    let lf = ops.laplacian(f);
    lf.iter().zip(pts).zip(f).map(|((l, &(x, y)), &u)| l - p.value(x, y, u)).collect()
}

/// Discrete residual Δ_h f − N(f).
pub fn discrete_residual(problem: &SemilinearProblem, grid: &PeriodicGrid, f: &[f64], stencil: Stencil) -> Vec<f64> {
    residual(&Operators::new(grid, stencil), problem, &grid.points(), f)
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonSolution {
    pub description: String,
    pub grid: PeriodicGrid,
    pub stencil: Stencil,
    pub f: Vec<f64>,
    /// Sup-norm residual before each step and after the last.
    pub history: Vec<f64>,
    pub iterations: usize,
}

impl NewtonSolution {
    pub fn residual(&self) -> f64 {
        *self.history.last().unwrap_or(&f64::NAN)
    }

    pub fn field(&self) -> Result<ScalarField> {
        self.grid.field(self.f.clone())
    }
}

/// Damped Newton iteration for Δ_flat f = N(f) with the default spectral Laplacian.
pub fn newton_solve(problem: &SemilinearProblem, grid: &PeriodicGrid, initial: &ScalarField, tol: f64) -> Result<NewtonSolution> {
    newton_solve_with(problem, grid, grid.sample(initial), tol, Stencil::default())
}

pub fn newton_solve_with(
    problem: &SemilinearProblem,
    grid: &PeriodicGrid,
    initial: Vec<f64>,
    tol: f64,
    stencil: Stencil,
) -> Result<NewtonSolution> {
    if !(tol >= 1e-12) {
        return Err(Error::Precondition(format!("tolerance {tol} below 1e-12")));
    }
    if initial.len() != grid.len() || initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("initial guess must be finite and match the grid".into()));
    }
    let ops = Operators::new(grid, stencil);
    let pts = grid.points();
    let mut f = initial;
    let mut r = residual(&ops, problem, &pts, &f);
    let mut rn = sup(&r);
    let mut history = vec![rn];
    let mut iterations = 0;
    while rn >= tol {
        if iterations >= MAX_NEWTON {
            return Err(Error::Divergence { history });
        }
        let d: Vec<f64> = pts.iter().zip(&f).map(|(&(x, y), &u)| problem.derivative(x, y, u)).collect();
        let shift = (d.iter().sum::<f64>() / d.len() as f64).abs().max(1.0);
        let apply = |v: &[f64]| -> Vec<f64> { ops.laplacian(v).iter().zip(v).zip(&d).map(|((l, v), d)| l - d * v).collect() };
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let lin = gmres::gmres(apply, |v: &[f64]| ops.shifted_inverse(v, shift), &rhs, 1e-12, 60, 600);
        if !(lin.rel_residual < 0.5) {
            return Err(Error::SingularLinearization(format!(
                "GMRES reached relative residual {:.3e} after {} iterations",
                lin.rel_residual, lin.iterations
            )));
        }
        let mut t = 1.0;
        let mut halvings = 0;
        loop {
            let trial: Vec<f64> = f.iter().zip(&lin.x).map(|(u, s)| u + t * s).collect();
            let rt = residual(&ops, problem, &pts, &trial);
            let rtn = sup(&rt);
            if rtn < rn {
                f = trial;
                r = rt;
                rn = rtn;
                break;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                history.push(rtn);
                return Err(Error::Divergence { history });
            }
            t *= 0.5;
        }
        iterations += 1;
        history.push(rn);
    }
    Ok(NewtonSolution { description: problem.description.clone(), grid: *grid, stencil, f, history, iterations })
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotoneSolution {
    pub description: String,
    pub grid: PeriodicGrid,
    pub f: Vec<f64>,
    pub iterations: usize,
    /// Shift λ used at each iteration.
    pub shifts: Vec<f64>,
    /// Sup-norm of Δ_h f − N(f) for the five-point Laplacian.
    pub residual: f64,
}

/// Shifted iteration (λ − Δ_h)u_{k+1} = λu_k − N(u_k) from the subsolution,
/// with the five-point Laplacian so that (λ − Δ_h)⁻¹ is positive.
pub fn monotone_solve(
    problem: &SemilinearProblem,
    sub: &ScalarField,
    sup_field: &ScalarField,
    grid: &PeriodicGrid,
    tol: f64,
) -> Result<MonotoneSolution> {
    monotone_solve_values(problem, grid.sample(sub), grid.sample(sup_field), grid, tol)
}

pub fn monotone_solve_values(
    problem: &SemilinearProblem,
    lo: Vec<f64>,
    hi: Vec<f64>,
    grid: &PeriodicGrid,
    tol: f64,
) -> Result<MonotoneSolution> {
    let ops = Operators::new(grid, Stencil::FivePoint);
    let pts = grid.points();
    if let Some(k) = (0..lo.len()).find(|&k| !(lo[k] <= hi[k])) {
        return Err(Error::Monotonicity(format!("sub > sup at {:?}: {} > {}", pts[k], lo[k], hi[k])));
    }
    let scale = 1.0 + sup(&problem_values(problem, &pts, &hi)).max(sup(&problem_values(problem, &pts, &lo)));
    let slack = 1e-10 * scale;
    let rl = residual(&ops, problem, &pts, &lo);
    if let Some(k) = (0..rl.len()).find(|&k| rl[k] < -slack) {
        return Err(Error::Monotonicity(format!("not a subsolution at {:?}: Δu − N(u) = {:.3e}", pts[k], rl[k])));
    }
    let rh = residual(&ops, problem, &pts, &hi);
    if let Some(k) = (0..rh.len()).find(|&k| rh[k] > slack) {
        return Err(Error::Monotonicity(format!("not a supersolution at {:?}: Δu − N(u) = {:.3e}", pts[k], rh[k])));
    }

    let mut u = lo.clone();
    let mut shifts = Vec::new();
    let mut iterations = 0;
    loop {
        // λ bounds ∂N/∂u over the remaining box [u, hi]
        let lambda = pts
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| {
                (0..=4)
                    .map(|s| problem.derivative(x, y, u[k] + (hi[k] - u[k]) * s as f64 / 4.0).abs())
                    .fold(0.0, f64::max)
            })
            .fold(1e-8, f64::max);
        shifts.push(lambda);
        let rhs: Vec<f64> = pts.iter().zip(&u).map(|(&(x, y), &v)| lambda * v - problem.value(x, y, v)).collect();
        let neg: Vec<f64> = rhs.iter().map(|v| -v).collect();
        let next = ops.shifted_inverse(&neg, lambda);
        let tiny = |v: f64| 1e-10 * (1.0 + v.abs());
        let mut step = 0.0_f64;
        let mut out = Vec::with_capacity(u.len());
        for k in 0..u.len() {
            let n = next[k];
            if n < u[k] - tiny(u[k]) || n > hi[k] + tiny(hi[k]) {
                return Err(Error::Monotonicity(format!(
                    "iterate {iterations} leaves [u_k, sup] at {:?}: {n} not in [{}, {}]",
                    pts[k], u[k], hi[k]
                )));
            }
            let n = n.clamp(u[k], hi[k]);
            step = step.max(n - u[k]);
            out.push(n);
        }
        u = out;
        iterations += 1;
        if step < tol {
            break;
        }
        if iterations >= MAX_MONOTONE {
            return Err(Error::Monotonicity(format!("no convergence after {iterations} iterations (last step {step:.3e})")));
        }
    }
    let res = sup(&residual(&ops, problem, &pts, &u));
    Ok(MonotoneSolution { description: problem.description.clone(), grid: *grid, f: u, iterations, shifts, residual: res })
}

fn problem_values(p: &SemilinearProblem, pts: &[(f64, f64)], u: &[f64]) -> Vec<f64> {
    pts.iter().zip(u).map(|(&(x, y), &v)| p.value(x, y, v)).collect()
}

/// Report for a torus factor, with the witness modulus range when b = 0.
#[derive(Clone, Debug, Serialize)]
pub struct TorusVerification {
    #[serde(flatten)]
    pub report: VerificationReport,
    pub witness_modulus: Option<(f64, f64)>,
}

/// Verifies e^(−2f)|dz|² for grid samples f and checks that |h| is constant.
pub fn verify_torus_ricci(f: &[f64], grid: &PeriodicGrid, ty: &RicciType, tolerance_scale: f64) -> Result<TorusVerification> {
    let metric = ConformalMetric::torus_grid(grid.chart()?, f.to_vec(), "torus grid solution")?;
    let mut report = verify(&metric, ty, tolerance_scale)?;
    let mut witness_modulus = None;
    if ty.b == 0.0 && report.verdict.status != "trivial type" && report.verdict.pass {
        let w = extract_witness(&metric, ty)?;
        let (lo, hi) = w.modulus_range();
        let spread = (hi - lo) / hi.abs().max(f64::MIN_POSITIVE);
        if spread > tolerances::RESIDUAL_GRID * tolerance_scale {
            report.verdict.pass = false;
            report.verdict.status = "not generalized Ricci".into();
            report.verdict.reasons.push(format!("witness modulus varies: [{lo:.6e}, {hi:.6e}]"));
        }
        witness_modulus = Some((lo, hi));
    }
    Ok(TorusVerification { report, witness_modulus })
}

/// CSV with columns u, v, f, K (K = e^(2f)Δf with the spectral Laplacian).
pub fn fields_csv(grid: &PeriodicGrid, f: &[f64]) -> String {
    let ops = Operators::new(grid, Stencil::Spectral);
    let lap = ops.laplacian(f);
    let mut s = String::from("u,v,f,K\n");
    for (k, (x, y)) in grid.points().into_iter().enumerate() {
        let _ = writeln!(s, "{x},{y},{},{}", f[k], (2.0 * f[k]).exp() * lap[k]);
    }
    s
}

#[cfg(test)]
mod tests;
