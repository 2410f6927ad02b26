//! Command-line front end: JSON run configurations, report.json and fields.csv.
//!
//! A run reads one [`RunConfig`], builds the requested metric, runs the mapped
//! pipeline and writes its artifacts. [`run`] returns whether the checks
//! passed; the binary turns that into exit code 0 or 2, and errors into 1.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::standard::{flat_torus, round_sphere};
use crate::geom::{curvature, Atlas, ConformalMetric, RicciType};
use crate::ode::{
    delaunay_potential, delaunay_torus_metric, rotational_metric, solve_delaunay, solve_rotational, sphere2_metric,
    Sphere2Params,
};
use crate::sphere_construct::{construct_sphere, RationalMap};
use crate::toda::toda_classify;
use crate::tolerances;
use crate::torus_pde::{monotone_solve_values, newton_solve_with, verify_torus_ricci, PeriodicGrid, SemilinearProblem, Stencil};
use crate::transform::{power_transform, prediction_defect, TransformSpec};
use crate::verify::{admissibility, area, verify, Admissibility, AdmissibilityQuery, VerificationReport, ZeroData, TRIVIAL_TEXT};

pub const DEFAULT_RESOLUTION: usize = 128;
/// Fields accepted in `fields`, in CSV column order.
pub const FIELD_NAMES: [&str; 3] = ["f", "K", "residual"];

/// Command-line flags; flags override the matching config keys.
#[derive(Debug, Parser)]
#[command(name = "gricci", version, about = "Construct and verify generalized Ricci surfaces")]
pub struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for report.json and fields.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Multiplier applied to every default tolerance.
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
    /// Samples per chart side.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Construct,
    Verify,
    Classify,
    Transform,
    SolveTorus,
}

/// Metric families; keys mirror the constructor arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Sphere2 {
        ell: u32,
        #[serde(default)]
        tau: f64,
    },
    Rotational {
        ell: u32,
        c: f64,
        xi: f64,
        #[serde(default)]
        y0: f64,
    },
    /// `energy` defaults to Φ(0) + 0.1.
    Delaunay {
        a: f64,
        c: f64,
        #[serde(default)]
        energy: Option<f64>,
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default)]
        beta: f64,
    },
    RationalMap {
        numerator: Vec<[f64; 2]>,
        #[serde(default = "unit_poly")]
        denominator: Vec<[f64; 2]>,
    },
    RoundSphere {
        kappa: f64,
    },
    FlatTorus {
        g1: [f64; 2],
        g2: [f64; 2],
    },
}

fn one() -> f64 {
    1.0
}

fn unit_poly() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

fn newton_tol() -> f64 {
    1e-8
}

fn unit_periods() -> [f64; 2] {
    [1.0, 1.0]
}

/// Torus solver settings for `solve-torus`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverConfig {
    /// Newton from the lifted Delaunay profile plus `perturbation`·sin(2πu/α).
    Newton {
        #[serde(default = "newton_tol")]
        tol: f64,
        #[serde(default)]
        stencil: Stencil,
        #[serde(default)]
        perturbation: f64,
    },
    /// Δu = e^u − g with g = g_mean + g_amplitude·cos(2πu/P₁)cos(2πv/P₂).
    Monotone {
        #[serde(default = "newton_tol")]
        tol: f64,
        g_mean: f64,
        #[serde(default)]
        g_amplitude: f64,
        #[serde(default = "unit_periods")]
        periods: [f64; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub family: Option<Family>,
    /// Defaults to the family's own type where it has one.
    #[serde(default, rename = "type")]
    pub ty: Option<RicciType>,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default = "one")]
    pub tolerance_scale: f64,
    /// Claim checked by `verify`: K ≢ c (true) or K ≡ const (false).
    #[serde(default)]
    pub non_constant: Option<bool>,
    /// Exponent for `transform`.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    /// Columns of fields.csv; empty means no CSV.
    #[serde(default)]
    pub fields: Vec<String>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("schema error")?;
        cfg.validate().context("schema error")?;
        Ok(cfg)
    }

    /// Checks that the keys required by the command are present.
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Precondition(format!("command {:?} needs {what}", self.command)))
            }
        };
        match self.command {
            Command::Construct | Command::Verify | Command::Transform => need(self.family.is_some(), "a family")?,
            Command::Classify => need(self.ty.is_some(), "a type")?,
            Command::SolveTorus => {
                need(self.solver.is_some(), "a solver")?;
                if matches!(self.solver, Some(SolverConfig::Newton { .. })) {
                    need(matches!(self.family, Some(Family::Delaunay { .. })), "a delaunay family for Newton")?;
                }
            }
        }
        if self.command == Command::Transform {
            need(self.gamma.is_some(), "gamma")?;
        }
        if !(self.tolerance_scale > 0.0 && self.tolerance_scale.is_finite()) {
            return Err(Error::Precondition(format!("tolerance_scale must be positive, got {}", self.tolerance_scale)));
        }
        if let Some(bad) = self.fields.iter().find(|f| !FIELD_NAMES.contains(&f.as_str())) {
            return Err(Error::UnknownField { requested: bad.clone(), available: FIELD_NAMES.join(", ") });
        }
        Ok(())
    }

    /// Applies command-line overrides.
    pub fn with_args(mut self, args: &Args) -> Self {
        if let Some(o) = &args.out {
            self.out = Some(o.clone());
        }
        if let Some(t) = args.tolerance_scale {
            self.tolerance_scale = t;
        }
        if let Some(n) = args.resolution {
            self.resolution = Some(n);
        }
        self
    }

    fn n(&self) -> usize {
        self.resolution.unwrap_or(DEFAULT_RESOLUTION)
    }
}

impl Family {
    /// The type the family is built for, if it has one.
    pub fn natural_type(&self) -> Option<RicciType> {
        match *self {
            Family::Sphere2 { ell, .. } => Some(RicciType::new(-2.0 * ell as f64, 0.0, 0.0)),
            Family::Rotational { ell, c, .. } => Some(RicciType::new(-2.0 * ell as f64, 0.0, c)),
            Family::Delaunay { a, c, .. } => Some(RicciType::new(a, 0.0, c)),
            Family::RationalMap { ref numerator, ref denominator } => {
                let d = numerator.len().max(denominator.len()).saturating_sub(1);
                (d >= 2).then(|| RicciType::new(-2.0 * (d - 1) as f64, 0.0, 0.0))
            }
            Family::RoundSphere { .. } | Family::FlatTorus { .. } => None,
        }
    }

    pub fn build(&self, n: usize) -> Result<Built> {
        let metric = match self {
            Family::Sphere2 { ell, tau } => sphere2_metric(Sphere2Params::new(*ell, *tau)?, n)?,
            Family::Rotational { ell, c, xi, y0 } => rotational_metric(&solve_rotational(*ell, *c, *xi, *y0)?, n)?,
            Family::Delaunay { a, c, energy, alpha, beta } => {
                let e = energy.unwrap_or_else(|| delaunay_potential(*a, *c, 0.0) + 0.1);
                delaunay_torus_metric(&solve_delaunay(*a, *c, e)?, *alpha, *beta, n)?
            }
            Family::RationalMap { numerator, denominator } => {
                let map = RationalMap::new(&to_poly(numerator), &to_poly(denominator))?;
                let s = construct_sphere(&map, n)?;
                let info = json!({
                    "ell": s.ell,
                    "a": s.a,
                    "conical_data": s.data,
                    "simplification_defect": s.simplification_defect,
                });
                return Ok(Built { metric: s.metric, info: Some(info) });
            }
            Family::RoundSphere { kappa } => round_sphere(*kappa, n)?,
            Family::FlatTorus { g1, g2 } => {
                flat_torus(Complex64::new(g1[0], g1[1]), Complex64::new(g2[0], g2[1]), n)?
            }
        };
        Ok(Built { metric, info: None })
    }
}

fn to_poly(c: &[[f64; 2]]) -> Vec<Complex64> {
    c.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

/// A constructed metric with family-specific extras for the report.
pub struct Built {
    pub metric: ConformalMetric,
    pub info: Option<Value>,
}

/// Result of one run: the report written to report.json, a text summary and
/// the pass flag behind the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    pub report: Value,
    pub summary: String,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }
}

fn genus(metric: &ConformalMetric) -> Option<u32> {
    match metric.atlas {
        Atlas::Sphere { .. } => Some(0),
        Atlas::Torus => Some(1),
        Atlas::Plane => None,
    }
}

fn metric_summary(metric: &ConformalMetric) -> Result<Value> {
    let (klo, khi) = curvature(metric)?.min_max();
    let charts: Vec<Value> = metric
        .charts()
        .iter()
        .map(|c| json!({ "kind": c.kind.to_string(), "nx": c.nx, "ny": c.ny }))
        .collect();
    Ok(json!({
        "name": metric.name,
        "charts": charts,
        "euler_characteristic": metric.euler_characteristic(),
        "area": area(metric).ok(),
        "curvature_range": [klo, khi],
    }))
}

/// Executes the configured pipeline without touching the file system.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.command {
        Command::Construct => construct(cfg),
        Command::Verify => verify_cmd(cfg),
        Command::Classify => classify(cfg),
        Command::Transform => transform(cfg),
        Command::SolveTorus => solve_torus(cfg),
    }
}

fn family(cfg: &RunConfig) -> Result<&Family> {
    cfg.family.as_ref().ok_or_else(|| Error::Precondition("missing family".into()))
}

fn resolve_type(cfg: &RunConfig) -> Option<RicciType> {
    cfg.ty.or_else(|| cfg.family.as_ref().and_then(Family::natural_type))
}

fn require_type(cfg: &RunConfig) -> Result<RicciType> {
    resolve_type(cfg).ok_or_else(|| Error::Precondition("this family has no default type; set \"type\"".into()))
}

fn maybe_csv(cfg: &RunConfig, metric: &ConformalMetric, ty: Option<&RicciType>) -> Result<Option<String>> {
    if cfg.fields.is_empty() {
        return Ok(None);
    }
    emit_plot_data(metric, ty, &cfg.fields).map(Some)
}

fn construct(cfg: &RunConfig) -> Result<Outcome> {
    let fam = family(cfg)?;
    let built = fam.build(cfg.n())?;
    let ty = resolve_type(cfg);
    let report = json!({
        "command": "construct",
        "family": fam,
        "type": ty,
        "metric": metric_summary(&built.metric)?,
        "construction": built.info,
    });
    let summary = format!("PASS construct {}\n", built.metric.name);
    let csv = maybe_csv(cfg, &built.metric, ty.as_ref())?;
    Ok(Outcome { pass: true, report, summary, csv })
}

/// Admissibility of the claimed curvature behaviour given the measured zero data.
fn claim_check(
    metric: &ConformalMetric,
    ty: &RicciType,
    report: &VerificationReport,
    claim: Option<bool>,
) -> (Option<Admissibility>, Vec<String>) {
    let Some(g) = genus(metric) else { return (None, Vec::new()) };
    let measured_constant = report.verdict.curvature == "constant curvature";
    let trivial = report.verdict.status == "trivial type";
    let non_constant = claim.unwrap_or(!measured_constant && !trivial);
    let data = (!trivial).then(|| ZeroData::Partition(report.zeros.iter().map(|z| z.order).collect()));
    let verdict = admissibility(&AdmissibilityQuery { ty: *ty, genus: g, data, non_constant });
    let mut reasons = Vec::new();
    let clause = match &verdict {
        Admissibility::Admissible(c) | Admissibility::Inadmissible(c) => c.clone(),
        Admissibility::NoObstructionFound => "no obstruction applies".into(),
    };
    if let Admissibility::Inadmissible(c) = &verdict {
        reasons.push(format!("obstruction: {c}"));
    }
    match claim {
        Some(true) if measured_constant || trivial => {
            reasons.push(format!("claim K ≢ const contradicted: measured constant curvature ({clause})"))
        }
        Some(false) if !measured_constant => reasons.push("claim K ≡ const contradicted: measured non-constant curvature".into()),
        _ => {}
    }
    (Some(verdict), reasons)
}

fn verify_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let fam = family(cfg)?;
    let built = fam.build(cfg.n())?;
    let ty = require_type(cfg)?;
    let mut rep = verify(&built.metric, &ty, cfg.tolerance_scale)?;
    let (adm, extra) = claim_check(&built.metric, &ty, &rep, cfg.non_constant);
    if !extra.is_empty() {
        rep.verdict.pass = false;
        rep.verdict.status = "claim contradicted".into();
        rep.verdict.reasons.extend(extra);
    }
    let pass = rep.verdict.pass;
    let report = json!({
        "command": "verify",
        "family": fam,
        "type": ty,
        "claim_non_constant": cfg.non_constant,
        "metric": metric_summary(&built.metric)?,
        "construction": built.info,
        "verification": rep,
        "admissibility": adm,
        "pass": pass,
    });
    let summary = report_render(&rep);
    let csv = maybe_csv(cfg, &built.metric, Some(&ty))?;
    Ok(Outcome { pass, report, summary, csv })
}

fn classify(cfg: &RunConfig) -> Result<Outcome> {
    let ty = require_type(cfg)?;
    let t = toda_classify(&ty)?;
    let label = serde_json::to_value(t.label).map_err(|e| Error::Precondition(e.to_string()))?;
    let summary = format!("classification {} (ξ = {})\n", label.as_str().unwrap_or("?"), t.xi);
    let report = json!({ "command": "classify", "classification": t });
    Ok(Outcome { pass: true, report, summary, csv: None })
}

fn transform(cfg: &RunConfig) -> Result<Outcome> {
    let fam = family(cfg)?;
    let built = fam.build(cfg.n())?;
    let ty = require_type(cfg)?;
    let gamma = cfg.gamma.ok_or_else(|| Error::Precondition("missing gamma".into()))?;
    let spec = TransformSpec::new(gamma, ty)?;
    let (out, predicted) = power_transform(&built.metric, &ty, gamma)?;
    let defect = prediction_defect(&out, &predicted)?;
    let base = if out.is_analytic() { tolerances::RESIDUAL_ODE } else { tolerances::RESIDUAL_GRID };
    let tol = base * cfg.tolerance_scale;
    let pass = defect <= tol;
    let predicted_type = spec.predicted_type();
    let report = json!({
        "command": "transform",
        "family": fam,
        "type": ty,
        "gamma": gamma,
        "predicted_type": predicted_type,
        "predicts_flat": spec.predicts_flat(),
        "prediction_defect": defect,
        "tolerance": tol,
        "pass": pass,
    });
    let summary = format!("{} curvature_prediction sup={defect:.3e} tol={tol:.1e}\n", pass_word(pass));
    let csv = maybe_csv(cfg, &out, predicted_type.as_ref())?;
    Ok(Outcome { pass, report, summary, csv })
}

fn solve_torus(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.n();
    match cfg.solver.as_ref().ok_or_else(|| Error::Precondition("missing solver".into()))? {
        SolverConfig::Newton { tol, stencil, perturbation } => {
            let fam = family(cfg)?;
            let Family::Delaunay { a, c, .. } = *fam else {
                return Err(Error::Precondition("Newton needs a delaunay family".into()));
            };
            let built = fam.build(n)?;
            let chart = &built.metric.charts()[0];
            let grid = PeriodicGrid::from_chart(chart)?;
            let f0: Vec<f64> = grid
                .sample(&built.metric.factor)
                .into_iter()
                .zip(grid.points())
                .map(|(f, (u, _))| f + perturbation * (TAU * u / grid.period_u).sin())
                .collect();
            let sol = newton_solve_with(&SemilinearProblem::delaunay(a, c), &grid, f0, *tol, *stencil)?;
            let ty = cfg.ty.unwrap_or(RicciType::new(a, 0.0, c));
            let ver = verify_torus_ricci(&sol.f, &grid, &ty, cfg.tolerance_scale)?;
            let pass = sol.residual() < *tol && ver.report.verdict.pass;
            let mut summary = format!(
                "{} newton residual={:.3e} tol={tol:.1e} iterations={}\n",
                pass_word(sol.residual() < *tol),
                sol.residual(),
                sol.iterations
            );
            summary.push_str(&report_render(&ver.report));
            let report = json!({
                "command": "solve-torus",
                "family": fam,
                "type": ty,
                "solver": cfg.solver,
                "grid": grid,
                "iterations": sol.iterations,
                "history": sol.history,
                "residual": sol.residual(),
                "verification": ver,
                "pass": pass,
            });
            let metric = ConformalMetric::torus_grid(grid.chart()?, sol.f, "Newton torus solution")?;
            let csv = maybe_csv(cfg, &metric, Some(&ty))?;
            Ok(Outcome { pass, report, summary, csv })
        }
        SolverConfig::Monotone { tol, g_mean, g_amplitude, periods } => {
            let (gm, ga) = (*g_mean, *g_amplitude);
            if !(gm - ga.abs() > 0.0) {
                return Err(Error::Precondition(format!("g must be positive: need g_mean > |g_amplitude|, got {gm}, {ga}")));
            }
            let grid = PeriodicGrid::new(periods[0], periods[1], n, n)?;
            let (pu, pv) = (periods[0], periods[1]);
            let g = Arc::new(move |u: f64, v: f64| gm + ga * (TAU * u / pu).cos() * (TAU * v / pv).cos());
            let gs = grid.sample_fn(|u, v| g(u, v));
            let (gmin, gmax) = gs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            let (lo, hi) = (gmin.ln(), gmax.ln());
            let problem = SemilinearProblem::exp_minus("cos·cos", g);
            let sol = monotone_solve_values(&problem, vec![lo; grid.len()], vec![hi; grid.len()], &grid, *tol)?;
            let sandwich = sol.f.iter().map(|&u| (lo - u).max(u - hi).max(0.0)).fold(0.0, f64::max);
            let pass = sol.residual < *tol && sandwich == 0.0;
            let summary = format!(
                "{} monotone residual={:.3e} tol={tol:.1e} iterations={}\n{} sandwich log(min g) ≤ u ≤ log(max g) defect={sandwich:.3e}\n",
                pass_word(sol.residual < *tol),
                sol.residual,
                sol.iterations,
                pass_word(sandwich == 0.0),
            );
            let report = json!({
                "command": "solve-torus",
                "solver": cfg.solver,
                "grid": grid,
                "iterations": sol.iterations,
                "residual": sol.residual,
                "bounds": [lo, hi],
                "sandwich_defect": sandwich,
                "pass": pass,
            });
            let metric = ConformalMetric::torus_grid(grid.chart()?, sol.f, "monotone solution")?;
            let csv = maybe_csv(cfg, &metric, cfg.ty.as_ref())?;
            Ok(Outcome { pass, report, summary, csv })
        }
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn identity_line(s: &mut String, name: &str, v: Option<f64>, tol: f64) {
    if let Some(d) = v {
        let _ = writeln!(s, "{} {name} defect={d:.3e} tol={tol:.1e}", pass_word(d.abs() <= tol));
    }
}

/// Text table of defects against tolerances, one line per check.
pub fn report_render(report: &VerificationReport) -> String {
    let mut s = String::new();
    let tol = &report.tolerances;
    if report.verdict.status == "trivial type" {
        let _ = writeln!(s, "{} {TRIVIAL_TEXT}", pass_word(report.verdict.pass));
    } else {
        let r = report.residual_sup;
        let _ = writeln!(s, "{} ricci_residual sup={r:.3e} tol={:.1e}", pass_word(r <= tol.residual), tol.residual);
        let orders: Vec<String> = report
            .zeros
            .iter()
            .map(|z| match z.z {
                Some((x, y)) => format!("{}@({x:.4},{y:.4})", z.order),
                None => format!("{}@∞", z.order),
            })
            .collect();
        let _ = writeln!(s, "INFO zeros N={} [{}]", report.n, orders.join(", "));
        identity_line(&mut s, "zero_count_identity", report.identity_51, tol.identity);
        identity_line(&mut s, "stokes_identity", report.identity_52, tol.identity);
    }
    for r in &report.verdict.reasons {
        if r != TRIVIAL_TEXT {
            let _ = writeln!(s, "FAIL {r}");
        }
    }
    let _ = writeln!(s, "{} verdict {} ({})", pass_word(report.verdict.pass), report.verdict.status, report.verdict.curvature);
    s
}

/// CSV with columns chart, x, y and the requested fields in the order f, K, residual.
pub fn emit_plot_data(metric: &ConformalMetric, ty: Option<&RicciType>, fields: &[String]) -> Result<String> {
    let mut available = vec!["f", "K"];
    if ty.is_some() {
        available.push("residual");
    }
    if let Some(bad) = fields.iter().find(|f| !available.contains(&f.as_str())) {
        return Err(Error::UnknownField { requested: bad.clone(), available: available.join(", ") });
    }
    let want = |name: &str| fields.iter().any(|f| f == name);
    let cols: Vec<&str> = FIELD_NAMES.iter().copied().filter(|n| want(n)).collect();
    let k = if want("K") { Some(curvature(metric)?.samples()) } else { None };
    let res = match ty {
        Some(t) if want("residual") => Some(crate::verify::curvature_equation_residual(metric, t)?.samples()),
        _ => None,
    };
    let f = metric.factor.samples();
    let mut s = String::from("chart,x,y");
    for c in &cols {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for (p, chart) in metric.charts().iter().enumerate() {
        for (i, (x, y)) in chart.points().into_iter().enumerate() {
            let _ = write!(s, "{},{x},{y}", chart.kind);
            for c in &cols {
                let v = match *c {
                    "f" => f[p][i],
                    "K" => k.as_ref().map_or(f64::NAN, |k| k[p][i]),
                    _ => res.as_ref().map_or(f64::NAN, |r| r[p][i]),
                };
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
    }
    Ok(s)
}

/// Writes report.json (and fields.csv when requested) into `dir`.
pub fn write_artifacts(outcome: &Outcome, dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut text = serde_json::to_string_pretty(&outcome.report)?;
    text.push('\n');
    std::fs::write(dir.join("report.json"), text).context("writing report.json")?;
    if let Some(csv) = &outcome.csv {
        std::fs::write(dir.join("fields.csv"), csv).context("writing fields.csv")?;
    }
    Ok(())
}

/// Full run: execute and write artifacts to the configured directory.
pub fn run(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let outcome = execute(cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write_artifacts(&outcome, &dir)?;
    Ok(outcome)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args(args: Args) -> i32 {
    let cfg = match std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))
        .and_then(|t| RunConfig::from_json(&t))
    {
        Ok(c) => c.with_args(&args),
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    match run(&cfg) {
        Ok(o) => {
            print!("{}", o.summary);
            o.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

#[cfg(test)]
mod tests;
