//! Executes a [`RunConfig`] and writes its artifacts.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::config::{
    BoundaryConfig, CheckKind, Command, DomainConfig, FunctionConfig, KappaConfig, ModelKind, RunConfig,
    StepControlKind,
};
use crate::diagnostics::{
    boundary_slope_check, estimate_boundary_slope, merge_reports, ordering_check, stability_check,
    superharmonicity_check, uniqueness_criterion_check, CheckReport, CheckStatus, SlopeCheckConfig,
    SlopeLevel, SuperharmonicityConfig,
};
use crate::error::Error;
use crate::geometry::{
    surface_jet, write_snapshot, AmbientFunction, AmbientModel, DomainGrid, EquidistantCap, GraphSurface,
    HyperbolicDistance, Prescription, SphericalCap, StabilityConfig,
};
use crate::numfmt::g17;
use crate::solver::{
    continuation_solve_observed, newton_solve, radial_solve_with, ContinuationConfig, ContinuationEvent,
    ContinuationOutcome, ContinuationResult, FailureKind, NewtonConfig, RadialOptions, RadialProfile,
    StepControl,
};
use crate::spectral::{geometric_schedule, mu_infinity_closed_form, mu_infinity_estimate, MuInfinityConfig};
use crate::symmfunc::{check_axioms, f_infinity, AxiomConfig, CurvatureFunction, LimitOptions, LimitValue};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ADMISSIBILITY: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;
pub const EXIT_CHECK_FAILURE: i32 = 5;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const REPORT_FILE: &str = "report.csv";
pub const SNAPSHOT_FILE: &str = "snapshot.csv";
pub const PROFILE_FILE: &str = "profile.csv";
pub const CONTINUATION_FILE: &str = "continuation.csv";
pub const EVAL_FILE: &str = "eval.csv";
pub const MU_INF_FILE: &str = "mu_inf.csv";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// Rows of `report.csv`, sorted by check name.
    pub reports: Vec<CheckReport>,
    /// Files written, relative to the output directory.
    pub files: Vec<String>,
    /// Reason for a non-check failure.
    pub message: Option<String>,
}

/// Non-check failure, mapped to an exit code.
#[derive(Debug, Clone)]
enum Abort {
    Config(String),
    Admissibility(String),
    Convergence(String),
    Io(String),
}

impl Abort {
    fn code(&self) -> i32 {
        match self {
            Abort::Config(_) => EXIT_CONFIG,
            Abort::Admissibility(_) => EXIT_ADMISSIBILITY,
            Abort::Convergence(_) => EXIT_CONVERGENCE,
            Abort::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Abort::Config(m) | Abort::Admissibility(m) | Abort::Convergence(m) | Abort::Io(m) => m,
        }
    }
}

impl From<Error> for Abort {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Argument(_) | Error::Precondition(_) => Abort::Config(m),
            Error::Domain { .. } | Error::Admissibility { .. } => Abort::Admissibility(m),
            Error::NonExistence(_) | Error::Singular(_) => Abort::Convergence(m),
            Error::Io(_) => Abort::Io(m),
            Error::Inconsistency(_) | Error::Evaluation { .. } => Abort::Convergence(m),
        }
    }
}

impl From<std::io::Error> for Abort {
    fn from(e: std::io::Error) -> Self {
        Abort::Io(e.to_string())
    }
}

type Step<T> = std::result::Result<T, Abort>;

struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> Step<()>) -> Step<()> {
        let file = fs::File::create(self.dir.join(name))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush()?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }
}

/// Runs `cfg`, writing `manifest.toml`, `report.csv` and command-specific
/// CSV files into `opts.out_dir`.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> RunOutcome {
    let mut out = Output {
        dir: opts.out_dir.clone(),
        files: Vec::new(),
    };
    let mut reports = Vec::new();
    let started = fs::create_dir_all(&out.dir)
        .map_err(Abort::from)
        .and_then(|_| {
            let manifest = cfg.to_manifest();
            out.write(MANIFEST_FILE, |w| Ok(w.write_all(manifest.as_bytes())?))
        });
    let result = started.and_then(|_| dispatch(cfg, &mut out, &mut reports, opts.quiet));
    let reports = merge_reports(reports);
    let written = out.write(REPORT_FILE, |w| {
        writeln!(w, "{}", CheckReport::csv_header())?;
        for r in &reports {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    });
    let (exit_code, message) = match result.and(written) {
        Err(a) => (a.code(), Some(a.message().to_string())),
        Ok(()) if reports.iter().any(|r| r.status == CheckStatus::Fail) => (EXIT_CHECK_FAILURE, None),
        Ok(()) => (EXIT_OK, None),
    };
    if !opts.quiet {
        for r in &reports {
            println!("{:<22} {:<15} margin {}", r.name, r.status.label(), g17(r.worst_margin));
        }
        if let Some(m) = &message {
            eprintln!("error: {m}");
        }
    }
    RunOutcome {
        exit_code,
        reports,
        files: out.files,
        message,
    }
}

fn dispatch(cfg: &RunConfig, out: &mut Output, reports: &mut Vec<CheckReport>, quiet: bool) -> Step<()> {
    let f = build_function(&cfg.function)?;
    match cfg.command {
        Command::CheckAxioms => run_axioms(cfg, &f, reports),
        Command::MuInf => run_mu_inf(cfg, &f, out, reports),
        Command::Eval => run_eval(cfg, &f, out),
        Command::Solve | Command::Verify | Command::Continue => {
            let problem = Problem::new(cfg, f)?;
            run_surface(cfg, &problem, out, reports, quiet)
        }
    }
}

pub(crate) fn build_function(cfg: &FunctionConfig) -> Result<CurvatureFunction, Error> {
    match cfg {
        FunctionConfig::Gauss { n } => CurvatureFunction::gauss(*n),
        FunctionConfig::Quotient { n, k } => CurvatureFunction::quotient(*n, *k),
        FunctionConfig::Custom { name, n } => {
            let m = *n as f64;
            match name.as_str() {
                "arithmetic_mean" => {
                    CurvatureFunction::custom(name.clone(), *n, move |x: &[f64]| x.iter().sum::<f64>() / m)
                }
                "harmonic_mean" => CurvatureFunction::custom(name.clone(), *n, move |x: &[f64]| {
                    m / x.iter().map(|v| 1.0 / v).sum::<f64>()
                }),
                "power_mean_half" => CurvatureFunction::custom(name.clone(), *n, move |x: &[f64]| {
                    (x.iter().map(|v| v.sqrt()).sum::<f64>() / m).powi(2)
                }),
                other => Err(Error::Argument(format!("unknown custom function {other:?}"))),
            }
        }
    }
}

fn row(name: &str, status: CheckStatus, margin: f64, tolerances: Vec<(&str, f64)>, detail: String) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        status,
        worst_margin: margin,
        location: None,
        tolerances: tolerances.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        detail,
    }
}

fn pass_if(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn run_axioms(cfg: &RunConfig, f: &CurvatureFunction, reports: &mut Vec<CheckReport>) -> Step<()> {
    let a = &cfg.axioms;
    let ac = AxiomConfig {
        sample_count: a.samples,
        tol: a.tol,
        seed: cfg.seed,
        range: (a.range_min, a.range_max),
        homogeneity_tol: a.homogeneity_tol,
        concavity_tol: a.concavity_tol,
        gradient_step: a.gradient_step,
        hessian_step: a.hessian_step,
        decay_tol: a.decay_tol,
        limit: limit_options(cfg),
    };
    let rep = check_axioms(f, &ac)?;
    for c in &rep.checks {
        // violations are negative
        let margin = match c.axiom.as_str() {
            "v" | "vii" | "vii'" => c.worst_margin,
            _ => c.tol - c.worst_margin,
        };
        let mut detail = format!("{}; worst value {}", c.description, g17(c.worst_margin));
        if let Some(x) = &c.worst_sample {
            detail.push_str(&format!(" at [{}]", x.iter().map(|v| g17(*v)).collect::<Vec<_>>().join(" ")));
        }
        if c.axiom.starts_with("vii") {
            detail.push_str(&format!("; limit class {:?}", rep.limit_class));
            if let Some(cst) = rep.decay_constant {
                detail.push_str(&format!("; decay constant {}", g17(cst)));
            }
        }
        reports.push(row(
            &format!("axiom_{}", c.axiom),
            pass_if(c.passed),
            margin,
            vec![("tol", c.tol), ("samples", rep.samples as f64)],
            detail,
        ));
    }
    Ok(())
}

fn limit_options(cfg: &RunConfig) -> LimitOptions {
    LimitOptions {
        tol: cfg.axioms.limit_tol,
        divergence_factor: cfg.axioms.limit_divergence_factor,
        max_steps: cfg.axioms.limit_max_steps,
    }
}

fn run_mu_inf(cfg: &RunConfig, f: &CurvatureFunction, out: &mut Output, reports: &mut Vec<CheckReport>) -> Step<()> {
    let m = &cfg.mu_inf;
    let mc = MuInfinityConfig {
        samples: m.samples,
        schedule: geometric_schedule(m.max_ratio, m.steps),
        tail_fraction: m.tail_fraction,
        slope_threshold: m.slope_threshold,
        divergence_threshold: m.divergence_threshold,
        seed: cfg.seed,
    };
    let est = mu_infinity_estimate(f, &mc)?;
    out.write(MU_INF_FILE, |w| {
        writeln!(w, "ratio,min_trace")?;
        for (r, c) in est.schedule.iter().zip(&est.curve) {
            writeln!(w, "{},{}", g17(*r), g17(*c))?;
        }
        Ok(())
    })?;
    let class = if est.estimate.is_infinite() { "divergent" } else { "finite" };
    let mut detail = format!(
        "{class}; tail minimum {}; tail slope {}",
        g17(est.tail_minimum),
        g17(est.tail_slope)
    );
    let (status, margin) = match (mu_infinity_closed_form(f), est.estimate) {
        (Some(LimitValue::Infinite), LimitValue::Infinite) => (CheckStatus::Pass, est.tail_slope - m.slope_threshold),
        (Some(LimitValue::Finite(exact)), LimitValue::Finite(v)) => {
            detail.push_str(&format!("; closed form {}", g17(exact)));
            let margin = m.rel_tol * exact - (v - exact).abs();
            (pass_if(margin >= 0.0), margin)
        }
        (Some(exact), _) => {
            detail.push_str(&format!("; closed form {exact:?}"));
            (CheckStatus::Fail, f64::NEG_INFINITY)
        }
        (None, v) => (CheckStatus::Inconclusive, v.finite().unwrap_or(f64::INFINITY)),
    };
    reports.push(row(
        "mu_inf",
        status,
        margin,
        vec![("rel_tol", m.rel_tol), ("slope_threshold", m.slope_threshold)],
        detail,
    ));
    Ok(())
}

fn run_eval(cfg: &RunConfig, f: &CurvatureFunction, out: &mut Output) -> Step<()> {
    let n = f.dim();
    let lim = limit_options(cfg);
    let mut rows = Vec::new();
    for (i, x) in cfg.eval.points.iter().enumerate() {
        let v = f.eval(x)?;
        let tr: f64 = f.gradient(x)?.iter().sum();
        let finf = if n > 1 {
            match f_infinity(f, &x[..n - 1], lim)? {
                LimitValue::Finite(v) => g17(v),
                LimitValue::Infinite => "inf".to_string(),
            }
        } else {
            String::new()
        };
        let coords: Vec<String> = x.iter().map(|v| g17(*v)).collect();
        rows.push(format!("{i},{},{},{},{}", coords.join(","), g17(v), g17(tr), finf));
    }
    out.write(EVAL_FILE, |w| {
        let xs: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        writeln!(w, "point,{},f,trace_b,f_infinity", xs.join(","))?;
        for r in &rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    })?;
    // snapshot of the initial cap when the domain can carry it
    let carries = matches!(cfg.domain, DomainConfig::Radial { .. }) || n == 2;
    let hyperbolic_ok = cfg.model == ModelKind::Euclidean || !matches!(cfg.boundary, BoundaryConfig::Zero);
    if let (Some(c), true, true) = (cfg.initial.curvature, carries, hyperbolic_ok) {
        let problem = Problem::new(cfg, f.clone())?;
        let s = problem.initial_surface(c, &problem.boundary)?;
        let jet = surface_jet(&s, f)?;
        out.write(SNAPSHOT_FILE, |w| Ok(write_snapshot(&s, &jet, &mut { w })?))?;
    }
    Ok(())
}

/// Grid, model and boundary data shared by every solve of a run.
struct Problem {
    f: CurvatureFunction,
    model: AmbientModel,
    grid: Arc<DomainGrid>,
    boundary: Vec<f64>,
}

fn read_values(path: &str, expected: usize, what: &str) -> Step<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Abort::Config(format!("{what} file {path}: {e}")))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            // a header line is allowed before the first value
            Err(_) if values.is_empty() && lineno == 0 => {}
            _ => {
                return Err(Abort::Config(format!(
                    "{what} file {path}, line {}: expected a finite number, got {t:?}",
                    lineno + 1
                )))
            }
        }
    }
    if values.len() != expected {
        return Err(Abort::Config(format!(
            "{what} file {path} has {} values, the grid needs {expected}",
            values.len()
        )));
    }
    Ok(values)
}

impl Problem {
    fn new(cfg: &RunConfig, f: CurvatureFunction) -> Step<Self> {
        let grid = Arc::new(match cfg.domain {
            DomainConfig::Disk { radius, nodes } => DomainGrid::disk(radius, nodes)?,
            DomainConfig::Rectangle { x0, x1, y0, y1, nx, ny } => DomainGrid::rectangle(x0, x1, y0, y1, nx, ny)?,
            DomainConfig::Radial { radius, nodes } => DomainGrid::radial(radius, nodes, f.dim())?,
        });
        let boundary = match &cfg.boundary {
            BoundaryConfig::Zero => vec![0.0; grid.boundary_len()],
            BoundaryConfig::Constant { value } => vec![*value; grid.boundary_len()],
            BoundaryConfig::Profile { path } => read_values(path, grid.boundary_len(), "boundary profile")?,
        };
        let model = match cfg.model {
            ModelKind::Euclidean => AmbientModel::Euclidean,
            ModelKind::Hyperbolic => AmbientModel::HyperbolicHalfSpace,
        };
        if model == AmbientModel::HyperbolicHalfSpace && boundary.iter().any(|v| !(*v > 0.0)) {
            return Err(Abort::Config("hyperbolic boundary heights must be positive".into()));
        }
        Ok(Self { f, model, grid, boundary })
    }

    fn prescription(&self, k: &KappaConfig) -> Step<Prescription> {
        Ok(match k {
            KappaConfig::Constant { value } => Prescription::Constant(*value),
            KappaConfig::Linear {
                constant,
                coefficients,
                height,
            } => Prescription::Affine {
                constant: *constant,
                coefficients: coefficients.clone(),
                height: *height,
            },
            KappaConfig::Grid { path } => {
                Prescription::Grid(Arc::new(read_values(path, self.grid.interior_len(), "kappa grid")?))
            }
        })
    }

    /// Umbilic cap of curvature `c` over the interior, with `boundary` data.
    fn initial_surface(&self, c: f64, boundary: &[f64]) -> Step<GraphSurface> {
        let level = boundary.iter().sum::<f64>() / boundary.len().max(1) as f64;
        let a = self.grid.outer_radius();
        let height: Box<dyn Fn(f64) -> f64> = match self.model {
            AmbientModel::Euclidean => {
                let cap = SphericalCap::new(1.0 / c, a, level).map_err(|_| {
                    Abort::Admissibility(format!("no sphere of curvature {c} spans the domain of radius {a}"))
                })?;
                Box::new(move |r| cap.height_at(r))
            }
            AmbientModel::HyperbolicHalfSpace => {
                let cap = EquidistantCap::new(c, a, level)?;
                Box::new(move |r| cap.height_at(r))
            }
        };
        let interior = self
            .grid
            .interior_points()
            .iter()
            .map(|x| height(x.iter().map(|v| v * v).sum::<f64>().sqrt()))
            .collect();
        Ok(GraphSurface::new(self.model, self.grid.clone(), interior, boundary.to_vec())?)
    }

    /// Constant prescription and boundary height, if rotationally symmetric.
    fn radial_data(&self, cfg: &RunConfig) -> Option<(f64, f64)> {
        let disk_like = matches!(cfg.domain, DomainConfig::Disk { .. } | DomainConfig::Radial { .. });
        let k = match cfg.target_kappa()? {
            KappaConfig::Constant { value } => *value,
            _ => return None,
        };
        let level = match cfg.boundary {
            BoundaryConfig::Zero => 0.0,
            BoundaryConfig::Constant { value } => value,
            BoundaryConfig::Profile { .. } => return None,
        };
        disk_like.then_some((k, level))
    }
}

fn newton_config(cfg: &RunConfig) -> NewtonConfig {
    NewtonConfig {
        tol: cfg.newton.tol,
        max_iters: cfg.newton.max_iters,
        admissibility_margin: cfg.newton.admissibility_margin,
        armijo: cfg.newton.armijo,
        max_backtracks: cfg.newton.max_backtracks,
    }
}

fn continuation_config(cfg: &RunConfig) -> ContinuationConfig {
    let c = &cfg.continuation;
    ContinuationConfig {
        steps: c.steps,
        newton_tol: cfg.newton.tol,
        max_newton_iters: cfg.newton.max_iters,
        admissibility_margin: cfg.newton.admissibility_margin,
        armijo: cfg.newton.armijo,
        max_backtracks: cfg.newton.max_backtracks,
        step_control: match c.step_control {
            StepControlKind::Fixed => StepControl::Fixed,
            StepControlKind::Halving => StepControl::Halving { min_step: c.min_step },
        },
    }
}

/// Newton from the cap of curvature `c`; failures become a report row.
fn newton_from_cap(
    problem: &Problem,
    cfg: &RunConfig,
    kappa: &Prescription,
    c: f64,
    boundary: &[f64],
    name: &str,
    reports: &mut Vec<CheckReport>,
) -> Step<GraphSurface> {
    let u0 = problem.initial_surface(c, boundary)?;
    let nc = newton_config(cfg);
    match newton_solve(&u0, &problem.f, kappa, &nc) {
        Ok(sol) => {
            reports.push(row(
                name,
                CheckStatus::Pass,
                nc.tol - sol.residual,
                vec![("tol", nc.tol)],
                format!(
                    "converged in {} iterations; residual {}; min principal curvature {}",
                    sol.iterations,
                    g17(sol.residual),
                    g17(sol.min_eigenvalue)
                ),
            ));
            Ok(sol.surface)
        }
        Err(fail) => {
            reports.push(row(
                name,
                CheckStatus::Fail,
                nc.tol - fail.residual,
                vec![("tol", nc.tol)],
                fail.to_string(),
            ));
            let msg = format!("{name}: {fail}");
            Err(match fail.kind {
                FailureKind::LostAdmissibility => Abort::Admissibility(msg),
                FailureKind::Stalled | FailureKind::Singular => Abort::Convergence(msg),
            })
        }
    }
}

struct Barriers {
    lower: GraphSurface,
    upper: GraphSurface,
    tol: f64,
}

fn build_barriers(problem: &Problem, cfg: &RunConfig) -> std::result::Result<Barriers, String> {
    let o = &cfg.checks.ordering;
    let (Some(lo), Some(hi)) = (o.lower, o.upper) else {
        return Err("barrier curvatures not configured".into());
    };
    let mut scratch = Vec::new();
    let mut solve = |k: f64, name: &str| {
        newton_from_cap(problem, cfg, &Prescription::Constant(k), k, &problem.boundary, name, &mut scratch)
            .map_err(|a| format!("{name} barrier K = {k}: {}", a.message()))
    };
    Ok(Barriers {
        lower: solve(lo, "lower")?,
        upper: solve(hi, "upper")?,
        tol: o.tol,
    })
}

/// Solution of the run's problem with `boundary` data, plus the
/// continuation record when the command marches in `κ`.
struct Solved {
    surface: GraphSurface,
    continuation: Option<ContinuationResult>,
    ordering_margins: Vec<Option<CheckReport>>,
}

fn solve_problem(
    problem: &Problem,
    cfg: &RunConfig,
    boundary: &[f64],
    barriers: Option<&Barriers>,
    reports: &mut Vec<CheckReport>,
) -> std::result::Result<Solved, Failed> {
    let kappa = problem.prescription(cfg.target_kappa().expect("validated"))?;
    let c = cfg.initial.curvature.expect("validated");
    if cfg.command != Command::Continue {
        let surface = newton_from_cap(problem, cfg, &kappa, c, boundary, "newton", reports)?;
        return Ok(Solved {
            surface,
            continuation: None,
            ordering_margins: Vec::new(),
        });
    }
    let kappa0 = problem.prescription(cfg.continuation.from.as_ref().expect("validated"))?;
    let u0 = newton_from_cap(problem, cfg, &kappa0, c, boundary, "newton_initial", reports)?;
    let cc = continuation_config(cfg);
    let mut ordering = Vec::new();
    let mut ordering_err = None;
    let result = continuation_solve_observed(&u0, &problem.f, &kappa0, &kappa, &cc, &mut |ev| {
        if let (ContinuationEvent::Accepted { surface, .. }, Some(b)) = (ev, barriers) {
            match ordering_check(surface, &b.lower, &b.upper, b.tol) {
                Ok(r) => ordering.push(Some(r)),
                Err(e) => {
                    ordering.push(None);
                    ordering_err.get_or_insert(e);
                }
            }
        }
    })?;
    if let Some(e) = ordering_err {
        return Err(Failed::from(e));
    }
    let out = &result.report.outcome;
    let last = result.report.steps.last();
    let residual = last.map_or(f64::NAN, |s| s.residual);
    let detail = format!(
        "{}; {} accepted steps; reached t = {}",
        out.label(),
        result.report.steps.len(),
        g17(result.t)
    );
    reports.push(row(
        "continuation",
        pass_if(out.is_converged()),
        cc.newton_tol - residual,
        vec![("tol", cc.newton_tol)],
        detail.clone(),
    ));
    let abort = match out {
        ContinuationOutcome::Converged => None,
        ContinuationOutcome::LostAdmissibility { .. } => Some(Abort::Admissibility(format!("continuation {detail}"))),
        ContinuationOutcome::Stalled { .. } | ContinuationOutcome::Singular { .. } => {
            Some(Abort::Convergence(format!("continuation {detail}")))
        }
    };
    let solved = Solved {
        surface: result.surface.clone(),
        continuation: Some(result),
        ordering_margins: ordering,
    };
    match abort {
        Some(abort) => Err(Failed {
            abort,
            partial: Some(solved),
        }),
        None => Ok(solved),
    }
}

/// Solve failure, with the last accepted state of a failed continuation.
struct Failed {
    abort: Abort,
    partial: Option<Solved>,
}

impl<E: Into<Abort>> From<E> for Failed {
    fn from(e: E) -> Self {
        Failed {
            abort: e.into(),
            partial: None,
        }
    }
}

fn write_surface(out: &mut Output, surface: &GraphSurface, f: &CurvatureFunction) -> Step<()> {
    let jet = surface_jet(surface, f)?;
    out.write(SNAPSHOT_FILE, |w| Ok(write_snapshot(surface, &jet, &mut { w })?))
}

fn write_continuation(out: &mut Output, solved: &Solved) -> Step<()> {
    let Some(res) = &solved.continuation else {
        return Ok(());
    };
    out.write(CONTINUATION_FILE, |w| {
        writeln!(w, "step,t,iterations,residual,min_eigenvalue,min_height,ordering_margin")?;
        for (i, s) in res.report.steps.iter().enumerate() {
            let ord = solved
                .ordering_margins
                .get(i)
                .and_then(|r| r.as_ref())
                .map(|r| g17(r.worst_margin))
                .unwrap_or_default();
            writeln!(
                w,
                "{i},{},{},{},{},{},{ord}",
                g17(s.t),
                s.iterations,
                g17(s.residual),
                g17(s.min_eigenvalue),
                s.min_height.map(g17).unwrap_or_default()
            )?;
        }
        Ok(())
    })
}

fn run_surface(
    cfg: &RunConfig,
    problem: &Problem,
    out: &mut Output,
    reports: &mut Vec<CheckReport>,
    quiet: bool,
) -> Step<()> {
    let requested = cfg.requested_checks();
    let barriers = if requested.contains(&CheckKind::Ordering) {
        match build_barriers(problem, cfg) {
            Ok(b) => Some(b),
            Err(msg) => {
                reports.push(row("ordering", CheckStatus::Inconclusive, f64::NAN, vec![], msg));
                None
            }
        }
    } else {
        None
    };
    let solved = match solve_problem(problem, cfg, &problem.boundary, barriers.as_ref(), reports) {
        Ok(s) => s,
        Err(Failed { abort, partial }) => {
            if let Some(partial) = partial {
                write_continuation(out, &partial)?;
                write_surface(out, &partial.surface, &problem.f)?;
            }
            return Err(abort);
        }
    };
    write_surface(out, &solved.surface, &problem.f)?;
    write_continuation(out, &solved)?;
    if !quiet {
        eprintln!("solved on {} interior nodes", problem.grid.interior_len());
    }

    let surface = &solved.surface;
    let f = &problem.f;
    let kappa = problem.prescription(cfg.target_kappa().expect("validated"))?;
    let hyperbolic = problem.model == AmbientModel::HyperbolicHalfSpace;

    let radial = problem.radial_data(cfg);
    if matches!(cfg.domain, DomainConfig::Radial { .. }) || requested.contains(&CheckKind::RadialOracle) {
        let report = radial_oracle(problem, cfg, surface, radial, out)?;
        if requested.contains(&CheckKind::RadialOracle) {
            reports.push(report);
        }
    }
    for check in requested {
        let report = match check {
            CheckKind::RadialOracle => continue,
            CheckKind::Ordering => match &barriers {
                Some(b) if cfg.command == Command::Continue => aggregate_ordering(&solved.ordering_margins),
                Some(b) => ordering_check(surface, &b.lower, &b.upper, b.tol)?,
                None => continue,
            },
            CheckKind::Uniqueness => uniqueness_criterion_check(surface, f)?,
            CheckKind::Stability => {
                let s = &cfg.checks.stability;
                let sc = StabilityConfig {
                    probe_stride: s.probe_stride,
                    bump_radius: s.bump_radius,
                    positivity_tol: s.positivity_tol,
                    eigen_iterations: s.eigen_iterations,
                    eigen_tol: s.eigen_tol,
                    max_condition: s.max_condition,
                };
                stability_check(surface, f, &kappa, &sc)?
            }
            CheckKind::Superharmonicity if hyperbolic => superharmonic(cfg, surface, f, &kappa)?,
            CheckKind::BoundarySlope if hyperbolic => match radial_k(cfg) {
                Some(k) => {
                    let (slope, regularity) = slope_study(cfg, problem, k, reports)?;
                    reports.push(regularity);
                    slope
                }
                None => row(
                    "boundary_slope",
                    CheckStatus::NotApplicable,
                    f64::NAN,
                    vec![],
                    "needs a constant prescription in (0, 1)".into(),
                ),
            },
            CheckKind::Superharmonicity | CheckKind::BoundarySlope => row(
                if *check == CheckKind::BoundarySlope { "boundary_slope" } else { "superharmonicity" },
                CheckStatus::NotApplicable,
                f64::NAN,
                vec![],
                "defined for the hyperbolic model only".into(),
            ),
        };
        reports.push(report);
    }
    Ok(())
}

fn radial_k(cfg: &RunConfig) -> Option<f64> {
    match cfg.target_kappa()? {
        KappaConfig::Constant { value } if *value > 0.0 && *value < 1.0 => Some(*value),
        _ => None,
    }
}

fn aggregate_ordering(steps: &[Option<CheckReport>]) -> CheckReport {
    let checked: Vec<&CheckReport> = steps.iter().flatten().collect();
    let failed = checked.iter().filter(|r| r.status == CheckStatus::Fail).count();
    let worst = checked
        .iter()
        .min_by(|a, b| a.worst_margin.total_cmp(&b.worst_margin))
        .copied();
    match worst {
        None => row("ordering", CheckStatus::Inconclusive, f64::NAN, vec![], "no accepted steps".into()),
        Some(w) => CheckReport {
            name: "ordering".into(),
            status: pass_if(failed == 0),
            worst_margin: w.worst_margin,
            location: w.location,
            tolerances: w.tolerances.clone(),
            detail: format!(
                "checked at {} accepted steps, {failed} violated; worst step: {}",
                checked.len(),
                w.detail
            ),
        },
    }
}

fn superharmonic(cfg: &RunConfig, surface: &GraphSurface, f: &CurvatureFunction, kappa: &Prescription) -> Step<CheckReport> {
    let s = &cfg.checks.superharmonicity;
    let phi = HyperbolicDistance {
        center: s.center.clone(),
    };
    let sc = SuperharmonicityConfig {
        slack_constant: s.slack_constant,
        pass_fraction: s.pass_fraction,
        gradient_tol: s.gradient_tol,
    };
    let mut rep = superharmonicity_check(surface, f, kappa, &phi, &sc)?;
    let grid = surface.grid();
    let distance = grid
        .interior_points()
        .iter()
        .zip(surface.heights())
        .map(|(x, u)| {
            let mut z = x.clone();
            z.push(*u);
            phi.value(&z)
        })
        .fold(f64::INFINITY, f64::min);
    rep.detail.push_str(&format!("; distance to surface {}", g17(distance)));
    Ok(rep)
}

/// Re-solves at each boundary height, then extrapolates the boundary slope.
fn slope_study(
    cfg: &RunConfig,
    problem: &Problem,
    k: f64,
    reports: &mut Vec<CheckReport>,
) -> Step<(CheckReport, CheckReport)> {
    let s = &cfg.checks.boundary_slope;
    let mut levels = Vec::new();
    let mut regularity = Vec::new();
    for &eps in &s.eps_levels {
        let boundary = vec![eps; problem.grid.boundary_len()];
        let mut scratch = Vec::new();
        let solved = match solve_problem(problem, cfg, &boundary, None, &mut scratch) {
            Ok(v) => v,
            Err(Failed { abort: a, .. }) => {
                reports.extend(scratch.into_iter().filter(|r| !r.passed()).map(|mut r| {
                    r.name = format!("boundary_slope_{}", r.name);
                    r
                }));
                return Err(a);
            }
        };
        let b = estimate_boundary_slope(&solved.surface, s.min_alignment)?;
        levels.push(SlopeLevel { eps, slope_sq: b.mean });
        regularity.push(max_scaled_hessian(&solved.surface));
    }
    let report = boundary_slope_check(&levels, k, &SlopeCheckConfig { rel_tol: s.rel_tol })?;
    let first = regularity[0];
    let last = *regularity.last().expect("at least two levels");
    // bounded trend only: the constants are not known
    let status = if last <= 2.0 * first {
        CheckStatus::Pass
    } else {
        CheckStatus::Inconclusive
    };
    let values: Vec<String> = s
        .eps_levels
        .iter()
        .zip(&regularity)
        .map(|(e, v)| format!("{}:{}", g17(*e), g17(*v)))
        .collect();
    let reg = row(
        "interior_regularity",
        status,
        2.0 * first - last,
        vec![("growth_factor", 2.0)],
        format!("max u*|D2u| per level [{}]", values.join(" ")),
    );
    Ok((report, reg))
}

fn max_scaled_hessian(surface: &GraphSurface) -> f64 {
    (0..surface.grid().interior_len())
        .map(|i| {
            let (u, _, s) = surface.node_jet(i);
            u * s.norm()
        })
        .fold(0.0, f64::max)
}

/// Writes the radial profile and compares the grid solution with it.
fn radial_oracle(
    problem: &Problem,
    cfg: &RunConfig,
    surface: &GraphSurface,
    data: Option<(f64, f64)>,
    out: &mut Output,
) -> Step<CheckReport> {
    let tol = cfg.checks.radial.tol;
    let Some((k, level)) = data else {
        return Ok(row(
            "radial_oracle",
            CheckStatus::NotApplicable,
            f64::NAN,
            vec![("tol", tol)],
            "needs a disk or radial domain, constant prescription and constant boundary".into(),
        ));
    };
    let a = problem.grid.outer_radius();
    let m = cfg.checks.radial.nodes;
    let profile = radial_solve_with(problem.model, &problem.f, k, a, level, m, &RadialOptions::default())?;
    out.write(PROFILE_FILE, |w| Ok(profile.write_csv(&mut { w })?))?;
    let mut worst = (0.0f64, 0usize);
    for (i, (x, u)) in problem.grid.interior_points().iter().zip(surface.heights()).enumerate() {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let e = (u - hermite(&profile, r)).abs();
        if e > worst.0 {
            worst = (e, i);
        }
    }
    let mut rep = row(
        "radial_oracle",
        pass_if(worst.0 <= tol),
        tol - worst.0,
        vec![("tol", tol)],
        format!(
            "max |u - radial profile| {} over {} nodes; apex {}",
            g17(worst.0),
            problem.grid.interior_len(),
            g17(profile.apex_height())
        ),
    );
    rep.location = Some(crate::diagnostics::Location::Node(worst.1));
    Ok(rep)
}

/// Cubic Hermite interpolation of the profile at radius `r`.
fn hermite(p: &RadialProfile, r: f64) -> f64 {
    let m = p.r.len();
    let h = p.r[1] - p.r[0];
    let j = ((r / h).floor() as usize).min(m - 2);
    let t = (r - p.r[j]) / h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * p.u[j]
        + (t3 - 2.0 * t2 + t) * h * p.du[j]
        + (-2.0 * t3 + 3.0 * t2) * p.u[j + 1]
        + (t3 - t2) * h * p.du[j + 1]
}

/// Reads, parses and runs a configuration file.
pub fn run_file(path: &Path, seed: Option<u64>, opts: &RunOptions) -> RunOutcome {
    let fail = |msg: String| {
        if !opts.quiet {
            eprintln!("error: {msg}");
        }
        RunOutcome {
            exit_code: EXIT_CONFIG,
            reports: Vec::new(),
            files: Vec::new(),
            message: Some(msg),
        }
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    let mut cfg = match super::parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    if let Some(s) = seed {
        if s > i64::MAX as u64 {
            return fail(format!("seed: {s} does not fit a TOML integer"));
        }
        cfg.seed = s;
    }
    run(&cfg, opts)
}
