//! Run configuration: TOML in, validated [`RunConfig`] out.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckAxioms,
    Eval,
    Solve,
    Continue,
    MuInf,
    Verify,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::CheckAxioms => "check-axioms",
            Command::Eval => "eval",
            Command::Solve => "solve",
            Command::Continue => "continue",
            Command::MuInf => "mu-inf",
            Command::Verify => "verify",
        }
    }

    fn needs_surface(self) -> bool {
        matches!(self, Command::Solve | Command::Continue | Command::Verify)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionConfig {
    Gauss { n: usize },
    Quotient { n: usize, k: usize },
    /// One of the named functions in [`CUSTOM_FUNCTIONS`].
    Custom { name: String, n: usize },
}

impl FunctionConfig {
    pub fn dim(&self) -> usize {
        match *self {
            FunctionConfig::Gauss { n }
            | FunctionConfig::Quotient { n, .. }
            | FunctionConfig::Custom { n, .. } => n,
        }
    }
}

/// Names accepted by `kind = "custom"`.
pub const CUSTOM_FUNCTIONS: &[&str] = &["arithmetic_mean", "harmonic_mean", "power_mean_half"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Euclidean,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainConfig {
    Disk {
        radius: f64,
        nodes: usize,
    },
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        nx: usize,
        ny: usize,
    },
    /// Rotationally symmetric; the dimension is that of the function.
    Radial {
        radius: f64,
        nodes: usize,
    },
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig::Disk {
            radius: 1.0,
            nodes: 41,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum KappaConfig {
    Constant {
        value: f64,
    },
    /// `constant + coefficients·x + height·u`.
    Linear {
        constant: f64,
        coefficients: Vec<f64>,
        #[serde(default)]
        height: f64,
    },
    /// One value per interior node, one per line.
    Grid {
        path: String,
    },
}

impl KappaConfig {
    /// Representative value used to pick initial caps.
    fn reference(&self) -> Option<f64> {
        match self {
            KappaConfig::Constant { value } => Some(*value),
            KappaConfig::Linear { constant, .. } => Some(*constant),
            KappaConfig::Grid { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundaryConfig {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    /// One value per boundary point in grid order, one per line.
    Profile {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Curvature of the umbilic cap used as initial guess.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonSection {
    pub tol: f64,
    pub max_iters: usize,
    pub admissibility_margin: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonSection {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 30,
            admissibility_margin: 0.0,
            armijo: 1e-4,
            max_backtracks: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepControlKind {
    Fixed,
    Halving,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationSection {
    /// Starting prescription `κ_0`; required by `continue`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<KappaConfig>,
    pub steps: usize,
    pub step_control: StepControlKind,
    pub min_step: f64,
}

impl Default for ContinuationSection {
    fn default() -> Self {
        Self {
            from: None,
            steps: 8,
            step_control: StepControlKind::Halving,
            min_step: 1.0 / 1024.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    BoundarySlope,
    Superharmonicity,
    Uniqueness,
    Stability,
    Ordering,
    RadialOracle,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::BoundarySlope,
        CheckKind::Superharmonicity,
        CheckKind::Uniqueness,
        CheckKind::Stability,
        CheckKind::Ordering,
        CheckKind::RadialOracle,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlopeSection {
    /// Boundary heights re-solved for the extrapolation.
    pub eps_levels: Vec<f64>,
    pub rel_tol: f64,
    pub min_alignment: f64,
}

impl Default for SlopeSection {
    fn default() -> Self {
        Self {
            eps_levels: vec![0.08, 0.04, 0.02],
            rel_tol: 0.02,
            min_alignment: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuperharmonicSection {
    /// Centre of the distance function; filled in from the domain if empty.
    pub center: Vec<f64>,
    pub slack_constant: f64,
    pub pass_fraction: f64,
    pub gradient_tol: f64,
}

impl Default for SuperharmonicSection {
    fn default() -> Self {
        Self {
            center: Vec::new(),
            slack_constant: 0.1,
            pass_fraction: 0.99,
            gradient_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilitySection {
    pub probe_stride: usize,
    pub bump_radius: f64,
    pub positivity_tol: f64,
    pub eigen_iterations: usize,
    pub eigen_tol: f64,
    pub max_condition: f64,
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self {
            probe_stride: 1,
            bump_radius: 3.0,
            positivity_tol: 1e-8,
            eigen_iterations: 500,
            eigen_tol: 1e-10,
            max_condition: 1e14,
        }
    }
}

/// Barrier surfaces are discrete solutions of `K = lower` and `K = upper`
/// with the run's boundary data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrderingSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub tol: f64,
}

impl Default for OrderingSection {
    fn default() -> Self {
        Self {
            lower: None,
            upper: None,
            tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadialSection {
    pub nodes: usize,
    pub tol: f64,
}

impl Default for RadialSection {
    fn default() -> Self {
        Self {
            nodes: 2001,
            tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSection {
    /// Filled in per command when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub requested: Option<Vec<CheckKind>>,
    pub boundary_slope: SlopeSection,
    pub superharmonicity: SuperharmonicSection,
    pub stability: StabilitySection,
    pub ordering: OrderingSection,
    pub radial: RadialSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AxiomSection {
    pub samples: usize,
    pub tol: f64,
    pub range_min: f64,
    pub range_max: f64,
    pub homogeneity_tol: f64,
    pub concavity_tol: f64,
    pub gradient_step: f64,
    pub hessian_step: f64,
    pub decay_tol: f64,
    pub limit_tol: f64,
    pub limit_divergence_factor: f64,
    pub limit_max_steps: usize,
}

impl Default for AxiomSection {
    fn default() -> Self {
        let a = crate::symmfunc::AxiomConfig::default();
        Self {
            samples: a.sample_count,
            tol: a.tol,
            range_min: a.range.0,
            range_max: a.range.1,
            homogeneity_tol: a.homogeneity_tol,
            concavity_tol: a.concavity_tol,
            gradient_step: a.gradient_step,
            hessian_step: a.hessian_step,
            decay_tol: a.decay_tol,
            limit_tol: a.limit.tol,
            limit_divergence_factor: a.limit.divergence_factor,
            limit_max_steps: a.limit.max_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuInfSection {
    pub samples: usize,
    pub max_ratio: f64,
    pub steps: usize,
    pub tail_fraction: f64,
    pub slope_threshold: f64,
    pub divergence_threshold: f64,
    /// Relative agreement required against the closed form.
    pub rel_tol: f64,
}

impl Default for MuInfSection {
    fn default() -> Self {
        let m = crate::spectral::MuInfinityConfig::default();
        Self {
            samples: m.samples,
            max_ratio: *m.schedule.last().expect("default schedule"),
            steps: m.schedule.len() - 1,
            tail_fraction: m.tail_fraction,
            slope_threshold: m.slope_threshold,
            divergence_threshold: m.divergence_threshold,
            rel_tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    /// Eigenvalue vectors; defaults to the all-ones vector.
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    pub function: FunctionConfig,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<KappaConfig>,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub newton: NewtonSection,
    #[serde(default)]
    pub continuation: ContinuationSection,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub axioms: AxiomSection,
    #[serde(default)]
    pub mu_inf: MuInfSection,
    #[serde(default)]
    pub eval: EvalSection,
}

/// Everything wrong with a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub errors: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    /// Full effective configuration as TOML; parses back to `self`.
    pub fn to_manifest(&self) -> String {
        toml::to_string(self).expect("run configs serialize")
    }

    /// Requested checks after per-command defaults.
    pub fn requested_checks(&self) -> &[CheckKind] {
        self.checks.requested.as_deref().unwrap_or(&[])
    }

    /// Prescription the surface is solved for.
    pub fn target_kappa(&self) -> Option<&KappaConfig> {
        self.kappa.as_ref()
    }
}

/// Parses and validates; reports every semantic problem at once.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError {
        errors: vec![format!("syntax: {}", e.to_string().trim_end())],
    })?;
    fill_defaults(&mut cfg);
    let errors = validate(&cfg);
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { errors })
    }
}

fn fill_defaults(cfg: &mut RunConfig) {
    if cfg.checks.requested.is_none() {
        cfg.checks.requested = Some(match cfg.command {
            Command::Verify => {
                let mut v = vec![CheckKind::Uniqueness, CheckKind::Stability];
                if cfg.model == ModelKind::Hyperbolic {
                    v.insert(0, CheckKind::BoundarySlope);
                    v.push(CheckKind::Superharmonicity);
                }
                v
            }
            _ => Vec::new(),
        });
    }
    if let Some(req) = cfg.checks.requested.as_mut() {
        req.sort();
        req.dedup();
    }
    if cfg.initial.curvature.is_none() && cfg.command != Command::CheckAxioms && cfg.command != Command::MuInf {
        let source = if cfg.command == Command::Continue {
            cfg.continuation.from.as_ref()
        } else {
            cfg.kappa.as_ref()
        };
        cfg.initial.curvature = source.and_then(KappaConfig::reference);
    }
    let wants_superharmonic = cfg.requested_checks().contains(&CheckKind::Superharmonicity);
    if wants_superharmonic && cfg.checks.superharmonicity.center.is_empty() {
        let (radius, dim) = match &cfg.domain {
            DomainConfig::Disk { radius, .. } => (*radius, 2),
            DomainConfig::Rectangle { x0, x1, y0, y1, .. } => {
                (x0.abs().max(x1.abs()).hypot(y0.abs().max(y1.abs())), 2)
            }
            DomainConfig::Radial { radius, .. } => (*radius, cfg.function.dim()),
        };
        // far above the surface: hyperbolic distance at least ln 30
        let mut c = vec![0.0; dim.max(1) + 1];
        *c.last_mut().expect("non-empty") = 30.0 * radius.max(1.0);
        cfg.checks.superharmonicity.center = c;
    }
    if cfg.command == Command::Eval && cfg.eval.points.is_empty() {
        cfg.eval.points = vec![vec![1.0; cfg.function.dim()]];
    }
}

fn validate(cfg: &RunConfig) -> Vec<String> {
    let mut errs = Vec::new();
    let mut err = |path: &str, msg: String| errs.push(format!("{path}: {msg}"));
    let n = cfg.function.dim();
    match &cfg.function {
        FunctionConfig::Gauss { n } | FunctionConfig::Custom { n, .. } if *n == 0 => {
            err("function.n", "must be at least 1".into())
        }
        FunctionConfig::Quotient { n, k } if !(1 <= *k && k < n) => {
            err("function.k", format!("quotient needs 1 <= k < n, got n = {n}, k = {k}"))
        }
        FunctionConfig::Custom { name, .. } if !CUSTOM_FUNCTIONS.contains(&name.as_str()) => err(
            "function.name",
            format!("unknown custom function {name:?}; known: {}", CUSTOM_FUNCTIONS.join(", ")),
        ),
        _ => {}
    }
    if cfg.seed > i64::MAX as u64 {
        err("seed", format!("{} does not fit a TOML integer", cfg.seed));
    }

    let surface = cfg.command.needs_surface();
    match &cfg.domain {
        DomainConfig::Disk { radius, nodes } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                err("domain.radius", format!("must be positive, got {radius}"));
            }
            if *nodes < 5 {
                err("domain.nodes", format!("must be at least 5, got {nodes}"));
            }
            if surface && n != 2 {
                err("domain.shape", format!("disk domains carry 2-dimensional graphs, function has n = {n}"));
            }
        }
        DomainConfig::Rectangle { x0, x1, y0, y1, nx, ny } => {
            if !(x1 > x0 && y1 > y0) {
                err("domain", "rectangle needs x0 < x1 and y0 < y1".into());
            }
            if *nx < 3 || *ny < 3 {
                err("domain.nx", "rectangle needs at least 3 nodes per side".into());
            }
            if surface && n != 2 {
                err("domain.shape", format!("rectangle domains carry 2-dimensional graphs, function has n = {n}"));
            }
        }
        DomainConfig::Radial { radius, nodes } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                err("domain.radius", format!("must be positive, got {radius}"));
            }
            if *nodes < 3 {
                err("domain.nodes", format!("must be at least 3, got {nodes}"));
            }
        }
    }

    let kappa_ok = |path: &str, k: &KappaConfig, err: &mut dyn FnMut(&str, String)| match k {
        KappaConfig::Constant { value } if !(*value > 0.0 && value.is_finite()) => {
            err(&format!("{path}.value"), format!("curvature prescriptions must be positive, got {value}"))
        }
        KappaConfig::Linear { constant, coefficients, height } => {
            if !(*constant > 0.0) {
                err(&format!("{path}.constant"), format!("must be positive, got {constant}"));
            }
            if coefficients.len() != n {
                err(
                    &format!("{path}.coefficients"),
                    format!("expected {n} coefficients, got {}", coefficients.len()),
                );
            }
            if coefficients.iter().chain(std::iter::once(height)).any(|v| !v.is_finite()) {
                err(path, "coefficients must be finite".into());
            }
        }
        KappaConfig::Grid { path: p } if p.is_empty() => err(&format!("{path}.path"), "is empty".into()),
        _ => {}
    };
    let hyperbolic = cfg.model == ModelKind::Hyperbolic;
    if surface {
        match &cfg.kappa {
            Some(k) => kappa_ok("kappa", k, &mut err),
            None => err("kappa", format!("required by {}", cfg.command.label())),
        }
        match &cfg.boundary {
            BoundaryConfig::Zero if hyperbolic => {
                err("boundary", "hyperbolic graphs need positive boundary heights".into())
            }
            BoundaryConfig::Constant { value } if !value.is_finite() || (hyperbolic && !(*value > 0.0)) => {
                err("boundary.value", format!("invalid boundary height {value}"))
            }
            BoundaryConfig::Profile { path } if path.is_empty() => err("boundary.path", "is empty".into()),
            _ => {}
        }
        match cfg.initial.curvature {
            None => err("initial.curvature", "needed when the prescription has no reference value".into()),
            Some(c) if !(c > 0.0) || (hyperbolic && c >= 1.0) => err(
                "initial.curvature",
                format!(
                    "initial cap curvature {c} must lie in {}",
                    if hyperbolic { "(0, 1)" } else { "(0, inf)" }
                ),
            ),
            _ => {}
        }
    }
    if cfg.command == Command::Continue {
        match &cfg.continuation.from {
            Some(k) => kappa_ok("continuation.from", k, &mut err),
            None => err("continuation.from", "required by continue".into()),
        }
    }

    let nw = &cfg.newton;
    if !(nw.tol > 0.0) {
        err("newton.tol", format!("must be positive, got {}", nw.tol));
    }
    if nw.max_iters == 0 {
        err("newton.max_iters", "must be at least 1".into());
    }
    if !(nw.admissibility_margin >= 0.0) {
        err("newton.admissibility_margin", "must be non-negative".into());
    }
    if !(nw.armijo > 0.0 && nw.armijo < 1.0) {
        err("newton.armijo", format!("must lie in (0, 1), got {}", nw.armijo));
    }
    let ct = &cfg.continuation;
    if ct.steps == 0 {
        err("continuation.steps", "must be at least 1".into());
    }
    if ct.step_control == StepControlKind::Halving && !(ct.min_step > 0.0 && ct.min_step * ct.steps.max(1) as f64 <= 1.0) {
        err("continuation.min_step", format!("must lie in (0, 1/steps], got {}", ct.min_step));
    }

    let ch = &cfg.checks;
    let req = cfg.requested_checks();
    if !req.is_empty() && !surface {
        err("checks.requested", format!("{} runs no surface checks", cfg.command.label()));
    }
    if req.contains(&CheckKind::BoundarySlope) {
        let s = &ch.boundary_slope;
        if s.eps_levels.len() < 2 {
            err("checks.boundary_slope.eps_levels", "needs at least 2 boundary heights".into());
        }
        if s.eps_levels.iter().any(|e| !(*e > 0.0)) {
            err("checks.boundary_slope.eps_levels", "heights must be positive".into());
        }
        if !(s.rel_tol > 0.0) {
            err("checks.boundary_slope.rel_tol", "must be positive".into());
        }
        if !(s.min_alignment > 0.0 && s.min_alignment <= 1.0) {
            err("checks.boundary_slope.min_alignment", "must lie in (0, 1]".into());
        }
    }
    if req.contains(&CheckKind::Superharmonicity) {
        let s = &ch.superharmonicity;
        if s.center.len() != n + 1 {
            err("checks.superharmonicity.center", format!("needs {} coordinates", n + 1));
        } else if !(s.center[n] > 0.0) {
            err("checks.superharmonicity.center", "must lie in the upper half-space".into());
        }
        if !(s.slack_constant >= 0.0) {
            err("checks.superharmonicity.slack_constant", "must be non-negative".into());
        }
        if !(s.pass_fraction > 0.0 && s.pass_fraction <= 1.0) {
            err("checks.superharmonicity.pass_fraction", "must lie in (0, 1]".into());
        }
    }
    if req.contains(&CheckKind::Stability) {
        let s = &ch.stability;
        if s.probe_stride == 0 {
            err("checks.stability.probe_stride", "must be at least 1".into());
        }
        if !(s.bump_radius > 0.0) {
            err("checks.stability.bump_radius", "must be positive".into());
        }
        if !(s.positivity_tol >= 0.0) {
            err("checks.stability.positivity_tol", "must be non-negative".into());
        }
    }
    if req.contains(&CheckKind::Ordering) {
        let o = &ch.ordering;
        for (name, v) in [("lower", o.lower), ("upper", o.upper)] {
            match v {
                None => err(&format!("checks.ordering.{name}"), "barrier curvature required".into()),
                Some(c) if !(c > 0.0) || (hyperbolic && c >= 1.0) => {
                    err(&format!("checks.ordering.{name}"), format!("invalid barrier curvature {c}"))
                }
                _ => {}
            }
        }
        if !(o.tol >= 0.0) {
            err("checks.ordering.tol", "must be non-negative".into());
        }
    }
    if req.contains(&CheckKind::RadialOracle) && ch.radial.nodes < 2 {
        err("checks.radial.nodes", "must be at least 2".into());
    }

    if cfg.command == Command::CheckAxioms {
        let a = &cfg.axioms;
        if a.samples == 0 {
            err("axioms.samples", "must be at least 1".into());
        }
        if !(a.range_min > 0.0 && a.range_max > a.range_min) {
            err("axioms.range_min", "sampling range must satisfy 0 < range_min < range_max".into());
        }
        for (k, v) in [
            ("tol", a.tol),
            ("homogeneity_tol", a.homogeneity_tol),
            ("concavity_tol", a.concavity_tol),
            ("gradient_step", a.gradient_step),
            ("hessian_step", a.hessian_step),
            ("decay_tol", a.decay_tol),
            ("limit_tol", a.limit_tol),
            ("limit_divergence_factor", a.limit_divergence_factor),
        ] {
            if !(v > 0.0) {
                err(&format!("axioms.{k}"), format!("must be positive, got {v}"));
            }
        }
    }
    if cfg.command == Command::MuInf {
        let m = &cfg.mu_inf;
        if !(m.max_ratio > 1.0) || m.steps == 0 {
            err("mu_inf.max_ratio", "schedule needs max_ratio > 1 and steps >= 1".into());
        }
        if !(m.tail_fraction > 0.0 && m.tail_fraction <= 1.0) {
            err("mu_inf.tail_fraction", "must lie in (0, 1]".into());
        }
        if !(m.rel_tol > 0.0) {
            err("mu_inf.rel_tol", "must be positive".into());
        }
    }
    if cfg.command == Command::Eval {
        for (i, p) in cfg.eval.points.iter().enumerate() {
            if p.len() != n {
                err(&format!("eval.points[{i}]"), format!("expected {n} entries, got {}", p.len()));
            } else if p.iter().any(|v| !(*v > 0.0)) {
                err(&format!("eval.points[{i}]"), "entries must be positive".into());
            }
        }
    }
    errs
}
