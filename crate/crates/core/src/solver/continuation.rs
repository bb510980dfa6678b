//! Marching `κ_t = (1 − t)κ₀ + tκ₁` from a known solution.

use crate::error::{Error, Result};
use crate::geometry::{AmbientModel, GraphSurface, Prescription};
use crate::symmfunc::CurvatureFunction;

use super::newton::{assemble_residual, newton_solve_observed, FailureKind, NewtonConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Fixed,
    /// Halve the step after a failed solve, down to `min_step`.
    Halving { min_step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationConfig {
    /// Nominal number of equal steps in `t`.
    pub steps: usize,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub admissibility_margin: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
    pub step_control: StepControl,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            steps: 8,
            newton_tol: 1e-10,
            max_newton_iters: 30,
            admissibility_margin: 0.0,
            armijo: 1e-4,
            max_backtracks: 30,
            step_control: StepControl::Halving { min_step: 1.0 / 1024.0 },
        }
    }
}

impl ContinuationConfig {
    pub fn newton(&self) -> NewtonConfig {
        NewtonConfig {
            tol: self.newton_tol,
            max_iters: self.max_newton_iters,
            admissibility_margin: self.admissibility_margin,
            armijo: self.armijo,
            max_backtracks: self.max_backtracks,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Argument("continuation needs at least one step".into()));
        }
        if !(self.newton_tol > 0.0) || self.max_newton_iters == 0 {
            return Err(Error::Argument("newton tolerance and iteration budget must be positive".into()));
        }
        if !(self.admissibility_margin >= 0.0) {
            return Err(Error::Argument("admissibility margin must be non-negative".into()));
        }
        if let StepControl::Halving { min_step } = self.step_control {
            if !(min_step > 0.0 && min_step <= 1.0 / self.steps as f64) {
                return Err(Error::Argument(format!(
                    "min step {min_step} must lie in (0, 1/steps]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub iterations: usize,
    pub residual: f64,
    pub min_eigenvalue: f64,
    /// Lowest interior height; tracked for the half-space model.
    pub min_height: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuationOutcome {
    Converged,
    Stalled { t: f64 },
    LostAdmissibility { t: f64 },
    Singular { t: f64 },
}

impl ContinuationOutcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, ContinuationOutcome::Converged)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ContinuationOutcome::Converged => "converged",
            ContinuationOutcome::Stalled { .. } => "stalled",
            ContinuationOutcome::LostAdmissibility { .. } => "lost_admissibility",
            ContinuationOutcome::Singular { .. } => "singular",
        }
    }

    /// Parameter of the failed step.
    pub fn failed_at(&self) -> Option<f64> {
        match *self {
            ContinuationOutcome::Converged => None,
            ContinuationOutcome::Stalled { t }
            | ContinuationOutcome::LostAdmissibility { t }
            | ContinuationOutcome::Singular { t } => Some(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationReport {
    pub steps: Vec<StepRecord>,
    pub outcome: ContinuationOutcome,
}

/// The last accepted surface and the per-step report.
#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub surface: GraphSurface,
    pub t: f64,
    pub report: ContinuationReport,
}

pub enum ContinuationEvent<'a> {
    NewtonIterate {
        t: f64,
        iteration: usize,
        surface: &'a GraphSurface,
        residual: f64,
    },
    Accepted {
        record: &'a StepRecord,
        surface: &'a GraphSurface,
    },
}

pub fn continuation_solve(
    u0: &GraphSurface,
    f: &CurvatureFunction,
    kappa0: &Prescription,
    kappa1: &Prescription,
    cfg: &ContinuationConfig,
) -> Result<ContinuationResult> {
    continuation_solve_observed(u0, f, kappa0, kappa1, cfg, &mut |_| {})
}

fn check_positive(surface: &GraphSurface, kappa: &Prescription, name: &str) -> Result<()> {
    for (i, x) in surface.grid().interior_points().iter().enumerate() {
        let v = kappa.value(i, x, surface.heights()[i]);
        if !(v > 0.0) {
            return Err(Error::Precondition(format!(
                "{name} is {v} at interior node {i}, must be positive"
            )));
        }
    }
    Ok(())
}

fn min_height(surface: &GraphSurface) -> Option<f64> {
    (surface.model() == AmbientModel::HyperbolicHalfSpace)
        .then(|| surface.heights().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Continuation with an observer for Newton iterates and accepted steps.
///
/// Solver failures end the march and are reported in the outcome together
/// with the last accepted surface; only violated preconditions are errors.
pub fn continuation_solve_observed(
    u0: &GraphSurface,
    f: &CurvatureFunction,
    kappa0: &Prescription,
    kappa1: &Prescription,
    cfg: &ContinuationConfig,
    observer: &mut dyn FnMut(ContinuationEvent<'_>),
) -> Result<ContinuationResult> {
    cfg.validate()?;
    let grid = u0.grid();
    kappa0.validate(grid.dim(), grid.interior_len())?;
    kappa1.validate(grid.dim(), grid.interior_len())?;
    check_positive(u0, kappa0, "initial prescription")?;
    check_positive(u0, kappa1, "target prescription")?;
    let r0 = assemble_residual(u0, f, kappa0)?;
    let res0 = r0.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if res0 > cfg.newton_tol {
        return Err(Error::Precondition(format!(
            "initial surface has residual {res0:e} against the initial prescription, tolerance {:e}",
            cfg.newton_tol
        )));
    }
    let newton = cfg.newton();
    let mut surface = u0.clone();
    let mut steps = Vec::new();
    if kappa0 == kappa1 {
        let jet = crate::geometry::surface_jet(u0, f)?;
        let record = StepRecord {
            t: 1.0,
            iterations: 0,
            residual: res0,
            min_eigenvalue: jet.min_eigenvalue(),
            min_height: min_height(u0),
        };
        observer(ContinuationEvent::Accepted {
            record: &record,
            surface: u0,
        });
        steps.push(record);
        return Ok(ContinuationResult {
            surface,
            t: 1.0,
            report: ContinuationReport {
                steps,
                outcome: ContinuationOutcome::Converged,
            },
        });
    }
    let nominal = 1.0 / cfg.steps as f64;
    let mut dt = nominal;
    let mut t = 0.0;
    let mut outcome = ContinuationOutcome::Converged;
    while t < 1.0 {
        let t_try = if t + dt >= 1.0 - 1e-12 { 1.0 } else { t + dt };
        let kappa = Prescription::blend(kappa0, kappa1, t_try);
        let attempt = newton_solve_observed(&surface, f, &kappa, &newton, &mut |it, s, r| {
            observer(ContinuationEvent::NewtonIterate {
                t: t_try,
                iteration: it,
                surface: s,
                residual: r,
            })
        });
        match attempt {
            Ok(sol) => {
                let record = StepRecord {
                    t: t_try,
                    iterations: sol.iterations,
                    residual: sol.residual,
                    min_eigenvalue: sol.min_eigenvalue,
                    min_height: min_height(&sol.surface),
                };
                observer(ContinuationEvent::Accepted {
                    record: &record,
                    surface: &sol.surface,
                });
                steps.push(record);
                surface = sol.surface;
                t = t_try;
                dt = (2.0 * dt).min(nominal);
            }
            Err(fail) => {
                let retry = match cfg.step_control {
                    StepControl::Fixed => false,
                    StepControl::Halving { min_step } => 0.5 * dt >= min_step * (1.0 - 1e-12),
                };
                if retry {
                    dt *= 0.5;
                    continue;
                }
                outcome = match fail.kind {
                    FailureKind::Singular => ContinuationOutcome::Singular { t: t_try },
                    FailureKind::Stalled => ContinuationOutcome::Stalled { t: t_try },
                    FailureKind::LostAdmissibility => {
                        ContinuationOutcome::LostAdmissibility { t: t_try }
                    }
                };
                break;
            }
        }
    }
    Ok(ContinuationResult {
        surface,
        t,
        report: ContinuationReport { steps, outcome },
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{DomainGrid, SphericalCap};
    use crate::solver::newton_solve;

    fn solved_cap(k: f64) -> (GraphSurface, CurvatureFunction) {
        let f = CurvatureFunction::gauss(2).unwrap();
        let grid = Arc::new(DomainGrid::disk(1.0, 21).unwrap());
        let u0 = SphericalCap::new(1.0 / k, 1.0, 0.0).unwrap().surface(grid).unwrap();
        let s = newton_solve(&u0, &f, &Prescription::Constant(k), &NewtonConfig::default()).unwrap();
        (s.surface, f)
    }

    #[test]
    fn accepted_steps_increase_and_meet_the_tolerance() {
        let (u0, f) = solved_cap(0.4);
        let cfg = ContinuationConfig::default();
        let res = continuation_solve(&u0, &f, &Prescription::Constant(0.4), &Prescription::Constant(0.8), &cfg).unwrap();
        assert!(res.report.outcome.is_converged());
        assert_eq!(res.t, 1.0);
        let steps = &res.report.steps;
        assert!(steps.windows(2).all(|w| w[1].t > w[0].t));
        assert!(steps.iter().all(|s| s.residual <= cfg.newton_tol));
        assert!(steps.iter().all(|s| s.min_height.is_none()));
        let r = assemble_residual(&res.surface, &f, &Prescription::Constant(0.8)).unwrap();
        assert!(r.iter().all(|v| v.abs() <= cfg.newton_tol));
    }

    #[test]
    fn equal_prescriptions_accept_the_start() {
        let (u0, f) = solved_cap(0.5);
        let k = Prescription::Constant(0.5);
        let res = continuation_solve(&u0, &f, &k, &k, &ContinuationConfig::default()).unwrap();
        assert_eq!(res.report.steps.len(), 1);
        assert_eq!(res.surface.heights(), u0.heights());
    }

    #[test]
    fn start_must_solve_the_initial_prescription() {
        let (u0, f) = solved_cap(0.5);
        let err = continuation_solve(
            &u0,
            &f,
            &Prescription::Constant(0.6),
            &Prescription::Constant(0.7),
            &ContinuationConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn march_stops_before_the_spanning_limit() {
        // curvature above 1 cannot span the unit circle
        let (u0, f) = solved_cap(0.5);
        let cfg = ContinuationConfig {
            steps: 4,
            step_control: StepControl::Halving { min_step: 1.0 / 64.0 },
            ..Default::default()
        };
        let res = continuation_solve(&u0, &f, &Prescription::Constant(0.5), &Prescription::Constant(1.5), &cfg).unwrap();
        let at = res.report.outcome.failed_at().expect("must fail");
        assert!(res.t < at && at < 1.0);
        // κ_t = 0.5 + t, and the last accepted surface still spans
        assert!(0.5 + res.t < 1.0 + 1e-9);
        assert!(res.report.steps.last().map_or(true, |s| s.t == res.t));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            ContinuationConfig { steps: 0, ..Default::default() },
            ContinuationConfig { newton_tol: 0.0, ..Default::default() },
            ContinuationConfig {
                step_control: StepControl::Halving { min_step: 0.5 },
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
