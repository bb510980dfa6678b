//! Damped Newton iteration for `K(u) = κ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{curvature_field, linearize, local_geometry, GraphSurface, Prescription};
use crate::spectral::k_of_matrix;
use crate::symmfunc::CurvatureFunction;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Acceptance threshold on `‖R‖_∞`.
    pub tol: f64,
    pub max_iters: usize,
    /// Iterates must keep every principal curvature above this.
    pub admissibility_margin: f64,
    /// Sufficient decrease `‖R(u + λδ)‖₂ ≤ (1 − armijo·λ)‖R(u)‖₂`.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonConfig {
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// The Jacobian could not be factored.
    Singular,
    /// No step produced sufficient decrease, or the iteration budget ran out.
    Stalled,
    /// Every trial step left the cone.
    LostAdmissibility,
}

impl FailureKind {
    pub fn label(self) -> &'static str {
        match self {
            FailureKind::Singular => "singular",
            FailureKind::Stalled => "stalled",
            FailureKind::LostAdmissibility => "lost_admissibility",
        }
    }
}

/// Newton failure, carrying the last accepted iterate.
#[derive(Debug, Clone)]
pub struct SolveFailure {
    pub kind: FailureKind,
    pub iterations: usize,
    pub residual: f64,
    pub last: GraphSurface,
    pub message: String,
}

impl SolveFailure {
    /// `false` exactly when the linearisation was singular.
    pub fn non_degenerate(&self) -> bool {
        self.kind != FailureKind::Singular
    }
}

impl fmt::Display for SolveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "newton {} after {} iterations (residual {:e}): {}",
            self.kind.label(),
            self.iterations,
            self.residual,
            self.message
        )
    }
}

impl std::error::Error for SolveFailure {}

#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub surface: GraphSurface,
    pub iterations: usize,
    pub residual: f64,
    /// `‖R‖_∞` after each accepted iterate, starting with the initial state.
    pub history: Vec<f64>,
    pub min_eigenvalue: f64,
}

/// `R_i = K(A_i) − κ_i` at interior nodes.
pub fn assemble_residual(
    surface: &GraphSurface,
    f: &CurvatureFunction,
    kappa: &Prescription,
) -> Result<Vec<f64>> {
    let grid = surface.grid();
    kappa.validate(grid.dim(), grid.interior_len())?;
    let k = curvature_field(surface, f)?;
    Ok(k.iter()
        .enumerate()
        .map(|(i, kv)| kv - kappa.value(i, &grid.interior_points()[i], surface.heights()[i]))
        .collect())
}

/// Residual and smallest principal curvature.
fn evaluate(
    surface: &GraphSurface,
    f: &CurvatureFunction,
    kappa: &Prescription,
) -> Result<(Vec<f64>, f64)> {
    let grid = surface.grid();
    let out = (0..grid.interior_len())
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let (u, p, s) = surface.node_jet(i);
            let lg = local_geometry(surface.model(), u, &p, &s).map_err(|_| Error::Admissibility {
                node: i,
                min_eigenvalue: f64::NAN,
            })?;
            let me = lg.shape.min_eigenvalue();
            if !(me > 0.0) {
                return Err(Error::Admissibility {
                    node: i,
                    min_eigenvalue: me,
                });
            }
            let kv = k_of_matrix(f, &lg.shape)?;
            Ok((kv - kappa.value(i, &grid.interior_points()[i], u), me))
        })
        .collect::<Result<Vec<_>>>()?;
    let min = out.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    Ok((out.into_iter().map(|v| v.0).collect(), min))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn newton_solve(
    u0: &GraphSurface,
    f: &CurvatureFunction,
    kappa: &Prescription,
    cfg: &NewtonConfig,
) -> std::result::Result<NewtonSolution, SolveFailure> {
    newton_solve_observed(u0, f, kappa, cfg, &mut |_, _, _| {})
}

/// Newton iteration; `observer(iteration, iterate, ‖R‖_∞)` sees every
/// accepted iterate.
pub fn newton_solve_observed(
    u0: &GraphSurface,
    f: &CurvatureFunction,
    kappa: &Prescription,
    cfg: &NewtonConfig,
    observer: &mut dyn FnMut(usize, &GraphSurface, f64),
) -> std::result::Result<NewtonSolution, SolveFailure> {
    let fail = |kind, iterations, residual, last: &GraphSurface, message: String| SolveFailure {
        kind,
        iterations,
        residual,
        last: last.clone(),
        message,
    };
    let grid = u0.grid();
    if let Err(e) = kappa.validate(grid.dim(), grid.interior_len()) {
        return Err(fail(FailureKind::Stalled, 0, f64::NAN, u0, e.to_string()));
    }
    let (mut r, mut min_eig) = match evaluate(u0, f, kappa) {
        Ok(v) => v,
        Err(e) => {
            return Err(fail(
                FailureKind::LostAdmissibility,
                0,
                f64::NAN,
                u0,
                format!("initial surface is not admissible: {e}"),
            ))
        }
    };
    if min_eig <= cfg.admissibility_margin {
        return Err(fail(
            FailureKind::LostAdmissibility,
            0,
            inf_norm(&r),
            u0,
            format!(
                "initial surface has principal curvature {min_eig:e}, margin {:e}",
                cfg.admissibility_margin
            ),
        ));
    }
    let mut u = u0.clone();
    let mut history = vec![inf_norm(&r)];
    for it in 0..=cfg.max_iters {
        let res = inf_norm(&r);
        if res <= cfg.tol {
            return Ok(NewtonSolution {
                surface: u,
                iterations: it,
                residual: res,
                history,
                min_eigenvalue: min_eig,
            });
        }
        if it == cfg.max_iters {
            break;
        }
        let lin = match linearize(&u, f) {
            Ok(l) => l,
            Err(e) => return Err(fail(FailureKind::LostAdmissibility, it, res, &u, e.to_string())),
        };
        let mut jac = lin.jacobian;
        for (i, x) in grid.interior_points().iter().enumerate() {
            let d = kappa.d_height(i, x, u.heights()[i]);
            if d != 0.0 {
                jac.push(i, i, -d);
            }
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = match jac.factor().and_then(|lu| lu.solve(&rhs)) {
            Ok(d) => d,
            Err(e) => return Err(fail(FailureKind::Singular, it, res, &u, e.to_string())),
        };
        let base = two_norm(&r);
        let mut lambda = 1.0;
        let mut any_admissible = false;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let trial: Vec<f64> = u
                .heights()
                .iter()
                .zip(&delta)
                .map(|(a, d)| a + lambda * d)
                .collect();
            if let Ok(cand) = u.with_interior(trial) {
                if let Ok((rt, me)) = evaluate(&cand, f, kappa) {
                    if me > cfg.admissibility_margin {
                        any_admissible = true;
                        if two_norm(&rt) <= (1.0 - cfg.armijo * lambda) * base {
                            accepted = Some((cand, rt, me));
                            break;
                        }
                    }
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((cand, rt, me)) => {
                u = cand;
                r = rt;
                min_eig = me;
                let rn = inf_norm(&r);
                history.push(rn);
                observer(it + 1, &u, rn);
            }
            None => {
                let kind = if any_admissible {
                    FailureKind::Stalled
                } else {
                    FailureKind::LostAdmissibility
                };
                return Err(fail(
                    kind,
                    it,
                    res,
                    &u,
                    format!("line search exhausted after {} halvings", cfg.max_backtracks),
                ));
            }
        }
    }
    let res = inf_norm(&r);
    Err(fail(
        FailureKind::Stalled,
        cfg.max_iters,
        res,
        &u,
        format!("no convergence within {} iterations", cfg.max_iters),
    ))
}
