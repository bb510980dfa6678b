//! Pointwise criteria on solved surfaces.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{analyze_stability, stability_operator, GraphSurface, Prescription, StabilityConfig};
use crate::spectral::{dk_matrix, k_of_matrix, SpectralMatrix};
use crate::symmfunc::CurvatureFunction;

use super::{CheckReport, CheckStatus, Location};

/// `Tr(B) − Tr(B A²)` with `B = DK_A`.
pub fn uniqueness_margin(f: &CurvatureFunction, a: &SpectralMatrix) -> Result<f64> {
    let b = dk_matrix(f, a)?;
    let a2 = a.entries() * a.entries();
    Ok(b.trace() - b.apply(&a2))
}

/// Checks `Tr(B) > Tr(BA²)` at every interior node of a surface with
/// `K < 1`.
pub fn uniqueness_criterion_check(surface: &GraphSurface, f: &CurvatureFunction) -> Result<CheckReport> {
    let mut worst = (f64::INFINITY, 0usize);
    let mut max_k = (f64::NEG_INFINITY, 0usize);
    for i in 0..surface.grid().interior_len() {
        let lg = surface.local_geometry(i)?;
        if !lg.shape.is_positive_definite() {
            return Err(Error::Admissibility {
                node: i,
                min_eigenvalue: lg.shape.min_eigenvalue(),
            });
        }
        let k = k_of_matrix(f, &lg.shape)?;
        if k > max_k.0 {
            max_k = (k, i);
        }
        let m = uniqueness_margin(f, &lg.shape)?;
        if m < worst.0 {
            worst = (m, i);
        }
    }
    if max_k.0 >= 1.0 {
        return Ok(CheckReport {
            name: "uniqueness_criterion".into(),
            status: CheckStatus::NotApplicable,
            worst_margin: worst.0,
            location: Some(Location::Node(max_k.1)),
            tolerances: Vec::new(),
            detail: format!("K = {} >= 1 at node {}", max_k.0, max_k.1),
        });
    }
    Ok(CheckReport {
        name: "uniqueness_criterion".into(),
        status: if worst.0 > 0.0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_margin: worst.0,
        location: Some(Location::Node(worst.1)),
        tolerances: Vec::new(),
        detail: format!("max K {}", max_k.0),
    })
}

fn same_grid(a: &GraphSurface, b: &GraphSurface) -> bool {
    Arc::ptr_eq(a.grid(), b.grid()) || a.grid() == b.grid()
}

/// `lower ≤ surface ≤ upper` at every node, up to `tol`.
///
/// The margin is the smallest gap at interior nodes; zero means the
/// ordering holds but is not strict.
pub fn ordering_check(
    surface: &GraphSurface,
    lower: &GraphSurface,
    upper: &GraphSurface,
    tol: f64,
) -> Result<CheckReport> {
    if !same_grid(surface, lower) || !same_grid(surface, upper) {
        return Err(Error::Argument("ordering check needs surfaces on one grid".into()));
    }
    fn scan(u: &[f64], l: &[f64], h: &[f64], at: fn(usize) -> Location) -> (f64, Option<Location>) {
        let mut worst = (f64::INFINITY, None);
        for i in 0..u.len() {
            let m = (u[i] - l[i]).min(h[i] - u[i]);
            if m < worst.0 {
                worst = (m, Some(at(i)));
            }
        }
        worst
    }
    let interior = scan(surface.heights(), lower.heights(), upper.heights(), Location::Node);
    let boundary = scan(
        surface.boundary_values(),
        lower.boundary_values(),
        upper.boundary_values(),
        Location::Boundary,
    );
    let worst = if boundary.0 < interior.0 { boundary } else { interior };
    let status = if worst.0 >= -tol {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    let (margin, location) = if status == CheckStatus::Pass { interior } else { worst };
    Ok(CheckReport {
        name: "ordering".into(),
        status,
        worst_margin: margin,
        location,
        tolerances: vec![("tol".into(), tol)],
        detail: if margin > 0.0 {
            "strict".into()
        } else {
            "non-strict".into()
        },
    })
}

/// Non-degeneracy and inverse positivity of the discrete stability operator.
pub fn stability_check(
    surface: &GraphSurface,
    f: &CurvatureFunction,
    kappa: &Prescription,
    cfg: &StabilityConfig,
) -> Result<CheckReport> {
    let op = stability_operator(surface, f, kappa)?;
    let rep = analyze_stability(&op, surface.grid(), cfg);
    let margin = rep.worst_probe_response + cfg.positivity_tol;
    let status = if rep.non_degenerate && rep.inverse_positive {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(CheckReport {
        name: "stability".into(),
        status,
        worst_margin: margin,
        location: None,
        tolerances: vec![
            ("positivity_tol".into(), cfg.positivity_tol),
            ("max_condition".into(), cfg.max_condition),
        ],
        detail: format!(
            "non_degenerate={} inverse_positive={} condition={:e} principal_eigenvalue={} probes={}",
            rep.non_degenerate,
            rep.inverse_positive,
            rep.condition_estimate,
            rep.principal_eigenvalue.map(|v| v.to_string()).unwrap_or_else(|| "none".into()),
            rep.probes
        ),
    })
}
