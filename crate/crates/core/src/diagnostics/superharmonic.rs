//! Lower bound for `Δ^K φ` when the level sets of `φ` are K-convex.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{covariant_hessian, delta_k, AmbientFunction, AmbientModel, GraphSurface, Prescription};
use crate::symmfunc::CurvatureFunction;

use super::{CheckReport, CheckStatus, Location};

#[derive(Debug, Clone, PartialEq)]
pub struct SuperharmonicityConfig {
    /// Slack is `slack_constant · h`.
    pub slack_constant: f64,
    pub pass_fraction: f64,
    /// Allowed deviation of `|∇φ|` from 1.
    pub gradient_tol: f64,
}

impl Default for SuperharmonicityConfig {
    fn default() -> Self {
        Self {
            slack_constant: 0.1,
            pass_fraction: 0.99,
            gradient_tol: 1e-8,
        }
    }
}

/// Principal curvatures of the level set of `φ` through `z`, with respect
/// to the normal `∇φ/|∇φ|`, and `|∇φ|`.
pub fn level_set_curvatures(model: AmbientModel, phi: &dyn AmbientFunction, z: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = z.len();
    let grad = phi.gradient(z);
    let hess = covariant_hessian(model, z, &grad, &phi.hessian(z));
    // orthonormal frame of the ambient metric: E_i = ∂_i / ρ
    let rho = model.conformal_factor(z[m - 1]);
    let g = DVector::from_iterator(m, grad.iter().map(|v| v / rho));
    let h: DMatrix<f64> = hess / (rho * rho);
    let norm = g.norm();
    if !(norm > 0.0) {
        return Err(Error::Precondition("level set has a critical point of the function".into()));
    }
    let nu = &g / norm;
    // basis of ν⊥ by Gram–Schmidt on the coordinate axes
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m - 1);
    for i in 0..m {
        let mut v = DVector::zeros(m);
        v[i] = 1.0;
        v -= &nu * nu.dot(&v);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let l = v.norm();
        if l > 1e-8 && basis.len() < m - 1 {
            basis.push(v / l);
        }
    }
    let q = DMatrix::from_columns(&basis);
    let restricted = q.transpose() * h * &q / norm;
    let mut eig: Vec<f64> = restricted.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok((eig, norm))
}

/// `Δ^K φ ≥ −‖Hess φ‖ Σ μ_i φ_{;i}²` at interior nodes, up to slack `C·h`.
///
/// Runs only when `φ` has unit gradient and level sets whose K-curvature
/// exceeds `κ` at every interior node.
pub fn superharmonicity_check(
    surface: &GraphSurface,
    f: &CurvatureFunction,
    kappa: &Prescription,
    phi: &dyn AmbientFunction,
    cfg: &SuperharmonicityConfig,
) -> Result<CheckReport> {
    let grid = surface.grid();
    kappa.validate(grid.dim(), grid.interior_len())?;
    let tolerances = vec![
        ("slack_constant".to_string(), cfg.slack_constant),
        ("pass_fraction".to_string(), cfg.pass_fraction),
        ("gradient_tol".to_string(), cfg.gradient_tol),
    ];
    let not_applicable = |node: usize, margin: f64, detail: String| CheckReport {
        name: "superharmonicity".into(),
        status: CheckStatus::NotApplicable,
        worst_margin: margin,
        location: Some(Location::Node(node)),
        tolerances: tolerances.clone(),
        detail,
    };
    let mut worst_pre = (f64::INFINITY, 0usize);
    for (i, x) in grid.interior_points().iter().enumerate() {
        let u = surface.heights()[i];
        let mut z = x.clone();
        z.push(u);
        let (lambda, norm) = level_set_curvatures(surface.model(), phi, &z)?;
        if (norm - 1.0).abs() > cfg.gradient_tol {
            return Ok(not_applicable(i, f64::NAN, format!("|grad phi| = {norm} at node {i}")));
        }
        if lambda.iter().any(|v| !(*v > 0.0)) {
            return Ok(not_applicable(i, f64::NAN, format!("level set not convex at node {i}")));
        }
        let kl = f.eval(&lambda)?;
        let gap = kl - kappa.value(i, x, u);
        if gap < worst_pre.0 {
            worst_pre = (gap, i);
        }
    }
    if !(worst_pre.0 > 0.0) {
        return Ok(not_applicable(
            worst_pre.1,
            worst_pre.0,
            format!("level-set curvature does not exceed kappa at node {}", worst_pre.1),
        ));
    }
    let field = delta_k(surface, f, phi)?;
    let slack = cfg.slack_constant * grid.spacing();
    let mut worst = (f64::INFINITY, 0usize);
    let mut passing = 0usize;
    let mut counted = 0usize;
    for (i, node) in field.nodes.iter().enumerate() {
        let Some(d) = node else { continue };
        counted += 1;
        let margin = d.value + d.hessian_norm * d.weighted_gradient + slack;
        if margin >= 0.0 {
            passing += 1;
        }
        if margin < worst.0 {
            worst = (margin, i);
        }
    }
    let total = grid.interior_len();
    let fraction = passing as f64 / total as f64;
    let status = if fraction >= cfg.pass_fraction {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(CheckReport {
        name: "superharmonicity".into(),
        status,
        worst_margin: worst.0,
        location: Some(Location::Node(worst.1)),
        tolerances,
        detail: format!(
            "{passing}/{total} nodes pass ({} outside the cone); level-set gap {}",
            total - counted,
            worst_pre.0
        ),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{DomainGrid, EquidistantCap, HyperbolicDistance};

    #[test]
    fn distance_spheres_have_coth_curvature() {
        let c = vec![0.2, -0.1, 3.0];
        let phi = HyperbolicDistance { center: c.clone() };
        for z in [[0.0, 0.0, 0.5], [1.0, 0.4, 2.0], [0.2, -0.1, 9.0]] {
            let d = phi.value(&z);
            let (lambda, norm) = level_set_curvatures(AmbientModel::HyperbolicHalfSpace, &phi, &z).unwrap();
            assert!((norm - 1.0).abs() < 1e-12);
            for l in lambda {
                assert!((l - 1.0 / d.tanh()).abs() < 1e-9, "{l} at distance {d}");
            }
        }
    }

    #[test]
    fn inequality_holds_on_a_sampled_cap() {
        let f = CurvatureFunction::gauss(2).unwrap();
        let grid = Arc::new(DomainGrid::disk(1.0, 31).unwrap());
        let s = EquidistantCap::new(0.5, 1.0, 0.05).unwrap().surface(grid).unwrap();
        let phi = HyperbolicDistance { center: vec![0.0, 0.0, 30.0] };
        let rep = superharmonicity_check(&s, &f, &Prescription::Constant(0.5), &phi, &Default::default()).unwrap();
        assert_eq!(rep.status, CheckStatus::Pass, "{}", rep.detail);
    }

    #[test]
    fn kappa_above_the_level_sets_is_not_applicable() {
        let f = CurvatureFunction::gauss(2).unwrap();
        let grid = Arc::new(DomainGrid::disk(1.0, 11).unwrap());
        let s = EquidistantCap::new(0.5, 1.0, 0.05).unwrap().surface(grid).unwrap();
        let phi = HyperbolicDistance { center: vec![0.0, 0.0, 30.0] };
        let rep = superharmonicity_check(&s, &f, &Prescription::Constant(5.0), &phi, &Default::default()).unwrap();
        assert_eq!(rep.status, CheckStatus::NotApplicable);
    }
}
