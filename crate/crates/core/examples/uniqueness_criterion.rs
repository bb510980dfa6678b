//! The pointwise trace criterion Tr(B) > Tr(BA²) on solved surfaces.

use std::sync::Arc;

use curvplateau::diagnostics::uniqueness_criterion_check;
use curvplateau::geometry::{AmbientModel, DomainGrid, EquidistantCap, GraphSurface, Prescription, SphericalCap};
use curvplateau::solver::{newton_solve, NewtonConfig};
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = NewtonConfig::default();
    let disk = Arc::new(DomainGrid::disk(1.0, 41)?);

    let gauss = CurvatureFunction::gauss(2)?;
    let start = EquidistantCap::new(0.5, 1.0, 0.02)?.surface(disk.clone())?;
    let s = newton_solve(&start, &gauss, &Prescription::Constant(0.5), &cfg)?.surface;
    let rep = uniqueness_criterion_check(&s, &gauss)?;
    println!("gauss(2), hyperbolic k = 0.5: {} margin {:.4}", rep.status.label(), rep.worst_margin);

    let start = SphericalCap::new(2.0, 1.0, 0.0)?.surface(disk)?;
    let s = newton_solve(&start, &gauss, &Prescription::Constant(0.5), &cfg)?.surface;
    let rep = uniqueness_criterion_check(&s, &gauss)?;
    println!("gauss(2), euclidean k = 0.5: {} margin {:.4}", rep.status.label(), rep.worst_margin);

    // three-dimensional graphs live on radial grids
    let q = CurvatureFunction::quotient(3, 2)?;
    let grid = Arc::new(DomainGrid::radial(1.0, 101, 3)?);
    let cap = SphericalCap::new(1.6, 1.0, 0.0)?;
    let start = GraphSurface::from_fn(AmbientModel::Euclidean, grid, |x| cap.height_at(x[0].abs()))?;
    let s = newton_solve(&start, &q, &Prescription::Constant(0.7), &cfg)?.surface;
    let rep = uniqueness_criterion_check(&s, &q)?;
    println!("quotient(3,2), euclidean k = 0.7: {} margin {:.4}", rep.status.label(), rep.worst_margin);
    Ok(())
}
