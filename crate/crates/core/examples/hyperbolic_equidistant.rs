//! Constant Gauss curvature k < 1 in the half-space, spanning a circle at
//! small height, and the extrapolated boundary slope.

use std::sync::Arc;

use curvplateau::diagnostics::{boundary_slope_check, estimate_boundary_slope, SlopeCheckConfig, SlopeLevel};
use curvplateau::geometry::{DomainGrid, EquidistantCap, Prescription};
use curvplateau::solver::{newton_solve, NewtonConfig};
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = CurvatureFunction::gauss(2)?;
    let k = 0.5;
    let grid = Arc::new(DomainGrid::disk(1.0, 81)?);
    let mut levels = Vec::new();
    for eps in [0.08, 0.04, 0.02] {
        let cap = EquidistantCap::new(k, 1.0, eps)?;
        // perturbed start so that Newton has work to do
        let start = EquidistantCap::new(0.6, 1.0, eps)?.surface(grid.clone())?;
        let sol = newton_solve(&start, &f, &Prescription::Constant(k), &NewtonConfig::default())?;
        let oracle = cap.surface(grid.clone())?;
        let err = sol
            .surface
            .heights()
            .iter()
            .zip(oracle.heights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let slope = estimate_boundary_slope(&sol.surface, 0.5)?;
        println!("eps {eps:<5} error {err:.2e}  |Du|^2 on boundary {:.5}", slope.mean);
        levels.push(SlopeLevel { eps, slope_sq: slope.mean });
    }
    let report = boundary_slope_check(&levels, k, &SlopeCheckConfig::default())?;
    println!("{}: {}", report.status.label(), report.detail);
    Ok(())
}
