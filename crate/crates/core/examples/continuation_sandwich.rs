//! Continuation in the prescribed curvature, watched between two barriers.

use std::sync::Arc;

use curvplateau::diagnostics::ordering_check;
use curvplateau::geometry::{DomainGrid, EquidistantCap, Prescription};
use curvplateau::solver::{continuation_solve_observed, newton_solve, ContinuationConfig, ContinuationEvent, NewtonConfig};
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = CurvatureFunction::gauss(2)?;
    let eps = 0.02;
    let grid = Arc::new(DomainGrid::disk(1.0, 41)?);
    let solve = |k: f64| -> Result<_, Box<dyn std::error::Error>> {
        let start = EquidistantCap::new(k, 1.0, eps)?.surface(grid.clone())?;
        Ok(newton_solve(&start, &f, &Prescription::Constant(k), &NewtonConfig::default())?.surface)
    };
    // higher curvature sits lower near the boundary circle
    let lower = solve(0.8)?;
    let upper = solve(0.3)?;

    let mut violations = 0;
    let result = continuation_solve_observed(
        &upper,
        &f,
        &Prescription::Constant(0.3),
        &Prescription::Constant(0.7),
        &ContinuationConfig::default(),
        &mut |ev| {
            if let ContinuationEvent::Accepted { record, surface } = ev {
                let rep = ordering_check(surface, &lower, &upper, 0.0).expect("same grid");
                violations += usize::from(!rep.passed());
                println!(
                    "t = {:.4}  iters {}  min curvature {:.4}  ordering margin {:.3e}",
                    record.t, record.iterations, record.min_eigenvalue, rep.worst_margin
                );
            }
        },
    )?;
    println!("{} at t = {}, {violations} ordering violations", result.report.outcome.label(), result.t);
    Ok(())
}
