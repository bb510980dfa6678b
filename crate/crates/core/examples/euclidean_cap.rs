//! Newton solve of K = 1/2 over the unit disk, against the exact spherical cap.

use std::sync::Arc;

use curvplateau::geometry::{DomainGrid, Prescription, SphericalCap};
use curvplateau::solver::{newton_solve, NewtonConfig};
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = CurvatureFunction::gauss(2)?;
    let exact = SphericalCap::new(2.0, 1.0, 0.0)?;
    // start from a flatter, hence admissible but wrong, cap
    let guess = SphericalCap::new(3.0, 1.0, 0.0)?;
    let mut prev: Option<f64> = None;
    for nodes in [21, 41, 81] {
        let grid = Arc::new(DomainGrid::disk(1.0, nodes)?);
        let sol = newton_solve(&guess.surface(grid.clone())?, &f, &Prescription::Constant(0.5), &NewtonConfig::default())?;
        let oracle = exact.surface(grid)?;
        let err = sol
            .surface
            .heights()
            .iter()
            .zip(oracle.heights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let order = prev.map(|p| (p / err).log2());
        println!("N = {nodes:>3}  iters {}  error {err:.3e}  order {order:.2?}", sol.iterations);
        prev = Some(err);
    }
    Ok(())
}
