//! Non-degeneracy and inverse positivity of the linearised operator.

use std::sync::Arc;

use curvplateau::diagnostics::stability_check;
use curvplateau::geometry::{DomainGrid, EquidistantCap, Prescription, StabilityConfig};
use curvplateau::solver::{newton_solve, NewtonConfig};
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = CurvatureFunction::gauss(2)?;
    let grid = Arc::new(DomainGrid::disk(1.0, 41)?);
    for k in [0.3, 0.8] {
        let kappa = Prescription::Constant(k);
        let start = EquidistantCap::new(k, 1.0, 0.02)?.surface(grid.clone())?;
        let surface = newton_solve(&start, &f, &kappa, &NewtonConfig::default())?.surface;
        let cfg = StabilityConfig { probe_stride: 7, ..Default::default() };
        let rep = stability_check(&surface, &f, &kappa, &cfg)?;
        println!("k = {k}: {} ({})", rep.status.label(), rep.detail);
    }
    Ok(())
}
