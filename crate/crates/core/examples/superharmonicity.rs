//! Lower bound for the anisotropic Laplacian of a distance function on a
//! solved surface.

use std::sync::Arc;

use curvplateau::diagnostics::{superharmonicity_check, SuperharmonicityConfig};
use curvplateau::geometry::{DomainGrid, EquidistantCap, HyperbolicDistance, Prescription};
use curvplateau::solver::{newton_solve, NewtonConfig};
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = CurvatureFunction::gauss(2)?;
    let k = Prescription::Constant(0.5);
    let grid = Arc::new(DomainGrid::disk(1.0, 41)?);
    let start = EquidistantCap::new(0.5, 1.0, 0.02)?.surface(grid)?;
    let surface = newton_solve(&start, &f, &k, &NewtonConfig::default())?.surface;

    // far above the surface, so the level spheres are strongly convex
    let phi = HyperbolicDistance { center: vec![0.0, 0.0, 30.0] };
    for slack in [0.0, 0.1] {
        let cfg = SuperharmonicityConfig { slack_constant: slack, ..Default::default() };
        let rep = superharmonicity_check(&surface, &f, &k, &phi, &cfg)?;
        println!("C = {slack}: {} margin {:.4} ({})", rep.status.label(), rep.worst_margin, rep.detail);
    }
    Ok(())
}
