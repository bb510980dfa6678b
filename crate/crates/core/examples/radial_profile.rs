//! Rotationally symmetric solutions by shooting, written as CSV.

use curvplateau::geometry::{AmbientModel, EquidistantCap};
use curvplateau::solver::radial_solve;
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> curvplateau::Result<()> {
    let f = CurvatureFunction::gauss(2)?;
    let (k, eps) = (0.5, 0.02);
    let profile = radial_solve(AmbientModel::HyperbolicHalfSpace, &f, k, 1.0, eps, 201)?;
    let cap = EquidistantCap::new(k, 1.0, eps)?;
    let err = profile
        .r
        .iter()
        .zip(&profile.u)
        .map(|(r, u)| (u - cap.height_at(*r)).abs())
        .fold(0.0, f64::max);
    println!("apex {:.12}, max error vs equidistant cap {err:e}", profile.apex_height());
    println!("|u'(a)|^2 = {:.6}, ideal limit {:.6}", profile.boundary_slope_sq(), cap.limit_slope_sq());

    // a quotient has no closed-form solution here; the profile is the oracle
    let q = CurvatureFunction::quotient(3, 2)?;
    let p = radial_solve(AmbientModel::Euclidean, &q, 1.0, 0.8, 0.0, 11)?;
    p.write_csv(&mut std::io::stdout().lock())?;
    Ok(())
}
