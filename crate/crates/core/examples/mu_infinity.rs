//! Estimating the anisotropic trace limit and comparing with closed forms.

use curvplateau::spectral::{mu_infinity_closed_form, mu_infinity_estimate, MuInfinityConfig};
use curvplateau::symmfunc::CurvatureFunction;

fn main() -> curvplateau::Result<()> {
    let cfg = MuInfinityConfig::default();
    for f in [
        CurvatureFunction::quotient(3, 1)?,
        CurvatureFunction::quotient(3, 2)?,
        CurvatureFunction::gauss(2)?,
    ] {
        let est = mu_infinity_estimate(&f, &cfg)?;
        println!(
            "{:<14} estimate {:?}  closed form {:?}  tail slope {:.3e}",
            f.label(),
            est.estimate,
            mu_infinity_closed_form(&f),
            est.tail_slope
        );
    }
    Ok(())
}
