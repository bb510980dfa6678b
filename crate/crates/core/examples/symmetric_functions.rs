//! Evaluating the built-in curvature functions and their f_∞ limits.

use curvplateau::symmfunc::{f_infinity, sigma, CurvatureFunction, LimitOptions};

fn main() -> curvplateau::Result<()> {
    let x = [3.0, 2.0, 0.5];
    println!("sigma_1..3{:?}", (1..=3).map(|k| sigma(k, &x)).collect::<Result<Vec<_>, _>>()?);

    for f in [
        CurvatureFunction::gauss(3)?,
        CurvatureFunction::quotient(3, 1)?,
        CurvatureFunction::quotient(3, 2)?,
    ] {
        let value = f.eval(&x)?;
        let grad = f.gradient(&x)?;
        let limit = f_infinity(&f, &[1.0, 1.0], LimitOptions::default())?;
        println!("{:<14} f = {value:.6}  grad = {grad:.4?}  f_inf(1,1) = {limit:?}", f.label());
    }
    Ok(())
}
