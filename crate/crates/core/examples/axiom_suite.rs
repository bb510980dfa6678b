//! Sampled axiom checks for built-in and user-supplied curvature functions.

use curvplateau::symmfunc::{check_axioms, AxiomConfig, CurvatureFunction};

fn main() -> curvplateau::Result<()> {
    let cfg = AxiomConfig::default();
    let mut functions = vec![CurvatureFunction::gauss(2)?, CurvatureFunction::quotient(4, 2)?];
    // convex, so concavity must fail
    functions.push(CurvatureFunction::custom("quadratic_mean", 2, |x: &[f64]| {
        (x.iter().map(|v| v * v).sum::<f64>() / 2.0).sqrt()
    })?);

    for f in &functions {
        let report = check_axioms(f, &cfg)?;
        println!("{} ({} samples, limit {:?})", report.function, report.samples, report.limit_class);
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            println!("  {mark} {:<5} {:<40} worst {:e}", c.axiom, c.description, c.worst_margin);
        }
    }
    Ok(())
}
