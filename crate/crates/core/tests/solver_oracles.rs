use std::sync::Arc;

use curvplateau::diagnostics::ordering_check;
use curvplateau::geometry::{AmbientModel, DomainGrid, EquidistantCap, GraphSurface, Prescription, SphericalCap};
use curvplateau::solver::{
    continuation_solve_observed, newton_solve, radial_solve, ContinuationConfig, ContinuationEvent, NewtonConfig,
};
use curvplateau::symmfunc::CurvatureFunction;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn radial_grid_converges_to_the_shooting_profile() {
    // the grid solution is compared with the shooting profile, not with a closed form
    let f = CurvatureFunction::quotient(3, 2).unwrap();
    let k = 0.8;
    let mut errors = Vec::new();
    for m in [26, 51, 101] {
        let oracle = radial_solve(AmbientModel::Euclidean, &f, k, 1.0, 0.0, m).unwrap();
        let grid = Arc::new(DomainGrid::radial(1.0, m, 3).unwrap());
        let start = SphericalCap::new(2.0, 1.0, 0.0).unwrap();
        let u0 = GraphSurface::from_fn(AmbientModel::Euclidean, grid, |x| start.height_at(x[0].abs())).unwrap();
        let sol = newton_solve(&u0, &f, &Prescription::Constant(k), &NewtonConfig::default()).unwrap();
        // interior radial nodes are the oracle radii without the endpoint
        errors.push(max_diff(sol.surface.heights(), &oracle.u[..m - 1]));
    }
    let ord = orders(&errors);
    assert!(errors[2] < 1e-4, "{errors:?}");
    assert!(ord.iter().all(|o| *o > 1.8), "{errors:?} {ord:?}");
}

#[test]
fn hyperbolic_disk_converges_to_the_equidistant_cap() {
    let f = CurvatureFunction::gauss(2).unwrap();
    let k = 0.5;
    let cap = EquidistantCap::new(k, 1.0, 0.1).unwrap();
    let mut errors = Vec::new();
    for nodes in [21, 41, 81] {
        let grid = Arc::new(DomainGrid::disk(1.0, nodes).unwrap());
        let start = EquidistantCap::new(0.6, 1.0, 0.1).unwrap().surface(grid.clone()).unwrap();
        let sol = newton_solve(&start, &f, &Prescription::Constant(k), &NewtonConfig::default()).unwrap();
        errors.push(max_diff(sol.surface.heights(), cap.surface(grid).unwrap().heights()));
    }
    let ord = orders(&errors);
    assert!(ord.iter().all(|o| *o > 1.8), "{errors:?} {ord:?}");
}

#[test]
fn rectangle_recovers_a_sphere_from_its_boundary_values() {
    let f = CurvatureFunction::gauss(2).unwrap();
    let grid = Arc::new(DomainGrid::rectangle(-0.5, 0.5, -0.4, 0.4, 41, 33).unwrap());
    let exact = SphericalCap::new(2.0, 1.0, 0.0).unwrap();
    let oracle = GraphSurface::from_fn(AmbientModel::Euclidean, grid.clone(), |x| exact.height_at(x[0].hypot(x[1]))).unwrap();
    // a bump vanishing on the boundary keeps the start admissible
    let u0 = GraphSurface::from_fn(AmbientModel::Euclidean, grid, |x| {
        exact.height_at(x[0].hypot(x[1])) + 0.3 * (0.25 - x[0] * x[0]) * (0.16 - x[1] * x[1])
    })
    .unwrap();
    let sol = newton_solve(&u0, &f, &Prescription::Constant(0.5), &NewtonConfig::default()).unwrap();
    let err = max_diff(sol.surface.heights(), oracle.heights());
    assert!(err < 1e-5, "{err}");
}

#[test]
fn continuation_stays_between_equidistant_barriers() {
    let f = CurvatureFunction::gauss(2).unwrap();
    let grid = Arc::new(DomainGrid::disk(1.0, 41).unwrap());
    let solve = |k: f64| {
        let start = EquidistantCap::new(k, 1.0, 0.02).unwrap().surface(grid.clone()).unwrap();
        newton_solve(&start, &f, &Prescription::Constant(k), &NewtonConfig::default()).unwrap().surface
    };
    let (lower, upper) = (solve(0.8), solve(0.3));
    let mut checked = 0;
    let res = continuation_solve_observed(
        &upper,
        &f,
        &Prescription::Constant(0.3),
        &Prescription::Constant(0.7),
        &ContinuationConfig::default(),
        &mut |ev| {
            if let ContinuationEvent::Accepted { surface, .. } = ev {
                let rep = ordering_check(surface, &lower, &upper, 0.0).unwrap();
                assert!(rep.passed(), "{rep:?}");
                checked += 1;
            }
        },
    )
    .unwrap();
    assert!(res.report.outcome.is_converged());
    assert_eq!(checked, res.report.steps.len());
    // the final surface is the K = 0.7 solution started from its own cap
    assert!(max_diff(res.surface.heights(), solve(0.7).heights()) < 1e-8);
}
