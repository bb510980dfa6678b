use std::sync::Arc;

use curvplateau::geometry::{
    curvature_field, linearize, surface_jet, AmbientModel, DomainGrid, EquidistantCap, GraphSurface, Prescription,
    SphericalCap,
};
use curvplateau::numfmt::g17;
use curvplateau::spectral::{dk_matrix, k_of_matrix, random_orthogonal, SpectralMatrix};
use curvplateau::symmfunc::{f_infinity, CurvatureFunction, LimitOptions};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn builtin(pick: usize, n: usize) -> CurvatureFunction {
    let k = 1 + pick % (n - 1).max(1);
    if pick % 3 == 0 || n == 1 {
        CurvatureFunction::gauss(n).unwrap()
    } else {
        CurvatureFunction::quotient(n, k.min(n - 1)).unwrap()
    }
}

fn cone_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n).prop_map(|v| v.into_iter().map(|e| 10f64.powf(e)).collect())
}

fn function_and_point() -> impl Strategy<Value = (CurvatureFunction, Vec<f64>)> {
    (2usize..=5, 0usize..12).prop_flat_map(|(n, pick)| (Just(builtin(pick, n)), cone_vector(n)))
}

/// Random positive definite matrix with the given spectrum.
fn matrix_with(lambda: &[f64], seed: u64) -> (SpectralMatrix, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(lambda.len(), &mut rng);
    (SpectralMatrix::from_frame(&q, lambda).unwrap(), q)
}

proptest! {
    #[test]
    fn builtins_are_exactly_symmetric((f, x) in function_and_point(), rot in 0usize..5) {
        let mut y = x.clone();
        y.rotate_left(rot % x.len());
        y.swap(0, x.len() - 1);
        prop_assert_eq!(f.eval(&x).unwrap(), f.eval(&y).unwrap());
    }

    #[test]
    fn builtins_are_homogeneous((f, x) in function_and_point(), t in 1e-3f64..1e3) {
        let fx = f.eval(&x).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        prop_assert!((f.eval(&tx).unwrap() - t * fx).abs() <= 1e-10 * t * fx);
    }

    #[test]
    fn values_grow_along_the_limit_schedule((f, x) in function_and_point()) {
        let mut y = x.clone();
        let mut prev = 0.0;
        for j in 0..30 {
            *y.last_mut().unwrap() = x.last().unwrap() * 4f64.powi(j);
            let v = f.eval(&y).unwrap();
            prop_assert!(v >= prev * (1.0 - 1e-14), "step {}: {} < {}", j, v, prev);
            prev = v;
        }
    }

    #[test]
    fn quotient_limit_matches_closed_form(
        (n, k) in (2usize..=5).prop_flat_map(|n| (Just(n), 1..n)),
        head in cone_vector(4),
    ) {
        let f = CurvatureFunction::quotient(n, k).unwrap();
        let head = &head[..n - 1];
        let numeric = f_infinity(&f, head, LimitOptions::default()).unwrap().finite().unwrap();
        let exact = f.limit_closed_form(head).unwrap().finite().unwrap();
        prop_assert!((numeric - exact).abs() <= 1e-6 * exact.max(1.0), "{} vs {}", numeric, exact);
    }

    #[test]
    fn derivative_is_orthogonally_equivariant((f, x) in function_and_point(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, _) = matrix_with(&x, s1);
        let mut rng = ChaCha8Rng::seed_from_u64(s2);
        let q = random_orthogonal(x.len(), &mut rng);
        let rotated = SpectralMatrix::new(q.transpose() * a.entries() * &q).unwrap();
        let b = dk_matrix(&f, &a).unwrap();
        let br = dk_matrix(&f, &rotated).unwrap();
        let expected = q.transpose() * b.matrix() * &q;
        // eigenvalues move by ε‖A‖, so relative errors grow with the condition number
        let cond = (a.max_eigenvalue() / a.min_eigenvalue()).max(100.0) / 100.0;
        let scale = 1.0 + b.matrix().norm();
        prop_assert!((br.matrix() - expected).norm() <= 1e-10 * cond * scale);
        let k = k_of_matrix(&f, &a).unwrap();
        prop_assert!((k_of_matrix(&f, &rotated).unwrap() - k).abs() <= 1e-12 * cond * k);
    }

    #[test]
    fn derivative_is_positive_and_antitone((f, x) in function_and_point(), seed in any::<u64>()) {
        let (a, _) = matrix_with(&x, seed);
        let b = dk_matrix(&f, &a).unwrap();
        prop_assert!(b.mu().iter().all(|m| *m > 0.0));
        // partials follow descending λ, so they must ascend
        let lam = a.eigenvalues();
        let p = b.partials();
        let gap = 1e-8 * a.norm();
        for i in 0..p.len() {
            for j in 0..p.len() {
                if lam[i] > lam[j] + gap {
                    prop_assert!(p[i] <= p[j] * (1.0 + 1e-10), "lambda {:?} partials {:?}", lam, p);
                }
            }
        }
        // Euler's relation for degree-one functions
        let k = k_of_matrix(&f, &a).unwrap();
        prop_assert!((b.apply(a.entries()) - k).abs() <= 1e-8 * k.max(1.0));
        let comm = b.matrix() * a.entries() - a.entries() * b.matrix();
        prop_assert!(comm.norm() <= 1e-8 * a.norm() * b.matrix().norm());
    }

    #[test]
    fn derivative_matches_central_differences(
        n in 2usize..=4,
        pick in 0usize..6,
        lam in cone_vector(4).prop_map(|v| v.into_iter().map(|e| e.powf(0.2)).collect::<Vec<_>>()),
        seed in any::<u64>(),
    ) {
        let f = builtin(pick, n);
        let (a, _) = matrix_with(&lam[..n], seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let m0 = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let m = (&m0 + m0.transpose()) * 0.5;
        let h = 1e-5 * a.norm() / m.norm();
        let plus = SpectralMatrix::new(a.entries() + &m * h).unwrap();
        let minus = SpectralMatrix::new(a.entries() - &m * h).unwrap();
        let fd = (k_of_matrix(&f, &plus).unwrap() - k_of_matrix(&f, &minus).unwrap()) / (2.0 * h);
        let exact = dk_matrix(&f, &a).unwrap().apply(&m);
        let fa = k_of_matrix(&f, &a).unwrap();
        prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + fa) * m.norm(), "{} vs {}", exact, fd);
    }

    #[test]
    fn euclidean_jets_ignore_vertical_translation(c in -5.0f64..5.0, rr in 1.2f64..4.0) {
        let f = CurvatureFunction::gauss(2).unwrap();
        let grid = Arc::new(DomainGrid::disk(1.0, 11).unwrap());
        let a = SphericalCap::new(rr, 1.0, 0.0).unwrap().surface(grid.clone()).unwrap();
        let b = SphericalCap::new(rr, 1.0, c).unwrap().surface(grid).unwrap();
        let (ja, jb) = (surface_jet(&a, &f).unwrap(), surface_jet(&b, &f).unwrap());
        for (p, q) in ja.nodes.iter().zip(&jb.nodes) {
            prop_assert!(p.shape.eigenvalues().iter().zip(q.shape.eigenvalues()).all(|(x, y)| (x - y).abs() < 1e-9));
        }
        prop_assert!(ja.k_field().iter().all(|k| k.is_some_and(|v| v > 0.0)));
    }

    #[test]
    fn hyperbolic_jets_ignore_dilation(s in 0.3f64..3.0, k in 0.2f64..0.9) {
        let f = CurvatureFunction::gauss(2).unwrap();
        let jet = |scale: f64| {
            let grid = Arc::new(DomainGrid::disk(scale, 11).unwrap());
            let cap = EquidistantCap::new(k, scale, 0.05 * scale).unwrap();
            surface_jet(&cap.surface(grid).unwrap(), &f).unwrap()
        };
        let (a, b) = (jet(1.0), jet(s));
        prop_assert_eq!(a.nodes.len(), b.nodes.len());
        for (p, q) in a.nodes.iter().zip(&b.nodes) {
            prop_assert!(p.shape.eigenvalues().iter().zip(q.shape.eigenvalues()).all(|(x, y)| (x - y).abs() < 1e-10));
        }
    }

    #[test]
    fn jacobian_matches_differences(amp in -0.05f64..0.05, col in 0usize..69, rr in 1.5f64..3.0) {
        let f = CurvatureFunction::quotient(2, 1).unwrap();
        let grid = Arc::new(DomainGrid::disk(1.0, 11).unwrap());
        let cap = SphericalCap::new(rr, 1.0, 0.0).unwrap();
        let s = GraphSurface::from_fn(AmbientModel::Euclidean, grid.clone(), |x| {
            cap.height_at(x[0].hypot(x[1])) + amp * (1.0 - x[0] * x[0] - x[1] * x[1]) * x[0]
        }).unwrap();
        let col = col % grid.interior_len();
        let jac = linearize(&s, &f).unwrap().jacobian.to_dense();
        let h = 1e-6;
        let bump = |d: f64| {
            let mut u = s.heights().to_vec();
            u[col] += d;
            curvature_field(&s.with_interior(u).unwrap(), &f).unwrap()
        };
        let (p, m) = (bump(h), bump(-h));
        let scale = jac.column(col).amax().max(1.0);
        for i in 0..grid.interior_len() {
            let fd = (p[i] - m[i]) / (2.0 * h);
            prop_assert!((jac[(i, col)] - fd).abs() <= 1e-6 * scale, "row {}: {} vs {}", i, jac[(i, col)], fd);
        }
    }

    #[test]
    fn blends_are_affine_in_t(a in 0.1f64..2.0, b in 0.1f64..2.0, t in 0.0f64..=1.0) {
        let p = Prescription::blend(&Prescription::Constant(a), &Prescription::Constant(b), t);
        prop_assert!((p.value(0, &[0.0, 0.0], 1.0) - ((1.0 - t) * a + t * b)).abs() <= 1e-15 * a.max(b));
    }

    #[test]
    fn csv_floats_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(g17(x).parse::<f64>().unwrap(), x);
    }
}
