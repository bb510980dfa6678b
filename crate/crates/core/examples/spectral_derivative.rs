//! The derivative of K at a symmetric matrix, and the pair-sum bound on its
//! second variation.

use curvplateau::spectral::{dk_matrix, directional_second, k_of_matrix, random_orthogonal, SpectralMatrix};
use curvplateau::symmfunc::CurvatureFunction;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> curvplateau::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = CurvatureFunction::quotient(4, 2)?;
    let q = random_orthogonal(4, &mut rng);
    let a = SpectralMatrix::from_frame(&q, &[4.0, 2.5, 1.0, 0.3])?;

    let b = dk_matrix(&f, &a)?;
    let euler = b.apply(a.entries()) - k_of_matrix(&f, &a)?;
    let commutator = b.matrix() * a.entries() - a.entries() * b.matrix();
    println!("Tr(BA) - K(A) = {euler:e}");
    println!("Tr(B)         = {:.6}", b.trace());
    println!("|[A, B]|      = {:e}", commutator.norm());
    println!("mu (ascending, paired with descending lambda) = {:.5?}", b.mu());

    let m = SpectralMatrix::new(DMatrix::from_fn(4, 4, |i, j| 1.0 / (1.0 + (i + j) as f64)))?;
    let d2 = directional_second(&f, &a, &m)?;
    println!(
        "D2K(M,M) = {:.6}, pair sum = {:?}, bound holds: {}",
        d2.value,
        d2.pair_sum,
        d2.refined_bound_holds(1e-6)
    );
    Ok(())
}
