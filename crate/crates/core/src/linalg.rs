//! Sparse matrices assembled from triplets, and their LU factorisation.

use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par};

use crate::error::{Error, Result};

/// Square sparse matrix in triplet form; duplicates are summed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Entries with duplicates summed, sorted by row then column.
    pub fn compressed(&self) -> Vec<(usize, usize, f64)> {
        let mut e = self.entries.clone();
        e.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(e.len());
        for (r, c, v) in e {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// Scales column `c` by `s[c]`.
    pub fn scale_columns(&mut self, s: &[f64]) {
        for e in &mut self.entries {
            e.2 *= s[e.1];
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for &(_, c, v) in &self.entries {
            col[c] += v.abs();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Sparse LU with partial pivoting, computed sequentially.
    pub fn factor(&self) -> Result<SparseLu> {
        faer::set_global_parallelism(Par::Seq);
        let trip: Vec<Triplet<usize, usize, f64>> = self
            .compressed()
            .into_iter()
            .map(|(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &trip)
            .map_err(|e| Error::Singular(format!("assembly failed: {e:?}")))?;
        let lu = m
            .sp_lu()
            .map_err(|e| Error::Singular(format!("factorisation failed: {e:?}")))?;
        Ok(SparseLu { lu, n: self.n })
    }
}

pub struct SparseLu {
    lu: Lu<usize, f64>,
    n: usize,
}

impl SparseLu {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`; non-finite solutions are reported as singular.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        finite((0..self.n).map(|i| x[(i, 0)]).collect())
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve_transpose(&rhs);
        finite((0..self.n).map(|i| x[(i, 0)]).collect())
    }

    /// Solves for several right-hand sides at once.
    pub fn solve_many(&self, b: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if b.is_empty() {
            return Ok(Vec::new());
        }
        let rhs = Mat::from_fn(self.n, b.len(), |i, j| b[j][i]);
        let x = self.lu.solve(&rhs);
        (0..b.len())
            .map(|j| finite((0..self.n).map(|i| x[(i, j)]).collect()))
            .collect()
    }
}

fn finite(x: Vec<f64>) -> Result<Vec<f64>> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::Singular("solution is not finite".into()))
    }
}

/// Hager's lower estimate of `‖A⁻¹‖₁` from a factorisation of `A`.
pub fn inverse_norm1_estimate(lu: &SparseLu) -> Result<f64> {
    let n = lu.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        est = y.iter().map(|v| v.abs()).sum::<f64>();
        let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = lu.solve_transpose(&xi)?;
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= ztx {
            break;
        }
        x = vec![0.0; n];
        x[j] = 1.0;
    }
    // alternating-sign probe guards against the estimate stalling
    let alt: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (n as f64 - 1.0).max(1.0))
        })
        .collect();
    let y = lu.solve(&alt)?;
    let alt_est = 2.0 * y.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
    Ok(est.max(alt_est))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> SparseMatrix {
        let mut m = SparseMatrix::new(n);
        for i in 0..n {
            m.push(i, i, 2.0);
            if i > 0 {
                m.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                m.push(i, i + 1, -0.5);
            }
        }
        m
    }

    #[test]
    fn solves_and_transposes() {
        let m = tridiag(30);
        let lu = m.factor().unwrap();
        let b: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let x = lu.solve(&b).unwrap();
        let r = m.apply(&x);
        assert!(r.iter().zip(&b).all(|(a, b)| (a - b).abs() < 1e-12));
        let xt = lu.solve_transpose(&b).unwrap();
        let dense = m.to_dense();
        let rt = dense.transpose() * nalgebra::DVector::from_vec(xt);
        assert!(rt.iter().zip(&b).all(|(a, b)| (a - b).abs() < 1e-12));
        let many = lu.solve_many(&[b.clone(), b.clone()]).unwrap();
        assert_eq!(many[0], many[1]);
    }

    #[test]
    fn norm_estimate_matches_dense_inverse() {
        let m = tridiag(12);
        let lu = m.factor().unwrap();
        let inv = m.to_dense().try_inverse().unwrap();
        let exact = (0..12)
            .map(|c| inv.column(c).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let est = inverse_norm1_estimate(&lu).unwrap();
        assert!(est <= exact * (1.0 + 1e-12) && est >= 0.3 * exact, "{est} vs {exact}");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut m = SparseMatrix::new(2);
        m.push(0, 0, 1.0);
        m.push(0, 1, 1.0);
        m.push(1, 0, 1.0);
        m.push(1, 1, 1.0);
        let outcome = m.factor().and_then(|lu| lu.solve(&[1.0, 2.0]));
        assert!(matches!(outcome, Err(Error::Singular(_))));
    }
}
