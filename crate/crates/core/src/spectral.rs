//! Curvature functions of symmetric matrices and their derivatives.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::symmfunc::{CurvatureFunction, CurvatureKind, LimitValue};

/// Symmetric matrix with a cached eigen-decomposition.
///
/// Eigenvalues are stored in descending order; column `i` of
/// [`eigenvectors`](Self::eigenvectors) belongs to eigenvalue `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrix {
    entries: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralMatrix {
    /// Symmetrises `m` as `(m + mᵀ)/2` and decomposes it.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Argument(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("matrix has non-finite entries".into()));
        }
        let entries = (&m + m.transpose()) * 0.5;
        let eig = entries.clone().symmetric_eigen();
        let n = entries.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self {
            entries,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Argument(format!(
                "expected {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is a valid matrix")
    }

    /// `Q diag(λ) Qᵀ` for an orthonormal `q`.
    pub fn from_frame(q: &DMatrix<f64>, lambda: &[f64]) -> Result<Self> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lambda));
        Self::new(q * d * q.transpose())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// `‖Q Λ Qᵀ − M‖_F`.
    pub fn reconstruction_error(&self) -> f64 {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.eigenvalues));
        (&self.eigenvectors * d * self.eigenvectors.transpose() - &self.entries).norm()
    }

    /// `M` expressed in `frame`, i.e. `Qᵀ M Q`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> DMatrix<f64> {
        frame.transpose() * &self.entries * frame
    }
}

/// The derivative `B = DF_A`, characterised by `DF_A(M) = Tr(BM)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeMatrix {
    matrix: DMatrix<f64>,
    /// `∂_i f(λ)` in the order of the source eigenvalues (descending λ).
    partials: Vec<f64>,
    /// Eigenvalues of `B`, ascending.
    mu: Vec<f64>,
}

impl DerivativeMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues `μ_1 ≤ … ≤ μ_n`.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Eigenvalues of `B` paired with the eigenvalues of `A` in descending order.
    pub fn partials(&self) -> &[f64] {
        &self.partials
    }

    pub fn trace(&self) -> f64 {
        self.partials.iter().sum()
    }

    /// `Tr(BM)`.
    pub fn apply(&self, m: &DMatrix<f64>) -> f64 {
        self.matrix.component_mul(m).sum()
    }
}

/// Threshold below which two eigenvalues are treated as equal.
pub fn gap_tolerance(a: &SpectralMatrix) -> f64 {
    1e-8 * a.norm().max(f64::MIN_POSITIVE)
}

fn check_dim(f: &CurvatureFunction, a: &SpectralMatrix) -> Result<()> {
    if f.dim() != a.dim() {
        return Err(Error::Argument(format!(
            "{} acts on {}x{} matrices, got {}x{}",
            f.label(),
            f.dim(),
            f.dim(),
            a.dim(),
            a.dim()
        )));
    }
    Ok(())
}

fn require_cone(a: &SpectralMatrix) -> Result<()> {
    if !a.is_positive_definite() {
        return Err(Error::Domain {
            min_value: a.min_eigenvalue(),
        });
    }
    Ok(())
}

/// `F(A) = f(λ(A))`.
pub fn k_of_matrix(f: &CurvatureFunction, a: &SpectralMatrix) -> Result<f64> {
    check_dim(f, a)?;
    require_cone(a)?;
    f.eval(a.eigenvalues())
}

/// `B = Q diag(∂f(λ)) Qᵀ`.
///
/// Custom functions are differentiated numerically; their partials must agree
/// on clusters of equal eigenvalues, and are averaged there so that `B` does
/// not depend on the arbitrary choice of eigenvectors inside a cluster.
pub fn dk_matrix(f: &CurvatureFunction, a: &SpectralMatrix) -> Result<DerivativeMatrix> {
    check_dim(f, a)?;
    require_cone(a)?;
    let lambda = a.eigenvalues();
    let mut partials = f.gradient(lambda)?;
    if let CurvatureKind::Custom { .. } = f.kind() {
        let gap = gap_tolerance(a);
        let n = lambda.len();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && lambda[end - 1] - lambda[end] <= gap {
                end += 1;
            }
            let cluster = &partials[start..end];
            let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
            let spread = cluster.iter().map(|p| (p - mean).abs()).fold(0.0, f64::max);
            if spread > 1e-6 * mean.abs().max(1e-300) {
                return Err(Error::Inconsistency(format!(
                    "partials {cluster:?} differ on equal eigenvalues; the function is not symmetric"
                )));
            }
            for p in &mut partials[start..end] {
                *p = mean;
            }
            start = end;
        }
    }
    let q = a.eigenvectors();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&partials));
    let matrix = q * d * q.transpose();
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    let mut mu = partials.clone();
    mu.sort_by(f64::total_cmp);
    Ok(DerivativeMatrix {
        matrix,
        partials,
        mu,
    })
}

/// `DF_A(M) = Tr(BM)`.
pub fn directional_first(
    f: &CurvatureFunction,
    a: &SpectralMatrix,
    m: &SpectralMatrix,
) -> Result<f64> {
    if m.dim() != a.dim() {
        return Err(Error::Argument("matrix dimensions differ".into()));
    }
    Ok(dk_matrix(f, a)?.apply(m.entries()))
}

/// Second directional derivative and the eigenframe pair-sum bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivative {
    /// `D²F_A(M, M)` by central differences.
    pub value: f64,
    /// `Σ_{i≠j} (μ_j − μ_i)/(λ_i − λ_j) M̃_ij²`, or `None` when two eigenvalues
    /// of `A` are closer than the gap tolerance.
    pub pair_sum: Option<f64>,
    /// Step used for the differences.
    pub step: f64,
}

impl SecondDerivative {
    pub fn is_degenerate(&self) -> bool {
        self.pair_sum.is_none()
    }

    /// `−D²F(M,M) ≥ pair_sum − tol`, vacuous when degenerate.
    pub fn refined_bound_holds(&self, tol: f64) -> bool {
        self.pair_sum.map_or(true, |s| -self.value >= s - tol)
    }
}

/// `D²F_A(M, M)` with step `min(1e-4‖A‖, λ_min/2)/‖M‖`.
pub fn directional_second(
    f: &CurvatureFunction,
    a: &SpectralMatrix,
    m: &SpectralMatrix,
) -> Result<SecondDerivative> {
    check_dim(f, a)?;
    require_cone(a)?;
    if m.dim() != a.dim() {
        return Err(Error::Argument("matrix dimensions differ".into()));
    }
    let mnorm = m.norm();
    let deriv = dk_matrix(f, a)?;
    let lambda = a.eigenvalues();
    let gap = gap_tolerance(a);
    let n = lambda.len();
    let distinct = (1..n).all(|i| lambda[i - 1] - lambda[i] > gap);
    let pair_sum = distinct.then(|| {
        let mt = m.in_frame(a.eigenvectors());
        let mu = deriv.partials();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += (mu[j] - mu[i]) / (lambda[i] - lambda[j]) * mt[(i, j)].powi(2);
                }
            }
        }
        s
    });
    if mnorm == 0.0 {
        return Ok(SecondDerivative {
            value: 0.0,
            pair_sum,
            step: 0.0,
        });
    }
    let h = (1e-4 * a.norm()).min(0.5 * a.min_eigenvalue()) / mnorm;
    let shifted = |s: f64| -> Result<f64> {
        let b = SpectralMatrix::new(a.entries() + m.entries() * s)?;
        k_of_matrix(f, &b)
    };
    let value = (shifted(h)? - 2.0 * k_of_matrix(f, a)? + shifted(-h)?) / (h * h);
    Ok(SecondDerivative {
        value,
        pair_sum,
        step: h,
    })
}

/// Tuning of [`mu_infinity_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct MuInfinityConfig {
    /// Random base eigenvalue vectors in addition to the isotropic one.
    pub samples: usize,
    /// Anisotropy ratios applied to the largest eigenvalue, increasing.
    pub schedule: Vec<f64>,
    /// Fraction of the schedule, counted from its end, forming the tail.
    pub tail_fraction: f64,
    /// Log-log slope of the tail above which the liminf is declared infinite.
    pub slope_threshold: f64,
    /// Tail minima above this are declared infinite regardless of slope.
    pub divergence_threshold: f64,
    pub seed: u64,
}

impl Default for MuInfinityConfig {
    fn default() -> Self {
        Self {
            samples: 64,
            schedule: geometric_schedule(1e6, 24),
            tail_fraction: 0.25,
            slope_threshold: 0.02,
            divergence_threshold: 1e8,
            seed: 0,
        }
    }
}

/// `steps + 1` ratios from 1 to `max_ratio`, geometrically spaced.
pub fn geometric_schedule(max_ratio: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|j| max_ratio.powf(j as f64 / steps.max(1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuInfinityEstimate {
    /// Minimum of `Tr(B)` over the tail, or `Infinite` when the tail grows.
    pub estimate: LimitValue,
    /// Smallest `Tr(B)` over all samples at the tail points only.
    pub tail_minimum: f64,
    pub schedule: Vec<f64>,
    /// Minimum of `Tr(B)` over samples, one entry per schedule ratio.
    pub curve: Vec<f64>,
    /// Least-squares slope of `log Tr(B)` against `log ratio` over the tail.
    pub tail_slope: f64,
}

/// Probes `liminf Tr(DK_A)` over `K(A) = 1` as `A` becomes anisotropic.
///
/// For functions other than the built-ins this is an upper bound probe only:
/// the rays sampled here need not realise the liminf.
pub fn mu_infinity_estimate(
    f: &CurvatureFunction,
    cfg: &MuInfinityConfig,
) -> Result<MuInfinityEstimate> {
    let n = f.dim();
    if cfg.schedule.len() < 2 || cfg.schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument(
            "the anisotropy schedule needs at least two increasing ratios".into(),
        ));
    }
    if !(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0) {
        return Err(Error::Argument("tail_fraction must lie in (0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bases = vec![vec![1.0; n]];
    for _ in 0..cfg.samples {
        bases.push((0..n).map(|_| rng.gen_range(0.0..10f64.ln()).exp()).collect());
    }
    for x in bases.iter().take(8) {
        let fx = f.eval(x)?;
        let fy = f.eval(&x.iter().map(|v| 3.0 * v).collect::<Vec<_>>())?;
        if (fy - 3.0 * fx).abs() > 1e-8 * 3.0 * fx {
            return Err(Error::Precondition(format!(
                "{} is not homogeneous of degree one at {x:?}",
                f.label()
            )));
        }
    }

    let mut curve = Vec::with_capacity(cfg.schedule.len());
    for &ratio in &cfg.schedule {
        let mut best = f64::INFINITY;
        for base in &bases {
            let imax = base
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .expect("n >= 1");
            let mut x = base.clone();
            x[imax] *= ratio;
            // Tr(B) is invariant under the rescaling onto K = 1.
            let fx = f.eval(&x)?;
            let scaled: Vec<f64> = x.iter().map(|v| v / fx).collect();
            let tr: f64 = f.gradient(&scaled)?.iter().sum();
            best = best.min(tr);
        }
        curve.push(best);
    }

    let len = cfg.schedule.len();
    let tail_len = ((len as f64 * cfg.tail_fraction).ceil() as usize).clamp(2, len);
    let tail = len - tail_len..len;
    let tail_minimum = curve[tail.clone()].iter().cloned().fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = cfg.schedule[tail.clone()].iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = curve[tail].iter().map(|c| c.ln()).collect();
    let tail_slope = least_squares_slope(&xs, &ys);
    let divergent = tail_slope > cfg.slope_threshold || tail_minimum > cfg.divergence_threshold;
    Ok(MuInfinityEstimate {
        estimate: if divergent {
            LimitValue::Infinite
        } else {
            LimitValue::Finite(tail_minimum)
        },
        tail_minimum,
        schedule: cfg.schedule.clone(),
        curve,
        tail_slope,
    })
}

/// Known value of `μ_∞` for the built-in functions.
pub fn mu_infinity_closed_form(f: &CurvatureFunction) -> Option<LimitValue> {
    match f.kind() {
        CurvatureKind::GaussDeterminant => Some(LimitValue::Infinite),
        CurvatureKind::Quotient { k } => {
            let (n, k) = (f.dim() as f64, *k as f64);
            Some(LimitValue::Finite((n / k).powf(1.0 / (n - k))))
        }
        CurvatureKind::Custom { .. } => None,
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Random orthogonal matrix from the QR factorisation of a Gaussian-like matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        if r[(c, c)] < 0.0 {
            for row in 0..n {
                q[(row, c)] = -q[(row, c)];
            }
        }
    }
    q
}
