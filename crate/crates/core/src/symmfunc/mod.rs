//! Symmetric functions on the positive cone.
//!
//! Elementary symmetric polynomials, the built-in curvature functions
//! (Gauss curvature `Det^{1/n}` and the curvature quotients `f_{n,k}`),
//! user supplied symmetric functions, and the monotone limit `f_∞` obtained by
//! sending the last principal curvature to infinity.

mod axioms;

pub use axioms::{check_axioms, AxiomCheck, AxiomConfig, AxiomReport, LimitClass};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Principal curvatures of a hypersurface at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueVector(Vec<f64>);

impl EigenvalueVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("eigenvalue vector must be non-empty".into()));
        }
        Ok(Self(values))
    }

    /// True when every component is strictly positive.
    pub fn in_cone(&self) -> bool {
        in_cone(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for EigenvalueVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn in_cone(x: &[f64]) -> bool {
    x.iter().all(|&v| v > 0.0 && v.is_finite())
}

/// All elementary symmetric polynomials `σ_0, ..., σ_kmax` of `x`.
///
/// One pass over the coefficients of `Π (1 + x_i s)`; O(n·kmax) and free of
/// cancellation for positive inputs.
pub fn elementary_symmetric(x: &[f64], kmax: usize) -> Vec<f64> {
    let kmax = kmax.min(x.len());
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for k in (1..=kmax.min(i + 1)).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e
}

/// The `k`-th elementary symmetric polynomial, `σ_0 = 1`.
pub fn sigma(k: usize, x: &[f64]) -> Result<f64> {
    if k > x.len() {
        return Err(Error::Argument(format!(
            "sigma index {k} exceeds vector length {}",
            x.len()
        )));
    }
    Ok(elementary_symmetric(x, k)[k])
}

/// `σ_k` of `x` with component `skip` removed.
fn sigma_without(k: usize, x: &[f64], skip: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    let mut seen = 0;
    for (i, &xi) in x.iter().enumerate() {
        if i == skip {
            continue;
        }
        seen += 1;
        for j in (1..=k.min(seen)).rev() {
            e[j] += xi * e[j - 1];
        }
    }
    e[k]
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// A symmetric function supplied by the caller.
pub type SymmetricFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum CurvatureKind {
    /// `(x_1 ··· x_n)^{1/n}`.
    GaussDeterminant,
    /// `c_{n,k} (σ_n / σ_k)^{1/(n-k)}`, `1 <= k < n`.
    Quotient { k: usize },
    Custom { name: String, f: SymmetricFn },
}

impl fmt::Debug for CurvatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvatureKind::GaussDeterminant => write!(f, "GaussDeterminant"),
            CurvatureKind::Quotient { k } => write!(f, "Quotient {{ k: {k} }}"),
            CurvatureKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A curvature function of `n` principal curvatures.
#[derive(Debug, Clone)]
pub struct CurvatureFunction {
    kind: CurvatureKind,
    n: usize,
}

/// Outcome of the limit `t → ∞` of `f(x_1, ..., x_{n-1}, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Finite(f64),
    Infinite,
}

impl LimitValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            LimitValue::Finite(v) => Some(v),
            LimitValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LimitValue::Infinite)
    }
}

impl CurvatureFunction {
    pub fn gauss(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("dimension must be at least 1".into()));
        }
        Ok(Self {
            kind: CurvatureKind::GaussDeterminant,
            n,
        })
    }

    pub fn quotient(n: usize, k: usize) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::Argument(format!(
                "curvature quotient requires 1 <= k < n, got n={n}, k={k}"
            )));
        }
        Ok(Self {
            kind: CurvatureKind::Quotient { k },
            n,
        })
    }

    pub fn custom<F>(name: impl Into<String>, n: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if n == 0 {
            return Err(Error::Argument("dimension must be at least 1".into()));
        }
        Ok(Self {
            kind: CurvatureKind::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
            n,
        })
    }

    pub fn kind(&self) -> &CurvatureKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, CurvatureKind::Custom { .. })
    }

    /// Short label used in reports, e.g. `quotient(3,1)`.
    pub fn label(&self) -> String {
        match &self.kind {
            CurvatureKind::GaussDeterminant => format!("gauss({})", self.n),
            CurvatureKind::Quotient { k } => format!("quotient({},{k})", self.n),
            CurvatureKind::Custom { name, .. } => format!("custom:{name}({})", self.n),
        }
    }

    /// The normalising constant `binom(n,k)^{1/(n-k)}` of a quotient, 1 otherwise.
    pub fn normalization(&self) -> f64 {
        match self.kind {
            CurvatureKind::Quotient { k } => {
                binomial(self.n, k).powf(1.0 / (self.n - k) as f64)
            }
            _ => 1.0,
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Argument(format!(
                "{} expects {} arguments, got {}",
                self.label(),
                self.n,
                x.len()
            )));
        }
        Ok(())
    }

    /// Evaluates `f` on the open cone.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        if !in_cone(x) {
            let min_value = x.iter().cloned().fold(f64::INFINITY, f64::min);
            return Err(Error::Domain { min_value });
        }
        self.eval_unchecked(x)
    }

    /// Evaluates `f` on the closed cone; built-ins vanish on its boundary.
    pub fn eval_closed(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        if x.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            let min_value = x.iter().cloned().fold(f64::INFINITY, f64::min);
            return Err(Error::Domain { min_value });
        }
        if self.is_builtin() && x.iter().any(|&v| v == 0.0) {
            return Ok(0.0);
        }
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &[f64]) -> Result<f64> {
        let n = self.n;
        match &self.kind {
            CurvatureKind::GaussDeterminant => {
                let sorted = sorted(x);
                Ok(sorted.iter().product::<f64>().powf(1.0 / n as f64))
            }
            CurvatureKind::Quotient { k } => {
                let sorted = sorted(x);
                let e = elementary_symmetric(&sorted, n);
                let l = (n - k) as f64;
                Ok(self.normalization() * (e[n] / e[*k]).powf(1.0 / l))
            }
            CurvatureKind::Custom { f, .. } => {
                let v = f(x);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Evaluation {
                        sample: x.to_vec(),
                        reason: format!("custom function returned {v}"),
                    });
                }
                Ok(v)
            }
        }
    }

    /// Partial derivatives `∂_i f(x)` on the open cone.
    ///
    /// Closed forms for built-ins; central differences with component-relative
    /// steps for custom functions.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let value = self.eval(x)?;
        let n = self.n;
        match self.kind {
            CurvatureKind::GaussDeterminant => {
                Ok(x.iter().map(|&xi| value / (n as f64 * xi)).collect())
            }
            CurvatureKind::Quotient { k } => {
                let sk = sigma_without(k, x, usize::MAX);
                let l = (n - k) as f64;
                // ∂_i log f = σ_k(x without i) / (l x_i σ_k(x))
                Ok((0..n)
                    .map(|i| value * sigma_without(k, x, i) / (l * x[i] * sk))
                    .collect())
            }
            CurvatureKind::Custom { .. } => central_gradient(|y| self.eval(y), x, 1e-5),
        }
    }

    /// Closed form of `f_∞` where one is known.
    pub fn limit_closed_form(&self, head: &[f64]) -> Option<LimitValue> {
        match self.kind {
            CurvatureKind::GaussDeterminant => Some(LimitValue::Infinite),
            CurvatureKind::Quotient { k } => {
                let n = self.n;
                let e = elementary_symmetric(head, n - 1);
                let l = (n - k) as f64;
                Some(LimitValue::Finite(
                    self.normalization() * (e[n - 1] / e[k - 1]).powf(1.0 / l),
                ))
            }
            CurvatureKind::Custom { .. } => None,
        }
    }
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Central-difference gradient with steps `rel * x_i`.
pub(crate) fn central_gradient<F>(f: F, x: &[f64], rel: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut y = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = rel * x[i].abs().max(f64::MIN_POSITIVE);
        y[i] = x[i] + h;
        let fp = f(&y)?;
        y[i] = x[i] - h;
        let fm = f(&y)?;
        y[i] = x[i];
        g.push((fp - fm) / (2.0 * h));
    }
    Ok(g)
}

/// Tuning of the numerical limit `t → ∞`.
#[derive(Debug, Clone, Copy)]
pub struct LimitOptions {
    /// Relative change between consecutive samples that counts as converged.
    pub tol: f64,
    /// Values beyond `divergence_factor * f(x, t_0)` count as divergent.
    pub divergence_factor: f64,
    /// Schedule `t_j = t_0 · 4^j` for `j <= max_steps`.
    pub max_steps: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            divergence_factor: 1e8,
            max_steps: 30,
        }
    }
}

/// Numerically estimates `f_∞(x) = lim_{t→∞} f(x, t)` for `x ∈ Γ^{n-1}`.
///
/// The schedule starts at `t_0 = max(1, max x_i)` so that the estimate is
/// exactly homogeneous under positive rescaling of `x` by powers of two.
/// A schedule that never settles is classified as infinite.
pub fn f_infinity(f: &CurvatureFunction, head: &[f64], opts: LimitOptions) -> Result<LimitValue> {
    let n = f.dim();
    if head.len() + 1 != n {
        return Err(Error::Argument(format!(
            "f_infinity of {} expects {} arguments, got {}",
            f.label(),
            n - 1,
            head.len()
        )));
    }
    if !in_cone(head) {
        let min_value = head.iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(Error::Domain { min_value });
    }
    let t0 = head.iter().cloned().fold(1.0, f64::max);
    let mut x = head.to_vec();
    x.push(t0);
    let first = f.eval(&x)?;
    let ceiling = opts.divergence_factor * first;
    let mut prev = first;
    let mut t = t0;
    for _ in 0..opts.max_steps {
        t *= 4.0;
        x[n - 1] = t;
        let v = f.eval(&x)?;
        if v < prev * (1.0 - 1e-12) {
            return Err(Error::Inconsistency(format!(
                "f(x, t) decreased from {prev} to {v} at t = {t:e}; not elliptic"
            )));
        }
        if v > ceiling {
            return Ok(LimitValue::Infinite);
        }
        if (v - prev).abs() <= opts.tol * v {
            // error behaves like C/t: one Richardson step for ratio 4
            return Ok(LimitValue::Finite(v + (v - prev) / 3.0));
        }
        prev = v;
    }
    Ok(LimitValue::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Brute-force σ_k over all index subsets.
    fn sigma_enumerated(k: usize, x: &[f64]) -> f64 {
        let n = x.len();
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| x[i]).product::<f64>())
            .sum()
    }

    #[test]
    fn sigma_small_cases() {
        assert_eq!(sigma(2, &[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(sigma(1, &[2.0, 3.0]).unwrap(), 5.0);
        assert_eq!(sigma(3, &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(sigma(0, &[4.0]).unwrap(), 1.0);
        assert!(matches!(sigma(4, &[1.0, 2.0, 3.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn sigma_matches_enumeration() {
        let x = [0.3, 1.7, 2.2, 0.9, 4.1, 1.3, 0.05];
        for k in 0..=x.len() {
            assert_relative_eq!(
                sigma(k, &x).unwrap(),
                sigma_enumerated(k, &x),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn builtins_normalised_at_one() {
        for n in 2..7 {
            for k in 1..n {
                let f = CurvatureFunction::quotient(n, k).unwrap();
                assert_relative_eq!(f.eval(&vec![1.0; n]).unwrap(), 1.0, epsilon = 1e-14);
            }
            let g = CurvatureFunction::gauss(n).unwrap();
            assert_relative_eq!(g.eval(&vec![1.0; n]).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eval_examples() {
        let g = CurvatureFunction::gauss(2).unwrap();
        assert_relative_eq!(g.eval(&[4.0, 1.0]).unwrap(), 2.0, epsilon = 1e-15);
        // σ_3 = 2, σ_1 = 4, c = √3
        let q = CurvatureFunction::quotient(3, 1).unwrap();
        assert_relative_eq!(q.eval(&[1.0, 1.0, 2.0]).unwrap(), 1.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn quotient_range_is_enforced() {
        assert!(CurvatureFunction::quotient(3, 3).is_err());
        assert!(CurvatureFunction::quotient(3, 0).is_err());
    }

    #[test]
    fn domain_errors() {
        let q = CurvatureFunction::quotient(3, 1).unwrap();
        assert!(matches!(q.eval(&[1.0, 0.0, 2.0]), Err(Error::Domain { .. })));
        assert_eq!(q.eval_closed(&[1.0, 0.0, 2.0]).unwrap(), 0.0);
        assert!(q.eval(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn closed_form_gradients_match_differences() {
        let x = [0.7, 2.3, 1.1, 0.4];
        for f in [
            CurvatureFunction::gauss(4).unwrap(),
            CurvatureFunction::quotient(4, 1).unwrap(),
            CurvatureFunction::quotient(4, 2).unwrap(),
            CurvatureFunction::quotient(4, 3).unwrap(),
        ] {
            let exact = f.gradient(&x).unwrap();
            let fd = central_gradient(|y| f.eval(y), &x, 1e-5).unwrap();
            for (a, b) in exact.iter().zip(&fd) {
                assert_relative_eq!(a, b, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn limit_gauss_is_infinite() {
        let g = CurvatureFunction::gauss(3).unwrap();
        let v = f_infinity(&g, &[1.0, 2.0], LimitOptions::default()).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn limit_quotient_3_1() {
        let q = CurvatureFunction::quotient(3, 1).unwrap();
        let v = f_infinity(&q, &[1.0, 1.0], LimitOptions::default()).unwrap();
        assert_relative_eq!(v.finite().unwrap(), 3f64.sqrt(), max_relative = 1e-10);
        // direct evaluation far out on the ray
        let far = q.eval(&[1.0, 1.0, 1e8]).unwrap();
        assert_relative_eq!(far, 3f64.sqrt(), max_relative = 1e-7);
    }

    #[test]
    fn limit_is_homogeneous() {
        let q = CurvatureFunction::quotient(4, 2).unwrap();
        let x = [0.3, 1.9, 0.8];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = f_infinity(&q, &x, LimitOptions::default()).unwrap().finite().unwrap();
        let b = f_infinity(&q, &x2, LimitOptions::default()).unwrap().finite().unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-10);
    }

    #[test]
    fn non_monotone_function_is_reported() {
        let f = CurvatureFunction::custom("bump", 2, |x: &[f64]| {
            (x[0] * x[1]).sqrt() / (1.0 + (x[1] - 50.0).powi(2))
        })
        .unwrap();
        assert!(matches!(
            f_infinity(&f, &[1.0], LimitOptions::default()),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn custom_nan_is_an_evaluation_error() {
        let f = CurvatureFunction::custom("nan", 2, |_x: &[f64]| f64::NAN).unwrap();
        assert!(matches!(f.eval(&[1.0, 1.0]), Err(Error::Evaluation { .. })));
    }
}
