//! Sampled verification of the curvature-function axioms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{f_infinity, CurvatureFunction, LimitOptions, LimitValue};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct AxiomConfig {
    pub sample_count: usize,
    /// Generic tolerance for symmetry and normalisation.
    pub tol: f64,
    pub seed: u64,
    /// Components are drawn log-uniformly from this range.
    pub range: (f64, f64),
    pub homogeneity_tol: f64,
    /// Largest admissible eigenvalue of the scaled Hessian, relative to `f(x)`.
    pub concavity_tol: f64,
    pub gradient_step: f64,
    pub hessian_step: f64,
    /// Largest admissible `f(x_ε)/f(x)` when the smallest component is shrunk by `1e-12`.
    pub decay_tol: f64,
    pub limit: LimitOptions,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self {
            sample_count: 1000,
            tol: 1e-12,
            seed: 0,
            range: (1e-3, 1e3),
            homogeneity_tol: 1e-10,
            concavity_tol: 1e-6,
            gradient_step: 1e-5,
            hessian_step: 1e-4,
            decay_tol: 1e-2,
            limit: LimitOptions::default(),
        }
    }
}

/// Result for one axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    /// Roman numeral of the axiom, `vii'` for the finite-limit variant.
    pub axiom: String,
    pub description: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst_margin: f64,
    pub tol: f64,
    /// Sample at which the worst value occurred.
    pub worst_sample: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitClass {
    /// `f_∞` infinite at every sample.
    Infinite,
    /// `f_∞` finite at every sample.
    Finite,
    /// Both behaviours observed, which no admissible function can show.
    Mixed,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub function: String,
    pub n: usize,
    pub samples: usize,
    pub checks: Vec<AxiomCheck>,
    pub limit_class: LimitClass,
    /// Constant `C` of the bound `f(x,t) <= f_∞(x) - C/t`, least-squares fit.
    pub decay_constant: Option<f64>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    /// The first six axioms only.
    pub fn admissible(&self) -> bool {
        ["i", "ii", "iii", "iv", "v", "vi"]
            .iter()
            .all(|a| self.check(a).map_or(false, |c| c.passed))
    }
}

/// Tracks the largest value seen together with its sample.
struct Worst {
    value: f64,
    sample: Option<Vec<f64>>,
}

impl Worst {
    fn new(start: f64) -> Self {
        Self {
            value: start,
            sample: None,
        }
    }

    fn max(&mut self, v: f64, x: &[f64]) {
        if v > self.value || v.is_nan() {
            self.value = v;
            self.sample = Some(x.to_vec());
        }
    }

    fn min(&mut self, v: f64, x: &[f64]) {
        if v < self.value || v.is_nan() {
            self.value = v;
            self.sample = Some(x.to_vec());
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|_| rng.gen_range(a..b).exp()).collect()
}

/// Hessian of `f` scaled by `diag(x)` on both sides, from relative steps.
///
/// Congruence by a positive diagonal preserves definiteness, and the scaled
/// entries are `O(f)` regardless of the anisotropy of `x`.
fn scaled_hessian(f: &CurvatureFunction, x: &[f64], delta: f64) -> Result<nalgebra::DMatrix<f64>> {
    let n = x.len();
    let f0 = f.eval(x)?;
    let mut h = nalgebra::DMatrix::zeros(n, n);
    let mut y = x.to_vec();
    for i in 0..n {
        y[i] = x[i] * (1.0 + delta);
        let fp = f.eval(&y)?;
        y[i] = x[i] * (1.0 - delta);
        let fm = f.eval(&y)?;
        y[i] = x[i];
        h[(i, i)] = (fp - 2.0 * f0 + fm) / (delta * delta);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                y[i] = x[i] * (1.0 + si * delta);
                y[j] = x[j] * (1.0 + sj * delta);
                let v = f.eval(&y);
                y[i] = x[i];
                y[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)?
                + corner(-1.0, -1.0)?)
                / (4.0 * delta * delta);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

fn relative_gradient<F>(g: F, x: &[f64], delta: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    // x_i ∂_i g(x)
    let mut y = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        y[i] = x[i] * (1.0 + delta);
        let gp = g(&y)?;
        y[i] = x[i] * (1.0 - delta);
        let gm = g(&y)?;
        y[i] = x[i];
        out.push((gp - gm) / (2.0 * delta));
    }
    Ok(out)
}

/// Samples `Γⁿ` and checks axioms (i) through (vii)/(vii').
///
/// The report is a deterministic function of `f` and `cfg`.
pub fn check_axioms(f: &CurvatureFunction, cfg: &AxiomConfig) -> Result<AxiomReport> {
    if cfg.sample_count == 0 {
        return Err(Error::Argument("sample_count must be at least 1".into()));
    }
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<Vec<f64>> = (0..cfg.sample_count)
        .map(|_| log_uniform(&mut rng, n, cfg.range))
        .collect();

    let mut symmetry = Worst::new(0.0);
    let mut homogeneity = Worst::new(0.0);
    let mut positivity = Worst::new(f64::INFINITY);
    let mut decay = Worst::new(0.0);
    let mut ellipticity = Worst::new(f64::INFINITY);
    let mut concavity = Worst::new(f64::NEG_INFINITY);

    let ln_range = (cfg.range.0.ln(), cfg.range.1.ln());
    for x in &samples {
        let fx = f.eval(x)?;

        let mut perm = x.clone();
        perm.shuffle(&mut rng);
        symmetry.max((f.eval(&perm)? - fx).abs() / fx.abs().max(f64::MIN_POSITIVE), x);

        let t = rng.gen_range(ln_range.0..ln_range.1).exp();
        let scaled: Vec<f64> = x.iter().map(|v| t * v).collect();
        homogeneity.max((f.eval(&scaled)? - t * fx).abs() / (t * fx), x);

        positivity.min(fx, x);
        let (imin, xmin) = x
            .iter()
            .cloned()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        let mut squeezed = x.clone();
        squeezed[imin] = xmin * 1e-12;
        let mut ratio = f.eval(&squeezed)? / fx;
        squeezed[imin] = 0.0;
        if let Ok(edge) = f.eval_closed(&squeezed) {
            ratio = ratio.max(edge / fx);
        }
        decay.max(ratio, x);

        let grad = relative_gradient(|y| f.eval(y), x, cfg.gradient_step)?;
        for g in grad {
            ellipticity.min(g / fx, x);
        }

        let h = scaled_hessian(f, x, cfg.hessian_step)?;
        let top = h
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        concavity.max(top / fx, x);
    }

    let normalization = (f.eval(&vec![1.0; n])? - 1.0).abs();

    let mut checks = vec![
        AxiomCheck {
            axiom: "i".into(),
            description: "permutation symmetry, relative |f(x_s) - f(x)|",
            passed: symmetry.value <= cfg.tol,
            worst_margin: symmetry.value,
            tol: cfg.tol,
            worst_sample: symmetry.sample,
        },
        AxiomCheck {
            axiom: "ii".into(),
            description: "homogeneity of degree one, |f(tx) - t f(x)| / t f(x)",
            passed: homogeneity.value <= cfg.homogeneity_tol,
            worst_margin: homogeneity.value,
            tol: cfg.homogeneity_tol,
            worst_sample: homogeneity.sample,
        },
        AxiomCheck {
            axiom: "iii".into(),
            description: "normalisation, |f(1,...,1) - 1|",
            passed: normalization <= cfg.tol,
            worst_margin: normalization,
            tol: cfg.tol,
            worst_sample: Some(vec![1.0; n]),
        },
        AxiomCheck {
            axiom: "iv".into(),
            description: "vanishing on the cone boundary, worst f(x_eps)/f(x)",
            passed: positivity.value > 0.0 && decay.value <= cfg.decay_tol,
            worst_margin: decay.value,
            tol: cfg.decay_tol,
            worst_sample: decay.sample,
        },
        AxiomCheck {
            axiom: "v".into(),
            description: "strict ellipticity, min x_i d_i f / f",
            passed: ellipticity.value > 0.0,
            worst_margin: ellipticity.value,
            tol: 0.0,
            worst_sample: ellipticity.sample,
        },
        AxiomCheck {
            axiom: "vi".into(),
            description: "concavity, max eigenvalue of the scaled Hessian / f",
            passed: concavity.value <= cfg.concavity_tol,
            worst_margin: concavity.value,
            tol: cfg.concavity_tol,
            worst_sample: concavity.sample,
        },
    ];

    let (limit_check, limit_class, decay_constant) = check_limit(f, &samples, cfg)?;
    checks.push(limit_check);

    Ok(AxiomReport {
        function: f.label(),
        n,
        samples: cfg.sample_count,
        checks,
        limit_class,
        decay_constant,
    })
}

fn check_limit(
    f: &CurvatureFunction,
    samples: &[Vec<f64>],
    cfg: &AxiomConfig,
) -> Result<(AxiomCheck, LimitClass, Option<f64>)> {
    let n = f.dim();
    let mut limits = Vec::with_capacity(samples.len());
    for x in samples {
        limits.push(f_infinity(f, &x[..n - 1], cfg.limit)?);
    }
    let finite = limits.iter().filter(|l| !l.is_infinite()).count();
    let class = if finite == 0 {
        LimitClass::Infinite
    } else if finite == limits.len() {
        LimitClass::Finite
    } else {
        LimitClass::Mixed
    };

    match class {
        LimitClass::Infinite => Ok((
            AxiomCheck {
                axiom: "vii".into(),
                description: "f_inf infinite at every sample",
                passed: true,
                worst_margin: 0.0,
                tol: 0.0,
                worst_sample: None,
            },
            class,
            None,
        )),
        LimitClass::Mixed => Ok((
            AxiomCheck {
                axiom: "vii".into(),
                description: "f_inf neither everywhere finite nor everywhere infinite",
                passed: false,
                worst_margin: finite as f64 / limits.len() as f64,
                tol: 0.0,
                worst_sample: None,
            },
            class,
            None,
        )),
        LimitClass::Finite => {
            // (a) strict ellipticity of the limit, (b) decay at rate 1/t.
            let mut elliptic = Worst::new(f64::INFINITY);
            let mut decay = Worst::new(f64::INFINITY);
            let mut fit_min = f64::INFINITY;
            for (x, lim) in samples.iter().zip(&limits) {
                let head = &x[..n - 1];
                let finf = lim.finite().unwrap_or(f64::NAN);
                if n > 1 {
                    let grad = relative_gradient(
                        |y| match f_infinity(f, y, cfg.limit)? {
                            LimitValue::Finite(v) => Ok(v),
                            LimitValue::Infinite => Ok(f64::INFINITY),
                        },
                        head,
                        cfg.gradient_step,
                    )?;
                    for g in grad {
                        elliptic.min(g / finf, head);
                    }
                }
                let big = head.iter().cloned().fold(1.0, f64::max) * 1e3;
                let mut y = head.to_vec();
                y.push(0.0);
                let (mut sn, mut sd) = (0.0, 0.0);
                for j in 0..=8 {
                    let t = big * 2f64.powf(j as f64 / 4.0);
                    y[n - 1] = t;
                    let gap = finf - f.eval(&y)?;
                    decay.min(t * gap, head);
                    sn += gap / t;
                    sd += 1.0 / (t * t);
                }
                fit_min = fit_min.min(sn / sd);
            }
            let passed = elliptic.value > 0.0 && decay.value > 0.0;
            let margin = elliptic.value.min(decay.value);
            let sample = if elliptic.value <= decay.value {
                elliptic.sample
            } else {
                decay.sample
            };
            Ok((
                AxiomCheck {
                    axiom: "vii'".into(),
                    description: "f_inf finite, strictly elliptic, f(x,t) <= f_inf(x) - C/t",
                    passed,
                    worst_margin: margin,
                    tol: 0.0,
                    worst_sample: sample,
                },
                class,
                Some(fit_min),
            ))
        }
    }
}
