//! Linearisation of the curvature operator, the operator `Δ^K`, and the
//! stability operator `L_κ`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::grid::DomainGrid;
use super::prescription::Prescription;
use super::surface::{local_geometry, AmbientModel, GraphSurface, LocalGeometry};
use crate::error::{Error, Result};
use crate::linalg::{inverse_norm1_estimate, SparseMatrix};
use crate::spectral::{dk_matrix, k_of_matrix};
use crate::symmfunc::CurvatureFunction;

/// Partial derivatives of `K` with respect to the 2-jet `(u, Du, D²u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetDerivative {
    pub k: f64,
    pub d_u: f64,
    pub d_p: Vec<f64>,
    /// `dK = Σ_ij d_s[(i,j)] dS_ij` for symmetric `dS`.
    pub d_s: DMatrix<f64>,
}

/// `K` and its jet derivative at a point; the point must be admissible.
pub fn jet_derivative(
    model: AmbientModel,
    f: &CurvatureFunction,
    u: f64,
    p: &[f64],
    s: &DMatrix<f64>,
) -> Result<(LocalGeometry, JetDerivative)> {
    let lg = local_geometry(model, u, p, s)?;
    let k = k_of_matrix(f, &lg.shape)?;
    let b = dk_matrix(f, &lg.shape)?;
    let gi = &lg.g_inv_sqrt;
    let w = lg.w;
    let c = gi * b.matrix() * gi;
    let ab = lg.shape.entries() * b.matrix();
    let e = gi * ((&ab + ab.transpose()) * 0.5) * gi;
    let pv = nalgebra::DVector::from_column_slice(p);
    let ep = &e * &pv;
    let cp = &c * &pv;
    let n = p.len();
    let (d_u, d_p, d_s) = match model {
        AmbientModel::Euclidean => {
            let d_p = (0..n)
                .map(|i| -k * p[i] / (w * w) - 2.0 * ep[i])
                .collect();
            (0.0, d_p, -&c / w)
        }
        AmbientModel::HyperbolicHalfSpace => {
            let d_u = c.component_mul(s).sum() / w;
            let d_p = (0..n)
                .map(|i| 2.0 * cp[i] / w - k * p[i] / (w * w) - 2.0 * ep[i])
                .collect();
            (d_u, d_p, &c * (u / w))
        }
    };
    Ok((
        lg,
        JetDerivative {
            k,
            d_u,
            d_p,
            d_s,
        },
    ))
}

fn admissibility_error(surface: &GraphSurface, node: usize, err: Error) -> Error {
    match err {
        Error::Domain { min_value } => Error::Admissibility {
            node,
            min_eigenvalue: min_value,
        },
        Error::Precondition(_) if surface.model() == AmbientModel::HyperbolicHalfSpace => {
            Error::Admissibility {
                node,
                min_eigenvalue: f64::NAN,
            }
        }
        other => other,
    }
}

/// `K` at every interior node; fails at the first node outside the cone.
pub fn curvature_field(surface: &GraphSurface, f: &CurvatureFunction) -> Result<Vec<f64>> {
    (0..surface.grid().interior_len())
        .into_par_iter()
        .map(|k| {
            let (u, p, s) = surface.node_jet(k);
            let lg = local_geometry(surface.model(), u, &p, &s)
                .map_err(|e| admissibility_error(surface, k, e))?;
            k_of_matrix(f, &lg.shape).map_err(|e| admissibility_error(surface, k, e))
        })
        .collect()
}

/// `K` at interior nodes together with `∂K/∂u_j` over interior heights.
#[derive(Debug, Clone)]
pub struct CurvatureLinearization {
    pub k: Vec<f64>,
    pub jacobian: SparseMatrix,
    pub min_eigenvalue: f64,
    pub w: Vec<f64>,
    /// Unit normals, ambient coordinates.
    pub normals: Vec<Vec<f64>>,
}

pub fn linearize(surface: &GraphSurface, f: &CurvatureFunction) -> Result<CurvatureLinearization> {
    let grid = surface.grid();
    let n = grid.dim();
    let rows = (0..grid.interior_len())
        .into_par_iter()
        .map(|node| -> Result<_> {
            let (u, p, s) = surface.node_jet(node);
            let (lg, d) = jet_derivative(surface.model(), f, u, &p, &s)
                .map_err(|e| admissibility_error(surface, node, e))?;
            let st = grid.stencil(node);
            let mut row: Vec<(usize, f64)> = vec![(node, d.d_u)];
            for (a, form) in st.gradient.iter().enumerate() {
                for &(j, wt) in &form.interior {
                    row.push((j, d.d_p[a] * wt));
                }
            }
            let mut idx = 0;
            for a in 0..n {
                for b in a..n {
                    let coef = if a == b {
                        d.d_s[(a, a)]
                    } else {
                        d.d_s[(a, b)] + d.d_s[(b, a)]
                    };
                    match (grid.mixed_weight(node, &p), &st.mixed) {
                        (Some((w, dw)), Some([along, across])) if idx == 1 => {
                            for &(j, wt) in &along.interior {
                                row.push((j, coef * w * wt));
                            }
                            for &(j, wt) in &across.interior {
                                row.push((j, coef * (1.0 - w) * wt));
                            }
                            // the blend weight moves with the gradient
                            let gap = along.eval(surface.heights(), surface.boundary_values())
                                - across.eval(surface.heights(), surface.boundary_values());
                            let c = coef * gap * dw;
                            for &(j, wt) in &st.gradient[0].interior {
                                row.push((j, c * p[1] * wt));
                            }
                            for &(j, wt) in &st.gradient[1].interior {
                                row.push((j, c * p[0] * wt));
                            }
                        }
                        _ => {
                            for &(j, wt) in &st.hessian[idx].interior {
                                row.push((j, coef * wt));
                            }
                        }
                    }
                    idx += 1;
                }
            }
            Ok((d.k, row, lg.shape.min_eigenvalue(), lg.w, lg.normal))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut jac = SparseMatrix::new(grid.interior_len());
    let mut k = Vec::with_capacity(rows.len());
    let mut w = Vec::with_capacity(rows.len());
    let mut normals = Vec::with_capacity(rows.len());
    let mut min_eig = f64::INFINITY;
    for (i, (kv, row, me, wv, nv)) in rows.into_iter().enumerate() {
        for (j, v) in row {
            if v != 0.0 {
                jac.push(i, j, v);
            }
        }
        k.push(kv);
        w.push(wv);
        normals.push(nv);
        min_eig = min_eig.min(me);
    }
    Ok(CurvatureLinearization {
        k,
        jacobian: jac,
        min_eigenvalue: min_eig,
        w,
        normals,
    })
}

/// Smooth scalar function on the ambient space, in model coordinates.
pub trait AmbientFunction: Sync {
    fn value(&self, z: &[f64]) -> f64;
    /// Coordinate partial derivatives.
    fn gradient(&self, z: &[f64]) -> Vec<f64>;
    /// Coordinate second partial derivatives.
    fn hessian(&self, z: &[f64]) -> DMatrix<f64>;
}

/// Constant function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFunction(pub f64);

impl AmbientFunction for ConstantFunction {
    fn value(&self, _: &[f64]) -> f64 {
        self.0
    }
    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        vec![0.0; z.len()]
    }
    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(z.len(), z.len())
    }
}

/// `a·z + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunction {
    pub coefficients: Vec<f64>,
    pub offset: f64,
}

impl AmbientFunction for LinearFunction {
    fn value(&self, z: &[f64]) -> f64 {
        self.offset + self.coefficients.iter().zip(z).map(|(a, b)| a * b).sum::<f64>()
    }
    fn gradient(&self, _: &[f64]) -> Vec<f64> {
        self.coefficients.clone()
    }
    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(z.len(), z.len())
    }
}

/// Hyperbolic distance to a point of the upper half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicDistance {
    pub center: Vec<f64>,
}

impl HyperbolicDistance {
    /// `q = cosh d`, with its coordinate gradient and Hessian.
    fn q(&self, z: &[f64]) -> (f64, Vec<f64>, DMatrix<f64>) {
        let m = z.len();
        let y = z[m - 1];
        let yc = self.center[m - 1];
        let d2: f64 = z.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        let q = 1.0 + d2 / (2.0 * y * yc);
        let mut g = vec![0.0; m];
        for i in 0..m - 1 {
            g[i] = (z[i] - self.center[i]) / (y * yc);
        }
        g[m - 1] = (y - yc) / (y * yc) - d2 / (2.0 * y * y * yc);
        let mut h = DMatrix::zeros(m, m);
        for i in 0..m - 1 {
            h[(i, i)] = 1.0 / (y * yc);
            let v = -(z[i] - self.center[i]) / (y * y * yc);
            h[(i, m - 1)] = v;
            h[(m - 1, i)] = v;
        }
        h[(m - 1, m - 1)] =
            1.0 / (y * yc) - 2.0 * (y - yc) / (y * y * yc) + d2 / (y * y * y * yc);
        (q, g, h)
    }
}

impl AmbientFunction for HyperbolicDistance {
    fn value(&self, z: &[f64]) -> f64 {
        self.q(z).0.acosh()
    }
    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let (q, g, _) = self.q(z);
        let s = (q * q - 1.0).sqrt();
        g.iter().map(|v| v / s).collect()
    }
    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let (q, g, h) = self.q(z);
        let s2 = q * q - 1.0;
        let s = s2.sqrt();
        let gv = nalgebra::DVector::from_vec(g);
        h / s - (&gv * gv.transpose()) * (q / (s2 * s))
    }
}

/// Covariant Hessian of `φ` in the ambient metric, in coordinates.
pub fn covariant_hessian(model: AmbientModel, z: &[f64], grad: &[f64], hess: &DMatrix<f64>) -> DMatrix<f64> {
    match model {
        AmbientModel::Euclidean => hess.clone(),
        AmbientModel::HyperbolicHalfSpace => {
            // Christoffel symbols of |dz|²/y²
            let m = z.len();
            let y = z[m - 1];
            let mut out = hess.clone();
            for i in 0..m {
                out[(i, m - 1)] += grad[i] / y;
                out[(m - 1, i)] += grad[i] / y;
                out[(i, i)] -= grad[m - 1] / y;
            }
            out
        }
    }
}

/// Terms of `Δ^K φ` at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaKNode {
    /// `Σ μ_i Hess^Σ(φ)(e_i, e_i)`.
    pub value: f64,
    /// Operator norm of the ambient Hessian of `φ`.
    pub hessian_norm: f64,
    /// `Σ μ_i φ_{;i}²`.
    pub weighted_gradient: f64,
    /// `⟨∇φ, N⟩`.
    pub normal_derivative: f64,
    pub trace_b: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaKField {
    /// `None` at nodes outside the cone.
    pub nodes: Vec<Option<DeltaKNode>>,
    pub excluded: Vec<usize>,
}

/// `Δ^K φ = Σ μ_i Hess^Σ(φ)_{ii}` in the principal frame at each node.
///
/// The surface Hessian is the ambient one restricted to the tangent space
/// minus `⟨∇φ, N⟩ A`.
pub fn delta_k(
    surface: &GraphSurface,
    f: &CurvatureFunction,
    phi: &dyn AmbientFunction,
) -> Result<DeltaKField> {
    let model = surface.model();
    let nodes = (0..surface.grid().interior_len())
        .into_par_iter()
        .map(|node| -> Result<Option<DeltaKNode>> {
            let (u, p, s) = surface.node_jet(node);
            let lg = local_geometry(model, u, &p, &s)?;
            if !lg.shape.is_positive_definite() {
                return Ok(None);
            }
            let k = k_of_matrix(f, &lg.shape)?;
            let b = dk_matrix(f, &lg.shape)?;
            let mut z = surface.grid().interior_points()[node].clone();
            z.push(u);
            let grad = phi.gradient(&z);
            let hess = covariant_hessian(model, &z, &grad, &phi.hessian(&z));
            let frame = lg.principal_frame(model, u, &p);
            let lambda = lg.shape.eigenvalues();
            let mu = b.partials();
            let dn: f64 = grad.iter().zip(&lg.normal).map(|(a, b)| a * b).sum();
            let mut value = 0.0;
            let mut weighted = 0.0;
            for i in 0..lambda.len() {
                let e = nalgebra::DVector::from_column_slice(&frame[i]);
                let he = (e.transpose() * &hess * &e)[(0, 0)];
                let de: f64 = grad.iter().zip(e.iter()).map(|(a, b)| a * b).sum();
                value += mu[i] * (he - dn * lambda[i]);
                weighted += mu[i] * de * de;
            }
            let rho = model.conformal_factor(u);
            let hessian_norm = hess
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max)
                / (rho * rho);
            Ok(Some(DeltaKNode {
                value,
                hessian_norm,
                weighted_gradient: weighted,
                normal_derivative: dn,
                trace_b: b.trace(),
                k,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let excluded = (0..nodes.len()).filter(|&i| nodes[i].is_none()).collect();
    Ok(DeltaKField { nodes, excluded })
}

/// Discrete `L_κ` on interior nodes.
#[derive(Debug, Clone)]
pub struct LinearOperatorMatrix {
    pub matrix: SparseMatrix,
    /// `⟨∇κ, N⟩` per node, `NaN` where `κ` has no spatial gradient.
    pub zeroth_order: Vec<f64>,
    /// Vertical displacement per unit normal speed.
    pub vertical_speed: Vec<f64>,
}

/// Linearisation of `K − κ` under normal variations `f·N`.
///
/// Assembled as the height Jacobian of `K(u) − κ(x, u)` composed with the
/// vertical speed of a normal variation. On solutions this equals
/// `DK·f − ⟨∇κ, N⟩ f`; tangential parts of the variation only move points
/// along the surface, where `K − κ` vanishes.
pub fn stability_operator(
    surface: &GraphSurface,
    f: &CurvatureFunction,
    kappa: &Prescription,
) -> Result<LinearOperatorMatrix> {
    let grid = surface.grid();
    kappa.validate(grid.dim(), grid.interior_len())?;
    let lin = linearize(surface, f)?;
    let mut matrix = lin.jacobian.clone();
    let mut zeroth = Vec::with_capacity(grid.interior_len());
    let mut speed = Vec::with_capacity(grid.interior_len());
    for node in 0..grid.interior_len() {
        let x = &grid.interior_points()[node];
        let u = surface.heights()[node];
        let dk = kappa.d_height(node, x, u);
        if dk != 0.0 {
            matrix.push(node, node, -dk);
        }
        speed.push(surface.model().vertical_speed(u, lin.w[node]));
        let nd = kappa
            .ambient_gradient(node, x, u)
            .map(|g| g.iter().zip(&lin.normals[node]).map(|(a, b)| a * b).sum::<f64>())
            .unwrap_or(f64::NAN);
        // ⟨∇κ, N⟩ = dκ(N) in either model
        zeroth.push(nd);
    }
    matrix.scale_columns(&speed);
    Ok(LinearOperatorMatrix {
        matrix,
        zeroth_order: zeroth,
        vertical_speed: speed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    /// Every `probe_stride`-th interior node centres a probe bump.
    pub probe_stride: usize,
    /// Bump radius in multiples of the grid spacing.
    pub bump_radius: f64,
    pub positivity_tol: f64,
    pub eigen_iterations: usize,
    pub eigen_tol: f64,
    /// Condition estimates above this count as degenerate.
    pub max_condition: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            probe_stride: 1,
            bump_radius: 3.0,
            positivity_tol: 1e-8,
            eigen_iterations: 500,
            eigen_tol: 1e-10,
            max_condition: 1e14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub non_degenerate: bool,
    /// Estimate of the 1-norm condition number.
    pub condition_estimate: f64,
    /// Eigenvalue of smallest modulus, by inverse iteration.
    pub principal_eigenvalue: Option<f64>,
    pub inverse_positive: bool,
    /// Smallest entry over all probe responses `L⁻¹ b`.
    pub worst_probe_response: f64,
    pub probes: usize,
    /// Largest `|⟨∇κ, N⟩|`.
    pub max_zeroth_order: f64,
}

/// Invertibility, principal eigenvalue and inverse-positivity probes.
pub fn analyze_stability(
    op: &LinearOperatorMatrix,
    grid: &DomainGrid,
    cfg: &StabilityConfig,
) -> StabilityReport {
    let n = op.matrix.dim();
    let max_zeroth_order = op
        .zeroth_order
        .iter()
        .filter(|v| v.is_finite())
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let degenerate = StabilityReport {
        non_degenerate: false,
        condition_estimate: f64::INFINITY,
        principal_eigenvalue: None,
        inverse_positive: false,
        worst_probe_response: f64::NEG_INFINITY,
        probes: 0,
        max_zeroth_order,
    };
    let Ok(lu) = op.matrix.factor() else {
        return degenerate;
    };
    let Ok(inv_norm) = inverse_norm1_estimate(&lu) else {
        return degenerate;
    };
    let condition_estimate = op.matrix.norm1() * inv_norm;
    if !(condition_estimate < cfg.max_condition) {
        return StabilityReport {
            condition_estimate,
            ..degenerate
        };
    }

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut principal = None;
    let mut prev = f64::NAN;
    for _ in 0..cfg.eigen_iterations {
        let Ok(y) = lu.solve(&x) else { break };
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if xy == 0.0 || ny == 0.0 {
            break;
        }
        let est = 1.0 / xy;
        x = y.iter().map(|v| v / ny).collect();
        if (est - prev).abs() <= cfg.eigen_tol * est.abs() {
            principal = Some(est);
            break;
        }
        prev = est;
        principal = Some(est);
    }

    let radius = cfg.bump_radius * grid.spacing();
    let points = grid.interior_points();
    let centres: Vec<usize> = (0..n).step_by(cfg.probe_stride.max(1)).collect();
    let mut worst = f64::INFINITY;
    let mut failed = false;
    for chunk in centres.chunks(64) {
        let rhs: Vec<Vec<f64>> = chunk
            .iter()
            .map(|&c| {
                points
                    .iter()
                    .map(|p| {
                        let d2: f64 = p.iter().zip(&points[c]).map(|(a, b)| (a - b).powi(2)).sum();
                        let t = 1.0 - d2 / (radius * radius);
                        if t > 0.0 {
                            t * t
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        match lu.solve_many(&rhs) {
            Ok(sol) => {
                for g in sol {
                    worst = worst.min(g.into_iter().fold(f64::INFINITY, f64::min));
                }
            }
            Err(_) => failed = true,
        }
    }
    StabilityReport {
        non_degenerate: !failed,
        condition_estimate,
        principal_eigenvalue: principal,
        inverse_positive: !failed && worst >= -cfg.positivity_tol,
        worst_probe_response: worst,
        probes: centres.len(),
        max_zeroth_order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn bumpy_cap(model: AmbientModel) -> GraphSurface {
        let grid = Arc::new(DomainGrid::disk(1.0, 13).unwrap());
        GraphSurface::from_fn(model, grid, move |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let dome = match model {
                AmbientModel::Euclidean => (2.5 - r2).sqrt(),
                AmbientModel::HyperbolicHalfSpace => 1.0 + 0.25 * (1.0 - r2),
            };
            dome + 0.05 * x[0] * x[1] - 0.02 * x[0]
        })
        .unwrap()
    }

    #[test]
    fn jet_derivative_matches_differences() {
        for model in [AmbientModel::Euclidean, AmbientModel::HyperbolicHalfSpace] {
            for f in [
                CurvatureFunction::gauss(2).unwrap(),
                CurvatureFunction::quotient(2, 1).unwrap(),
            ] {
                let u = 0.8;
                let p = [0.3, -0.5];
                let s = DMatrix::from_row_slice(2, 2, &[-1.1, 0.2, 0.2, -0.7]);
                let (_, d) = jet_derivative(model, &f, u, &p, &s).unwrap();
                let kf = |u: f64, p: &[f64], s: &DMatrix<f64>| {
                    jet_derivative(model, &f, u, p, s).unwrap().1.k
                };
                let h = 1e-6;
                let fd_u = (kf(u + h, &p, &s) - kf(u - h, &p, &s)) / (2.0 * h);
                assert!((fd_u - d.d_u).abs() < 1e-7, "{model:?} du");
                for i in 0..2 {
                    let mut pp = p;
                    pp[i] += h;
                    let mut pm = p;
                    pm[i] -= h;
                    let fd = (kf(u, &pp, &s) - kf(u, &pm, &s)) / (2.0 * h);
                    assert!((fd - d.d_p[i]).abs() < 1e-7, "{model:?} dp{i}: {fd} {}", d.d_p[i]);
                }
                for (i, j) in [(0, 0), (1, 1), (0, 1)] {
                    let mut e = DMatrix::zeros(2, 2);
                    e[(i, j)] = h;
                    e[(j, i)] = h;
                    let fd = (kf(u, &p, &(&s + &e)) - kf(u, &p, &(&s - &e))) / (2.0 * h);
                    let exact = if i == j {
                        d.d_s[(i, i)]
                    } else {
                        d.d_s[(i, j)] + d.d_s[(j, i)]
                    };
                    assert!((fd - exact).abs() < 1e-7, "{model:?} ds{i}{j}");
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_column_differences() {
        let f = CurvatureFunction::quotient(2, 1).unwrap();
        for model in [AmbientModel::Euclidean, AmbientModel::HyperbolicHalfSpace] {
            let s = bumpy_cap(model);
            let lin = linearize(&s, &f).unwrap();
            let dense = lin.jacobian.to_dense();
            let h = 1e-7;
            for col in [0, 7, s.heights().len() / 2] {
                let mut up = s.heights().to_vec();
                up[col] += h;
                let mut dn = s.heights().to_vec();
                dn[col] -= h;
                let kp = curvature_field(&s.with_interior(up).unwrap(), &f).unwrap();
                let km = curvature_field(&s.with_interior(dn).unwrap(), &f).unwrap();
                for row in 0..kp.len() {
                    let fd = (kp[row] - km[row]) / (2.0 * h);
                    let scale = dense.column(col).amax().max(1.0);
                    assert!((fd - dense[(row, col)]).abs() < 1e-6 * scale);
                }
            }
        }
    }

    #[test]
    fn delta_k_vanishes_on_trivial_inputs() {
        let f = CurvatureFunction::gauss(2).unwrap();
        let s = bumpy_cap(AmbientModel::HyperbolicHalfSpace);
        let dk = delta_k(&s, &f, &ConstantFunction(2.0)).unwrap();
        assert!(dk.excluded.is_empty());
        for node in dk.nodes.iter().flatten() {
            assert_eq!(node.value, 0.0);
        }
        let flat = GraphSurface::from_fn(
            AmbientModel::Euclidean,
            Arc::new(DomainGrid::disk(1.0, 9).unwrap()),
            |_| 0.0,
        )
        .unwrap();
        let lin = LinearFunction {
            coefficients: vec![1.0, -2.0, 0.5],
            offset: 0.0,
        };
        let dk = delta_k(&flat, &f, &lin).unwrap();
        assert_eq!(dk.excluded.len(), flat.heights().len());
    }

    #[test]
    fn hyperbolic_distance_derivatives() {
        let d = HyperbolicDistance {
            center: vec![0.1, -0.2, 3.0],
        };
        let z = [0.4, 0.3, 0.9];
        let g = d.gradient(&z);
        let h = d.hessian(&z);
        let eps = 1e-6;
        for i in 0..3 {
            let mut zp = z;
            zp[i] += eps;
            let mut zm = z;
            zm[i] -= eps;
            assert!(((d.value(&zp) - d.value(&zm)) / (2.0 * eps) - g[i]).abs() < 1e-8);
            let gp = d.gradient(&zp);
            let gm = d.gradient(&zm);
            for j in 0..3 {
                assert!(((gp[j] - gm[j]) / (2.0 * eps) - h[(i, j)]).abs() < 1e-6);
            }
        }
        // unit gradient, and Hess = coth(d)(g − dφ⊗dφ) covariantly
        let y = z[2];
        let norm2: f64 = g.iter().map(|v| v * v).sum::<f64>() * y * y;
        assert!((norm2 - 1.0).abs() < 1e-12);
        let cov = covariant_hessian(AmbientModel::HyperbolicHalfSpace, &z, &g, &h);
        let phi = d.value(&z);
        let coth = 1.0 / phi.tanh();
        for i in 0..3 {
            for j in 0..3 {
                let metric = if i == j { 1.0 / (y * y) } else { 0.0 };
                let expected = coth * (metric - g[i] * g[j]);
                assert!((cov[(i, j)] - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_kappa_has_no_zeroth_order_term() {
        let f = CurvatureFunction::gauss(2).unwrap();
        let s = bumpy_cap(AmbientModel::HyperbolicHalfSpace);
        let op = stability_operator(&s, &f, &Prescription::Constant(0.5)).unwrap();
        assert!(op.zeroth_order.iter().all(|v| *v == 0.0));
        let lin = linearize(&s, &f).unwrap();
        let jd = lin.jacobian.to_dense();
        let ld = op.matrix.to_dense();
        for c in 0..jd.ncols() {
            for r in 0..jd.nrows() {
                assert!((ld[(r, c)] - jd[(r, c)] * op.vertical_speed[c]).abs() <= 1e-12 * jd[(r, c)].abs());
            }
        }
    }

    #[test]
    fn linearisation_consistency_with_height_dependent_kappa() {
        let f = CurvatureFunction::quotient(2, 1).unwrap();
        let s = bumpy_cap(AmbientModel::Euclidean);
        let kappa = Prescription::Affine {
            constant: 0.4,
            coefficients: vec![0.0, 0.0],
            height: 0.1,
        };
        let op = stability_operator(&s, &f, &kappa).unwrap();
        let bump: Vec<f64> = s
            .grid()
            .interior_points()
            .iter()
            .map(|p| (-(p[0] * p[0] + p[1] * p[1]) * 4.0).exp())
            .collect();
        let residual = |surf: &GraphSurface| -> Vec<f64> {
            let k = curvature_field(surf, &f).unwrap();
            k.iter()
                .enumerate()
                .map(|(i, kv)| {
                    kv - kappa.value(i, &surf.grid().interior_points()[i], surf.heights()[i])
                })
                .collect()
        };
        let base = residual(&s);
        let lf = op.matrix.apply(&bump);
        let mut errs = Vec::new();
        for eps in [1e-3, 5e-4] {
            let moved: Vec<f64> = s
                .heights()
                .iter()
                .zip(&bump)
                .zip(&op.vertical_speed)
                .map(|((u, b), v)| u + eps * b * v)
                .collect();
            let r = residual(&s.with_interior(moved).unwrap());
            let e = r
                .iter()
                .zip(&base)
                .zip(&lf)
                .map(|((a, b), l)| ((a - b) / eps - l).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        // first-order agreement: the error halves with ε
        assert!(errs[1] < 0.6 * errs[0] && errs[1] < 1e-2, "{errs:?}");
    }
}
