//! Graph hypersurfaces, their shape operators and curvature fields.

use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::grid::DomainGrid;
use crate::error::{Error, Result};
use crate::numfmt::g17;
use crate::spectral::{k_of_matrix, SpectralMatrix};
use crate::symmfunc::CurvatureFunction;

/// Ambient space of a graph `x ↦ (x, u(x))`.
///
/// The hyperbolic model is the upper half-space with metric `|dz|²/y²`,
/// where `y` is the last coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbientModel {
    Euclidean,
    HyperbolicHalfSpace,
}

impl AmbientModel {
    pub fn label(self) -> &'static str {
        match self {
            AmbientModel::Euclidean => "euclidean",
            AmbientModel::HyperbolicHalfSpace => "hyperbolic",
        }
    }

    /// Vertical displacement of the graph produced by a unit normal speed.
    pub fn vertical_speed(self, height: f64, w: f64) -> f64 {
        match self {
            AmbientModel::Euclidean => w,
            AmbientModel::HyperbolicHalfSpace => -height * w,
        }
    }

    /// Conformal factor `ρ` with ambient metric `ρ²|dz|²` at height `y`.
    pub fn conformal_factor(self, y: f64) -> f64 {
        match self {
            AmbientModel::Euclidean => 1.0,
            AmbientModel::HyperbolicHalfSpace => 1.0 / y,
        }
    }
}

/// `g^{-1/2}` for `g = I + ppᵀ`, in closed form.
pub fn metric_inverse_sqrt(p: &[f64]) -> (DMatrix<f64>, f64) {
    let n = p.len();
    let q2: f64 = p.iter().map(|v| v * v).sum();
    let w = (1.0 + q2).sqrt();
    let mut m = DMatrix::identity(n, n);
    if q2 > 0.0 {
        let c = (1.0 / w - 1.0) / q2;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += c * p[i] * p[j];
            }
        }
    }
    (m, w)
}

/// Pointwise geometry of a graph from its 2-jet.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    /// Symmetrised shape operator; isospectral to the shape operator.
    pub shape: SpectralMatrix,
    pub w: f64,
    pub g_inv_sqrt: DMatrix<f64>,
    /// Unit normal, ambient coordinates, pointing away from the convex side.
    pub normal: Vec<f64>,
}

/// Shape operator of the graph at a point with height `u`, gradient `p` and
/// Hessian `s`.
///
/// Orientation makes convex sides positive: the Euclidean dome
/// `√(r²−|x|²)` and the hyperbolic horosphere `u ≡ c` are positive.
pub fn local_geometry(
    model: AmbientModel,
    u: f64,
    p: &[f64],
    s: &DMatrix<f64>,
) -> Result<LocalGeometry> {
    let n = p.len();
    let (gi, w) = metric_inverse_sqrt(p);
    let core = &gi * s * &gi;
    let (shape, normal) = match model {
        AmbientModel::Euclidean => {
            let mut nu: Vec<f64> = p.iter().map(|v| -v / w).collect();
            nu.push(1.0 / w);
            (-core / w, nu)
        }
        AmbientModel::HyperbolicHalfSpace => {
            if !(u > 0.0) {
                return Err(Error::Precondition(format!(
                    "hyperbolic height must be positive, got {u}"
                )));
            }
            let mut nu: Vec<f64> = p.iter().map(|v| u * v / w).collect();
            nu.push(-u / w);
            (DMatrix::identity(n, n) / w + core * (u / w), nu)
        }
    };
    Ok(LocalGeometry {
        shape: SpectralMatrix::new(shape)?,
        w,
        g_inv_sqrt: gi,
        normal,
    })
}

impl LocalGeometry {
    /// Unit tangent vectors (ambient coordinates) along the principal
    /// directions, in the order of the eigenvalues of `shape`.
    pub fn principal_frame(&self, model: AmbientModel, u: f64, p: &[f64]) -> Vec<Vec<f64>> {
        let n = p.len();
        let scale = match model {
            AmbientModel::Euclidean => 1.0,
            AmbientModel::HyperbolicHalfSpace => u,
        };
        let q = self.shape.eigenvectors();
        (0..n)
            .map(|c| {
                let w = &self.g_inv_sqrt * q.column(c);
                let mut e: Vec<f64> = w.iter().map(|v| v * scale).collect();
                e.push(scale * p.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<f64>());
                e
            })
            .collect()
    }
}

/// Graph of a height field over a grid, with fixed boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSurface {
    model: AmbientModel,
    grid: Arc<DomainGrid>,
    interior: Vec<f64>,
    boundary: Vec<f64>,
}

impl GraphSurface {
    pub fn new(
        model: AmbientModel,
        grid: Arc<DomainGrid>,
        interior: Vec<f64>,
        boundary: Vec<f64>,
    ) -> Result<Self> {
        if interior.len() != grid.interior_len() || boundary.len() != grid.boundary_len() {
            return Err(Error::Argument(format!(
                "expected {} interior and {} boundary values, got {} and {}",
                grid.interior_len(),
                grid.boundary_len(),
                interior.len(),
                boundary.len()
            )));
        }
        if interior.iter().chain(&boundary).any(|v| !v.is_finite()) {
            return Err(Error::Argument("height field has non-finite values".into()));
        }
        if model == AmbientModel::HyperbolicHalfSpace {
            if let Some((i, v)) = interior.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(Error::Precondition(format!(
                    "hyperbolic height at interior node {i} is {v}, must be positive"
                )));
            }
        }
        Ok(Self {
            model,
            grid,
            interior,
            boundary,
        })
    }

    /// Samples `u` at interior nodes and boundary points.
    pub fn from_fn(
        model: AmbientModel,
        grid: Arc<DomainGrid>,
        u: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let interior = grid.interior_points().iter().map(|p| u(p)).collect();
        let boundary = grid.boundary_points().iter().map(|b| u(&b.position)).collect();
        Self::new(model, grid, interior, boundary)
    }

    /// Same boundary data, new interior heights.
    pub fn with_interior(&self, interior: Vec<f64>) -> Result<Self> {
        Self::new(self.model, self.grid.clone(), interior, self.boundary.clone())
    }

    pub fn model(&self) -> AmbientModel {
        self.model
    }

    pub fn grid(&self) -> &Arc<DomainGrid> {
        &self.grid
    }

    pub fn heights(&self) -> &[f64] {
        &self.interior
    }

    pub fn boundary_values(&self) -> &[f64] {
        &self.boundary
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `(u, Du, D²u)` at an interior node.
    pub fn node_jet(&self, node: usize) -> (f64, Vec<f64>, DMatrix<f64>) {
        let (p, s) = self.grid.derivatives(node, &self.interior, &self.boundary);
        (self.interior[node], p, s)
    }

    pub fn local_geometry(&self, node: usize) -> Result<LocalGeometry> {
        let (u, p, s) = self.node_jet(node);
        local_geometry(self.model, u, &p, &s)
    }
}

/// Per-node jet of a graph surface.
#[derive(Debug, Clone, PartialEq)]
pub struct PointJet {
    pub position: Vec<f64>,
    pub height: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
    pub normal: Vec<f64>,
    pub shape: SpectralMatrix,
    /// `None` where the node is not admissible.
    pub k: Option<f64>,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceJet {
    pub nodes: Vec<PointJet>,
}

impl SurfaceJet {
    pub fn all_admissible(&self) -> bool {
        self.nodes.iter().all(|n| n.admissible)
    }

    /// Smallest principal curvature over all nodes.
    pub fn min_eigenvalue(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.shape.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.shape.max_eigenvalue())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of nodes that left the cone.
    pub fn inadmissible(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| !self.nodes[i].admissible)
            .collect()
    }

    pub fn k_field(&self) -> Vec<Option<f64>> {
        self.nodes.iter().map(|n| n.k).collect()
    }
}

/// Gradient, Hessian, normal, shape operator and curvature at interior nodes.
pub fn surface_jet(surface: &GraphSurface, f: &CurvatureFunction) -> Result<SurfaceJet> {
    if f.dim() != surface.dim() {
        return Err(Error::Argument(format!(
            "{} needs {}-dimensional surfaces, got {}",
            f.label(),
            f.dim(),
            surface.dim()
        )));
    }
    let nodes = (0..surface.grid.interior_len())
        .into_par_iter()
        .map(|k| -> Result<PointJet> {
            let (u, p, s) = surface.node_jet(k);
            let lg = local_geometry(surface.model, u, &p, &s)?;
            let admissible = lg.shape.is_positive_definite();
            let kv = if admissible {
                Some(k_of_matrix(f, &lg.shape)?)
            } else {
                None
            };
            Ok(PointJet {
                position: surface.grid.interior_points()[k].clone(),
                height: u,
                gradient: p,
                hessian: s,
                normal: lg.normal,
                shape: lg.shape,
                k: kv,
                admissible,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceJet { nodes })
}

/// Principal curvatures of a rotationally symmetric graph `u(|x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCurvature {
    pub kappa_radial: f64,
    /// Multiplicity `n − 1`.
    pub kappa_angular: f64,
    pub k: Option<f64>,
}

/// Curvature of the radial graph at radius `r` from `u`, `u′`, `u″`.
///
/// On the axis the angular curvature is replaced by its regular limit, which
/// requires `u′(0) = 0`.
pub fn radial_jet(
    model: AmbientModel,
    f: &CurvatureFunction,
    r: f64,
    u: f64,
    du: f64,
    d2u: f64,
) -> Result<RadialCurvature> {
    let w = (1.0 + du * du).sqrt();
    let er = -d2u / (w * w * w);
    let ea = if r > 0.0 {
        -du / (r * w)
    } else if du == 0.0 {
        er
    } else {
        return Err(Error::Precondition(format!(
            "radial profile is singular on the axis (u'(0) = {du})"
        )));
    };
    let (kr, ka) = match model {
        AmbientModel::Euclidean => (er, ea),
        AmbientModel::HyperbolicHalfSpace => {
            if !(u > 0.0) {
                return Err(Error::Precondition(format!(
                    "hyperbolic height must be positive, got {u}"
                )));
            }
            (1.0 / w - u * er, 1.0 / w - u * ea)
        }
    };
    let n = f.dim();
    let k = if kr > 0.0 && (n == 1 || ka > 0.0) {
        let mut x = vec![ka; n];
        x[0] = kr;
        Some(f.eval(&x)?)
    } else {
        None
    };
    Ok(RadialCurvature {
        kappa_radial: kr,
        kappa_angular: ka,
        k,
    })
}

/// Writes `node,kind,x0..,u,lambda_min,lambda_max,K` rows.
///
/// Boundary points follow the interior nodes and leave the curvature
/// columns empty.
pub fn write_snapshot<W: Write>(surface: &GraphSurface, jet: &SurfaceJet, out: &mut W) -> Result<()> {
    let n = surface.dim();
    let mut header = String::from("node,kind");
    for i in 0..n {
        header.push_str(&format!(",x{i}"));
    }
    header.push_str(",u,lambda_min,lambda_max,K\n");
    out.write_all(header.as_bytes())?;
    let grid = surface.grid();
    for (k, node) in jet.nodes.iter().enumerate() {
        let mut row = format!("{k},interior");
        for x in &grid.interior_points()[k] {
            row.push(',');
            row.push_str(&g17(*x));
        }
        row.push_str(&format!(
            ",{},{},{},{}\n",
            g17(node.height),
            g17(node.shape.min_eigenvalue()),
            g17(node.shape.max_eigenvalue()),
            node.k.map(g17).unwrap_or_default()
        ));
        out.write_all(row.as_bytes())?;
    }
    let offset = jet.nodes.len();
    for (b, bp) in grid.boundary_points().iter().enumerate() {
        let mut row = format!("{},boundary", offset + b);
        for x in &bp.position {
            row.push(',');
            row.push_str(&g17(*x));
        }
        row.push_str(&format!(",{},,,\n", g17(surface.boundary_values()[b])));
        out.write_all(row.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(n: usize) -> Arc<DomainGrid> {
        Arc::new(DomainGrid::disk(1.0, n).unwrap())
    }

    #[test]
    fn flat_plane_has_zero_shape_operator() {
        let s = GraphSurface::from_fn(AmbientModel::Euclidean, disk(11), |_| 0.0).unwrap();
        let f = CurvatureFunction::gauss(2).unwrap();
        let jet = surface_jet(&s, &f).unwrap();
        for node in &jet.nodes {
            assert!(node.shape.entries().norm() == 0.0);
            assert!(!node.admissible);
            assert!(node.k.is_none());
        }
    }

    fn is_cut(s: &GraphSurface, node: usize) -> bool {
        let st = s.grid().stencil(node);
        st.hessian.iter().chain(&st.gradient).any(|f| !f.boundary.is_empty())
    }

    #[test]
    fn sphere_cap_eigenvalues_converge() {
        let f = CurvatureFunction::gauss(2).unwrap();
        // regular nodes are second order; cut nodes only first
        let (mut errs, mut cut_errs) = (Vec::new(), Vec::new());
        for n in [21, 41, 81] {
            let s = GraphSurface::from_fn(AmbientModel::Euclidean, disk(n), |x| {
                (4.0 - x[0] * x[0] - x[1] * x[1]).sqrt()
            })
            .unwrap();
            let jet = surface_jet(&s, &f).unwrap();
            let (mut e, mut ec) = (0.0f64, 0.0f64);
            for (i, p) in jet.nodes.iter().enumerate() {
                let d = p.shape.eigenvalues().iter().fold(0.0f64, |a, l| a.max((l - 0.5).abs()));
                if is_cut(&s, i) {
                    ec = ec.max(d);
                } else {
                    e = e.max(d);
                }
            }
            for node in &jet.nodes {
                let norm: f64 = node.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            errs.push(e);
            cut_errs.push(ec);
        }
        let order = (errs[1] / errs[2]).log2();
        assert!(errs[2] < 1e-4 && order > 1.8, "{errs:?}");
        let cut_order = (cut_errs[1] / cut_errs[2]).log2();
        assert!(cut_order > 0.8, "{cut_errs:?}");
    }

    #[test]
    fn horosphere_is_umbilic_with_unit_curvature() {
        let s = GraphSurface::from_fn(AmbientModel::HyperbolicHalfSpace, disk(11), |_| 0.7).unwrap();
        let f = CurvatureFunction::quotient(2, 1).unwrap();
        let jet = surface_jet(&s, &f).unwrap();
        for node in &jet.nodes {
            for l in node.shape.eigenvalues() {
                assert!((l - 1.0).abs() < 1e-10);
            }
            assert!((node.k.unwrap() - 1.0).abs() < 1e-10);
            let norm: f64 = node.normal.iter().map(|v| v * v).sum::<f64>().sqrt() / node.height;
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_and_scaling_invariance() {
        let f = CurvatureFunction::gauss(2).unwrap();
        let cap = |x: &[f64]| (4.0 - x[0] * x[0] - x[1] * x[1]).sqrt();
        let a = surface_jet(&GraphSurface::from_fn(AmbientModel::Euclidean, disk(15), cap).unwrap(), &f)
            .unwrap();
        let b = surface_jet(
            &GraphSurface::from_fn(AmbientModel::Euclidean, disk(15), |x| cap(x) + 3.0).unwrap(),
            &f,
        )
        .unwrap();
        for (p, q) in a.nodes.iter().zip(&b.nodes) {
            assert!((p.shape.entries() - q.shape.entries()).amax() < 1e-9);
            assert_eq!(p.gradient.len(), q.gradient.len());
        }
        // hyperbolic isometry (x, y) -> (s x, s y)
        let dome = |x: &[f64]| 0.2 + (2.0 - x[0] * x[0] - x[1] * x[1]).sqrt();
        let g1 = disk(15);
        let g2 = Arc::new(DomainGrid::disk(2.5, 15).unwrap());
        let s1 = GraphSurface::from_fn(AmbientModel::HyperbolicHalfSpace, g1, dome).unwrap();
        let s2 = GraphSurface::from_fn(AmbientModel::HyperbolicHalfSpace, g2, |x| {
            2.5 * dome(&[x[0] / 2.5, x[1] / 2.5])
        })
        .unwrap();
        let j1 = surface_jet(&s1, &f).unwrap();
        let j2 = surface_jet(&s2, &f).unwrap();
        for (p, q) in j1.nodes.iter().zip(&j2.nodes) {
            for (a, b) in p.shape.eigenvalues().iter().zip(q.shape.eigenvalues()) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn radial_jet_matches_surface_jet() {
        let f = CurvatureFunction::gauss(2).unwrap();
        let r0 = 2.0f64;
        let c = radial_jet(AmbientModel::Euclidean, &f, 1.2, 0.0, -1.2 / 1.6, -4.0 / 1.6f64.powi(3))
            .unwrap();
        assert!((c.kappa_radial - 0.5).abs() < 1e-15 && (c.kappa_angular - 0.5).abs() < 1e-15);
        let s = GraphSurface::from_fn(AmbientModel::Euclidean, disk(41), |x| {
            (r0 * r0 - x[0] * x[0] - x[1] * x[1]).sqrt()
        })
        .unwrap();
        let jet = surface_jet(&s, &f).unwrap();
        let worst = jet
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| !is_cut(&s, *i))
            .map(|(_, node)| {
                let r = node.position[0].hypot(node.position[1]);
                let u = (r0 * r0 - r * r).sqrt();
                let rc = radial_jet(AmbientModel::Euclidean, &f, r, u, -r / u, -r0 * r0 / u.powi(3))
                    .unwrap();
                (rc.k.unwrap() - node.k.unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "{worst}");
        let horo = radial_jet(AmbientModel::HyperbolicHalfSpace, &f, 0.3, 2.0, 0.0, 0.0).unwrap();
        assert_eq!((horo.kappa_radial, horo.kappa_angular), (1.0, 1.0));
        assert!(radial_jet(AmbientModel::Euclidean, &f, 0.0, 1.0, 0.1, -1.0).is_err());
    }
}
