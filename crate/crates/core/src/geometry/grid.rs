//! Domain grids and their derivative stencils.
//!
//! Every derivative of the height field at an interior node is a fixed linear
//! combination of interior unknowns and boundary values. Disks use a masked
//! Cartesian lattice: along each of the four lattice lines through a node
//! (two axes, two diagonals) the stencil reaches either the next lattice node
//! or the point where the line meets the circle.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Linear functional of the height field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearForm {
    pub interior: Vec<(usize, f64)>,
    pub boundary: Vec<(usize, f64)>,
}

impl LinearForm {
    pub fn eval(&self, interior: &[f64], boundary: &[f64]) -> f64 {
        self.interior.iter().map(|&(i, w)| w * interior[i]).sum::<f64>()
            + self.boundary.iter().map(|&(i, w)| w * boundary[i]).sum::<f64>()
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            interior: self.interior.iter().map(|&(i, w)| (i, w * s)).collect(),
            boundary: self.boundary.iter().map(|&(i, w)| (i, w * s)).collect(),
        }
    }

    fn add(&mut self, other: &LinearForm, s: f64) {
        for &(i, w) in &other.interior {
            push_term(&mut self.interior, i, w * s);
        }
        for &(i, w) in &other.boundary {
            push_term(&mut self.boundary, i, w * s);
        }
    }
}

fn push_term(terms: &mut Vec<(usize, f64)>, i: usize, w: f64) {
    if let Some(t) = terms.iter_mut().find(|t| t.0 == i) {
        t.1 += w;
    } else {
        terms.push((i, w));
    }
}

/// First and second derivatives at one interior node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStencil {
    /// `∂_i u`, one form per coordinate.
    pub gradient: Vec<LinearForm>,
    /// `∂_i∂_j u` for `i ≤ j`, row-major upper triangle.
    pub hessian: Vec<LinearForm>,
    /// One-diagonal forms of `u_xy` on planar lattices, along `(1, 1)` and
    /// `(1, −1)`; see [`DomainGrid::hessian_form`].
    pub mixed: Option<[LinearForm; 2]>,
}

/// Line through a boundary point used for one-sided normal derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLine {
    /// Unit vector pointing from the interior towards the boundary point.
    pub outward: Vec<f64>,
    /// Interior nodes on the line, nearest first, with their distances.
    pub nodes: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub position: Vec<f64>,
    /// Outward unit normal of the domain.
    pub normal: Vec<f64>,
    pub line: Option<BoundaryLine>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridShape {
    /// `[x0, x1] × [y0, y1]` with `nx × ny` lattice nodes.
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        nx: usize,
        ny: usize,
    },
    /// Disk of the given radius, centred at the origin, masked out of an
    /// `nodes × nodes` lattice on its bounding square.
    Disk { radius: f64, nodes: usize },
    /// Rotationally symmetric functions on the ball of radius `radius` in
    /// `dim` dimensions, sampled at `m` equispaced radii including the axis.
    Radial { radius: f64, m: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainGrid {
    shape: GridShape,
    dim: usize,
    h: f64,
    interior: Vec<Vec<f64>>,
    lattice: Vec<Option<[usize; 2]>>,
    boundary: Vec<BoundaryPoint>,
    stencils: Vec<NodeStencil>,
}

/// Nodes inside the circle by less than this fraction of `h` are masked out.
const MASK_MARGIN: f64 = 0.1;

/// Width in `u_x u_y` of the switch between one-diagonal mixed forms.
pub const MIXED_BLEND_WIDTH: f64 = 1e-2;

impl DomainGrid {
    pub fn new(shape: GridShape) -> Result<Self> {
        match shape {
            GridShape::Rectangle {
                x0,
                x1,
                y0,
                y1,
                nx,
                ny,
            } => {
                if !(x1 > x0 && y1 > y0) || nx < 3 || ny < 3 {
                    return Err(Error::Argument(
                        "rectangle needs positive extents and at least 3x3 nodes".into(),
                    ));
                }
                Ok(build_rectangle(x0, x1, y0, y1, nx, ny))
            }
            GridShape::Disk { radius, nodes } => {
                if !(radius > 0.0) || nodes < 5 {
                    return Err(Error::Argument(
                        "disk needs a positive radius and at least 5 nodes per side".into(),
                    ));
                }
                Ok(build_disk(radius, nodes))
            }
            GridShape::Radial { radius, m, dim } => {
                if !(radius > 0.0) || m < 3 || dim == 0 {
                    return Err(Error::Argument(
                        "radial grid needs a positive radius, m >= 3 and dim >= 1".into(),
                    ));
                }
                Ok(build_radial(radius, m, dim))
            }
        }
    }

    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::new(GridShape::Rectangle {
            x0,
            x1,
            y0,
            y1,
            nx,
            ny,
        })
    }

    pub fn disk(radius: f64, nodes: usize) -> Result<Self> {
        Self::new(GridShape::Disk { radius, nodes })
    }

    pub fn radial(radius: f64, m: usize, dim: usize) -> Result<Self> {
        Self::new(GridShape::Radial { radius, m, dim })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    /// Dimension `n` of the parameter domain.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lattice spacing (the larger one for rectangles).
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    pub fn interior_points(&self) -> &[Vec<f64>] {
        &self.interior
    }

    /// Lattice indices `(i, j)` of interior nodes on lattice grids.
    pub fn lattice_index(&self, node: usize) -> Option<[usize; 2]> {
        self.lattice[node]
    }

    pub fn boundary_points(&self) -> &[BoundaryPoint] {
        &self.boundary
    }

    pub fn stencil(&self, node: usize) -> &NodeStencil {
        &self.stencils[node]
    }

    /// Whether the grid samples a rotationally symmetric profile.
    pub fn is_radial(&self) -> bool {
        matches!(self.shape, GridShape::Radial { .. })
    }

    /// Radius of the smallest centred ball containing the domain.
    pub fn outer_radius(&self) -> f64 {
        match self.shape {
            GridShape::Rectangle { x0, x1, y0, y1, .. } => {
                let rx = x0.abs().max(x1.abs());
                let ry = y0.abs().max(y1.abs());
                rx.hypot(ry)
            }
            GridShape::Disk { radius, .. } | GridShape::Radial { radius, .. } => radius,
        }
    }

    /// Weight of the `(1, 1)` diagonal in the mixed derivative, and its
    /// derivative with respect to `c = u_x u_y`.
    ///
    /// On planar lattices `u_xy` blends the two one-diagonal forms so that
    /// the metric part of the operator stays monotone: the `(1, 1)` form
    /// where `c < 0`, the `(1, −1)` form where `c > 0`, switching smoothly
    /// over `|c| ≲ MIXED_BLEND_WIDTH`.
    pub fn mixed_weight(&self, node: usize, p: &[f64]) -> Option<(f64, f64)> {
        self.stencils[node].mixed.as_ref()?;
        let t = (p[0] * p[1] / MIXED_BLEND_WIDTH).tanh();
        Some((0.5 * (1.0 - t), -0.5 * (1.0 - t * t) / MIXED_BLEND_WIDTH))
    }

    /// Gradient and Hessian of the height field at an interior node.
    pub fn derivatives(
        &self,
        node: usize,
        interior: &[f64],
        boundary: &[f64],
    ) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
        let n = self.dim;
        let st = &self.stencils[node];
        let p: Vec<f64> = st
            .gradient
            .iter()
            .map(|f| f.eval(interior, boundary))
            .collect();
        let mut s = nalgebra::DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                let v = match (self.mixed_weight(node, &p), &st.mixed) {
                    (Some((w, _)), Some([along, across])) if k == 1 => {
                        w * along.eval(interior, boundary) + (1.0 - w) * across.eval(interior, boundary)
                    }
                    _ => st.hessian[k].eval(interior, boundary),
                };
                s[(i, j)] = v;
                s[(j, i)] = v;
                k += 1;
            }
        }
        (p, s)
    }
}

/// Finite-difference weights at `z` on nodes `x` for derivatives `0..=m`.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Clone, Copy, Debug)]
enum Sample {
    Interior(usize),
    Boundary(usize),
}

/// Stencil points along one line through a node, in units of the line step.
struct LineSamples {
    points: Vec<(f64, Sample)>,
}

impl LineSamples {
    /// First and second derivative forms with respect to the line parameter.
    fn forms(&self) -> (LinearForm, LinearForm) {
        let t: Vec<f64> = self.points.iter().map(|p| p.0).collect();
        let w = fd_weights(0.0, &t, 2);
        let mut d1 = LinearForm::default();
        let mut d2 = LinearForm::default();
        for (k, &(_, s)) in self.points.iter().enumerate() {
            match s {
                Sample::Interior(i) => {
                    push_term(&mut d1.interior, i, w[1][k]);
                    push_term(&mut d2.interior, i, w[2][k]);
                }
                Sample::Boundary(i) => {
                    push_term(&mut d1.boundary, i, w[1][k]);
                    push_term(&mut d2.boundary, i, w[2][k]);
                }
            }
        }
        d1.interior.retain(|t| t.1 != 0.0);
        d2.interior.retain(|t| t.1 != 0.0);
        (d1, d2)
    }
}

/// Combines per-line derivatives into gradient and Hessian forms.
///
/// `lines` are along `(hx,0)`, `(0,hy)`, `(hx,hy)`, `(hx,-hy)`.
fn planar_stencil(lines: [LineSamples; 4], hx: f64, hy: f64) -> NodeStencil {
    let [lx, ly, ld, la] = lines.map(|l| l.forms());
    let grad = vec![lx.0.scaled(1.0 / hx), ly.0.scaled(1.0 / hy)];
    let uxx = lx.1.scaled(1.0 / (hx * hx));
    let uyy = ly.1.scaled(1.0 / (hy * hy));
    // d²/dt² along (hx, ±hy) is hx²u_xx ± 2hxhy u_xy + hy²u_yy
    let mut uxy = ld.1.scaled(1.0 / (4.0 * hx * hy));
    uxy.add(&la.1, -1.0 / (4.0 * hx * hy));
    let mut along = ld.1.scaled(1.0 / (2.0 * hx * hy));
    along.add(&uxx, -hx / (2.0 * hy));
    along.add(&uyy, -hy / (2.0 * hx));
    let mut across = la.1.scaled(-1.0 / (2.0 * hx * hy));
    across.add(&uxx, hx / (2.0 * hy));
    across.add(&uyy, hy / (2.0 * hx));
    NodeStencil {
        gradient: grad,
        hessian: vec![uxx, uxy, uyy],
        mixed: Some([along, across]),
    }
}

fn build_rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> DomainGrid {
    let hx = (x1 - x0) / (nx - 1) as f64;
    let hy = (y1 - y0) / (ny - 1) as f64;
    let mut index = vec![None; nx * ny];
    let mut interior = Vec::new();
    let mut lattice = Vec::new();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            index[j * nx + i] = Some(interior.len());
            interior.push(vec![x0 + i as f64 * hx, y0 + j as f64 * hy]);
            lattice.push(Some([i, j]));
        }
    }
    let mut bindex = vec![None; nx * ny];
    let mut boundary = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if index[j * nx + i].is_some() {
                continue;
            }
            let nxv: f64 = if i == 0 {
                -1.0
            } else if i == nx - 1 {
                1.0
            } else {
                0.0
            };
            let nyv: f64 = if j == 0 {
                -1.0
            } else if j == ny - 1 {
                1.0
            } else {
                0.0
            };
            let len = (nxv * nxv + nyv * nyv).sqrt();
            bindex[j * nx + i] = Some(boundary.len());
            boundary.push(BoundaryPoint {
                position: vec![x0 + i as f64 * hx, y0 + j as f64 * hy],
                normal: vec![nxv / len, nyv / len],
                line: None,
            });
        }
    }
    // inward lines perpendicular to the edges, corners excluded
    for bp in boundary.iter_mut() {
        let (nxv, nyv) = (bp.normal[0], bp.normal[1]);
        if nxv != 0.0 && nyv != 0.0 {
            continue;
        }
        let i = ((bp.position[0] - x0) / hx).round() as isize;
        let j = ((bp.position[1] - y0) / hy).round() as isize;
        let (di, dj) = (-nxv as isize, -nyv as isize);
        let step = if di != 0 { hx } else { hy };
        let mut nodes = Vec::new();
        for s in 1..=6 {
            let (ii, jj) = (i + di * s, j + dj * s);
            if ii < 0 || jj < 0 || ii >= nx as isize || jj >= ny as isize {
                break;
            }
            match index[jj as usize * nx + ii as usize] {
                Some(k) => nodes.push((k, s as f64 * step)),
                None => break,
            }
        }
        bp.line = Some(BoundaryLine {
            outward: vec![nxv, nyv],
            nodes,
        });
    }
    let sample = |i: usize, j: usize| -> Sample {
        match index[j * nx + i] {
            Some(k) => Sample::Interior(k),
            None => Sample::Boundary(bindex[j * nx + i].expect("boundary node")),
        }
    };
    let stencils = lattice
        .iter()
        .map(|ij| {
            let [i, j] = ij.expect("lattice node");
            let line = |di: isize, dj: isize| LineSamples {
                points: vec![
                    (
                        -1.0,
                        sample((i as isize - di) as usize, (j as isize - dj) as usize),
                    ),
                    (0.0, Sample::Interior(index[j * nx + i].expect("interior"))),
                    (
                        1.0,
                        sample((i as isize + di) as usize, (j as isize + dj) as usize),
                    ),
                ],
            };
            planar_stencil([line(1, 0), line(0, 1), line(1, 1), line(1, -1)], hx, hy)
        })
        .collect();
    DomainGrid {
        shape: GridShape::Rectangle {
            x0,
            x1,
            y0,
            y1,
            nx,
            ny,
        },
        dim: 2,
        h: hx.max(hy),
        interior,
        lattice,
        boundary,
        stencils,
    }
}

fn build_disk(radius: f64, n: usize) -> DomainGrid {
    let h = 2.0 * radius / (n - 1) as f64;
    let coord = |i: usize| -radius + i as f64 * h;
    let mut index = vec![None; n * n];
    let mut interior = Vec::new();
    let mut lattice = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (coord(i), coord(j));
            if x.hypot(y) < radius - MASK_MARGIN * h {
                index[j * n + i] = Some(interior.len());
                interior.push(vec![x, y]);
                lattice.push(Some([i, j]));
            }
        }
    }
    let node_at = |i: isize, j: isize| -> Option<usize> {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            None
        } else {
            index[j as usize * n + i as usize]
        }
    };

    // Boundary points where lattice lines leave the interior set.
    let mut boundary: Vec<BoundaryPoint> = Vec::new();
    let mut lookup: HashMap<(i64, i64), usize> = HashMap::new();
    let key = |x: f64, y: f64| ((x / h * 1e8).round() as i64, (y / h * 1e8).round() as i64);
    // crossing[node][dir] = (distance in line steps, boundary index)
    let dirs: [(isize, isize); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (-1, -1),
        (1, -1),
        (-1, 1),
    ];
    let mut crossing = vec![[None::<(f64, usize)>; 8]; interior.len()];
    for (k, ij) in lattice.iter().enumerate() {
        let [i, j] = ij.expect("lattice node");
        let (px, py) = (coord(i), coord(j));
        for (d, &(di, dj)) in dirs.iter().enumerate() {
            if node_at(i as isize + di, j as isize + dj).is_some() {
                continue;
            }
            let (dx, dy) = (di as f64 * h, dj as f64 * h);
            // |P + s d| = R, positive root
            let a = dx * dx + dy * dy;
            let b = 2.0 * (px * dx + py * dy);
            let c = px * px + py * py - radius * radius;
            let s = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
            let (bx, by) = (px + s * dx, py + s * dy);
            let kk = key(bx, by);
            let bi = *lookup.entry(kk).or_insert_with(|| {
                boundary.push(BoundaryPoint {
                    position: vec![bx, by],
                    normal: vec![bx / radius, by / radius],
                    line: None,
                });
                boundary.len() - 1
            });
            crossing[k][d] = Some((s, bi));
            if boundary[bi].line.is_none() {
                let len = a.sqrt();
                let mut nodes = vec![(k, s * len)];
                for step in 1..6 {
                    match node_at(i as isize - di * step, j as isize - dj * step) {
                        Some(m) => nodes.push((m, (s + step as f64) * len)),
                        None => break,
                    }
                }
                boundary[bi].line = Some(BoundaryLine {
                    outward: vec![dx / len, dy / len],
                    nodes,
                });
            }
        }
    }

    let stencils = lattice
        .iter()
        .enumerate()
        .map(|(k, ij)| {
            let [i, j] = ij.expect("lattice node");
            let line = |d_plus: usize, d_minus: usize| -> LineSamples {
                let (di, dj) = dirs[d_plus];
                let side = |d: usize, sign: f64| -> (f64, Sample) {
                    match crossing[k][d] {
                        Some((s, b)) => (sign * s, Sample::Boundary(b)),
                        None => {
                            let m = node_at(
                                i as isize + sign as isize * di,
                                j as isize + sign as isize * dj,
                            )
                            .expect("neighbour");
                            (sign, Sample::Interior(m))
                        }
                    }
                };
                let plus = side(d_plus, 1.0);
                let minus = side(d_minus, -1.0);
                // three points even at cuts, which keeps the operator monotone
                let points = vec![(minus.0, minus.1), (0.0, Sample::Interior(k)), (plus.0, plus.1)];
                LineSamples { points }
            };
            planar_stencil([line(0, 1), line(2, 3), line(4, 5), line(6, 7)], h, h)
        })
        .collect();

    DomainGrid {
        shape: GridShape::Disk {
            radius,
            nodes: n,
        },
        dim: 2,
        h,
        interior,
        lattice,
        boundary,
        stencils,
    }
}

fn build_radial(radius: f64, m: usize, dim: usize) -> DomainGrid {
    let h = radius / (m - 1) as f64;
    let point = |r: f64| {
        let mut p = vec![0.0; dim];
        p[0] = r;
        p
    };
    let interior: Vec<Vec<f64>> = (0..m - 1).map(|j| point(j as f64 * h)).collect();
    let boundary = vec![BoundaryPoint {
        position: point(radius),
        normal: point(1.0),
        line: Some(BoundaryLine {
            outward: point(1.0),
            nodes: (1..=6.min(m - 1)).map(|s| (m - 1 - s, s as f64 * h)).collect(),
        }),
    }];
    let sample = |j: usize| -> Sample {
        if j < m - 1 {
            Sample::Interior(j)
        } else {
            Sample::Boundary(0)
        }
    };
    let form = |pts: &[(usize, f64)]| {
        let mut f = LinearForm::default();
        for &(j, w) in pts {
            match sample(j) {
                Sample::Interior(i) => push_term(&mut f.interior, i, w),
                Sample::Boundary(b) => push_term(&mut f.boundary, b, w),
            }
        }
        f
    };
    let npairs = dim * (dim + 1) / 2;
    let stencils = (0..m - 1)
        .map(|j| {
            let (du, d2u, angular) = if j == 0 {
                // even reflection across the axis
                let d2 = form(&[(0, -2.0 / (h * h)), (1, 2.0 / (h * h))]);
                (LinearForm::default(), d2.clone(), d2)
            } else {
                let r = j as f64 * h;
                let d1 = form(&[(j - 1, -0.5 / h), (j + 1, 0.5 / h)]);
                let d2 = form(&[
                    (j - 1, 1.0 / (h * h)),
                    (j, -2.0 / (h * h)),
                    (j + 1, 1.0 / (h * h)),
                ]);
                let ang = d1.scaled(1.0 / r);
                (d1, d2, ang)
            };
            let mut gradient = vec![LinearForm::default(); dim];
            gradient[0] = du;
            let mut hessian = vec![LinearForm::default(); npairs];
            let mut k = 0;
            for a in 0..dim {
                for b in a..dim {
                    if a == b {
                        hessian[k] = if a == 0 { d2u.clone() } else { angular.clone() };
                    }
                    k += 1;
                }
            }
            NodeStencil {
                gradient,
                hessian,
                mixed: None,
            }
        })
        .collect();
    DomainGrid {
        shape: GridShape::Radial { radius, m, dim },
        dim,
        h,
        interior,
        lattice: vec![None; m - 1],
        boundary,
        stencils,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: &[f64]) -> f64 {
        let (x, y) = (p[0], p[1]);
        1.0 + 0.3 * x - 0.7 * y + 0.5 * x * x + 1.3 * x * y - 0.4 * y * y
    }

    fn fields(g: &DomainGrid, f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, Vec<f64>) {
        (
            g.interior_points().iter().map(|p| f(p)).collect(),
            g.boundary_points().iter().map(|b| f(&b.position)).collect(),
        )
    }

    #[test]
    fn weights_reproduce_polynomials() {
        let x = [-1.0, -0.3, 0.0, 0.8, 2.0];
        let w = fd_weights(0.0, &x, 2);
        for deg in 0..5 {
            let d1: f64 = x.iter().zip(&w[1]).map(|(t, c)| c * t.powi(deg)).sum();
            let d2: f64 = x.iter().zip(&w[2]).map(|(t, c)| c * t.powi(deg)).sum();
            let e1 = if deg == 1 { 1.0 } else { 0.0 };
            let e2 = if deg == 2 { 2.0 } else { 0.0 };
            assert!((d1 - e1).abs() < 1e-12 && (d2 - e2).abs() < 1e-12, "deg {deg}");
        }
    }

    #[test]
    fn disk_stencils_exact_on_quadratics() {
        let g = DomainGrid::disk(1.0, 21).unwrap();
        let (ui, ub) = fields(&g, poly);
        for k in 0..g.interior_len() {
            let (p, s) = g.derivatives(k, &ui, &ub);
            let q = &g.interior_points()[k];
            assert!((p[0] - (0.3 + q[0] + 1.3 * q[1])).abs() < 1e-10);
            assert!((p[1] - (-0.7 + 1.3 * q[0] - 0.8 * q[1])).abs() < 1e-10);
            assert!((s[(0, 0)] - 1.0).abs() < 1e-9);
            assert!((s[(0, 1)] - 1.3).abs() < 1e-9);
            assert!((s[(1, 1)] + 0.8).abs() < 1e-9);
        }
    }

    #[test]
    fn disk_partition_and_boundary_geometry() {
        let g = DomainGrid::disk(2.0, 31).unwrap();
        for p in g.interior_points() {
            assert!(p[0].hypot(p[1]) < 2.0);
        }
        for b in g.boundary_points() {
            assert!((b.position[0].hypot(b.position[1]) - 2.0).abs() < 1e-12);
            let line = b.line.as_ref().unwrap();
            assert!(!line.nodes.is_empty());
            for w in line.nodes.windows(2) {
                assert!(w[1].1 > w[0].1);
            }
        }
        // lattice coordinates are reproducible from indices
        let h = g.spacing();
        for k in 0..g.interior_len() {
            let [i, j] = g.lattice_index(k).unwrap();
            let p = &g.interior_points()[k];
            assert_eq!(p[0], -2.0 + i as f64 * h);
            assert_eq!(p[1], -2.0 + j as f64 * h);
        }
    }

    #[test]
    fn rectangle_stencils_exact_on_quadratics() {
        let g = DomainGrid::rectangle(-1.0, 2.0, 0.0, 1.0, 13, 7).unwrap();
        let (ui, ub) = fields(&g, poly);
        assert_eq!(g.interior_len(), 11 * 5);
        assert_eq!(g.boundary_len(), 13 * 7 - 55);
        for k in 0..g.interior_len() {
            let (_, s) = g.derivatives(k, &ui, &ub);
            assert!((s[(0, 1)] - 1.3).abs() < 1e-9);
        }
    }

    #[test]
    fn radial_stencils_second_order() {
        let u = |r: f64| (4.0 - r * r).sqrt();
        let mut errs = Vec::new();
        for m in [21, 41] {
            let g = DomainGrid::radial(1.0, m, 3).unwrap();
            let ui: Vec<f64> = g.interior_points().iter().map(|p| u(p[0])).collect();
            let ub = vec![u(1.0)];
            let mut err: f64 = 0.0;
            for k in 0..g.interior_len() {
                let r = g.interior_points()[k][0];
                let (p, s) = g.derivatives(k, &ui, &ub);
                let d1 = -r / u(r);
                let d2 = -4.0 / u(r).powi(3);
                err = err.max((p[0] - d1).abs()).max((s[(0, 0)] - d2).abs());
                let ang = if k == 0 { d2 } else { d1 / r };
                err = err.max((s[(2, 2)] - ang).abs());
                assert_eq!(s[(0, 1)], 0.0);
            }
            errs.push(err);
        }
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }
}
