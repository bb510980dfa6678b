//! Boundary slope of solutions spanning a sphere at small heights.

use crate::error::{Error, Result};
use crate::geometry::{fd_weights, GraphSurface};

use super::{CheckReport, CheckStatus, Location};

/// `|Du|²` on the boundary, aggregated over usable boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySlope {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// Boundary point with the largest deviation from the mean.
    pub worst_point: usize,
}

/// One-sided estimate of `|Du|²` at boundary points with constant data.
///
/// Along each grid line ending at a boundary point a degree-4 polynomial
/// through the boundary value and four interior nodes gives the derivative
/// along the line; lines meeting the boundary at `|e·n| < min_alignment`
/// are skipped.
pub fn estimate_boundary_slope(surface: &GraphSurface, min_alignment: f64) -> Result<BoundarySlope> {
    let grid = surface.grid();
    let b = surface.boundary_values();
    let (lo, hi) = b
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    if b.is_empty() || hi - lo > 1e-12 * hi.abs().max(1.0) {
        return Err(Error::Precondition(
            "boundary slope estimate needs constant boundary data".into(),
        ));
    }
    let mut values = Vec::new();
    for (j, bp) in grid.boundary_points().iter().enumerate() {
        let Some(line) = &bp.line else { continue };
        let align: f64 = line.outward.iter().zip(&bp.normal).map(|(a, c)| a * c).sum();
        if align < min_alignment || line.nodes.len() < 4 {
            continue;
        }
        let mut s = vec![0.0];
        let mut u = vec![b[j]];
        for &(idx, d) in line.nodes.iter().take(4) {
            s.push(-d);
            u.push(surface.heights()[idx]);
        }
        let w = fd_weights(0.0, &s, 1);
        let de: f64 = w[1].iter().zip(&u).map(|(a, c)| a * c).sum();
        let dn = de / align;
        values.push((j, dn * dn));
    }
    if values.is_empty() {
        return Err(Error::Precondition("no boundary point has a usable grid line".into()));
    }
    let mean = values.iter().map(|v| v.1).sum::<f64>() / values.len() as f64;
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v.1), h.max(v.1)));
    let worst_point = values
        .iter()
        .max_by(|a, c| (a.1 - mean).abs().total_cmp(&(c.1 - mean).abs()))
        .map(|v| v.0)
        .unwrap_or(0);
    Ok(BoundarySlope {
        mean,
        min,
        max,
        points: values.len(),
        worst_point,
    })
}

/// Boundary slope at one boundary height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeLevel {
    pub eps: f64,
    pub slope_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeCheckConfig {
    /// Allowed deviation relative to `1/k² − 1`.
    pub rel_tol: f64,
}

impl Default for SlopeCheckConfig {
    fn default() -> Self {
        Self { rel_tol: 0.02 }
    }
}

/// Value at `x = 0` of the interpolating polynomial through `(x_i, y_i)`.
pub fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

/// Extrapolates `|Du|²` to zero boundary height and compares with
/// `1/k² − 1`.
pub fn boundary_slope_check(levels: &[SlopeLevel], k: f64, cfg: &SlopeCheckConfig) -> Result<CheckReport> {
    if levels.len() < 2 {
        return Err(Error::Precondition(format!(
            "slope extrapolation needs at least 2 boundary heights, got {}",
            levels.len()
        )));
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Argument(format!("k = {k} must lie in (0, 1)")));
    }
    let mut lv = levels.to_vec();
    lv.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    if lv.windows(2).any(|w| !(w[1].eps < w[0].eps)) || lv.iter().any(|l| !(l.eps > 0.0)) {
        return Err(Error::Argument("boundary heights must be positive and distinct".into()));
    }
    let target = 1.0 / (k * k) - 1.0;
    let tol = cfg.rel_tol * target;
    let eps: Vec<f64> = lv.iter().map(|l| l.eps).collect();
    let vals: Vec<f64> = lv.iter().map(|l| l.slope_sq).collect();
    let extrapolated = neville_at_zero(&eps, &vals);
    let detail = format!(
        "levels [{}] extrapolated {extrapolated} target {target}",
        lv.iter()
            .map(|l| format!("{}:{}", l.eps, l.slope_sq))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let monotone = vals.windows(2).all(|w| w[1] > w[0]) || vals.windows(2).all(|w| w[1] < w[0]);
    let margin = tol - (extrapolated - target).abs();
    let status = if !monotone || !extrapolated.is_finite() {
        CheckStatus::Inconclusive
    } else if margin >= 0.0 {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(CheckReport {
        name: "boundary_slope".into(),
        status,
        worst_margin: if margin.is_finite() { margin } else { f64::MIN },
        location: None::<Location>,
        tolerances: vec![("rel_tol".into(), cfg.rel_tol)],
        detail,
    })
}
