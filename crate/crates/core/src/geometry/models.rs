//! Closed-form umbilic graphs used as initial guesses, barriers and oracles.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{AmbientModel, DomainGrid, GraphSurface};

fn radius_of(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Upper cap of a Euclidean sphere over the disk `|x| ≤ a`, lifted so that
/// the boundary sits at `height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCap {
    pub sphere_radius: f64,
    pub disk_radius: f64,
    pub height: f64,
}

impl SphericalCap {
    pub fn new(sphere_radius: f64, disk_radius: f64, height: f64) -> Result<Self> {
        if !(disk_radius > 0.0 && sphere_radius > disk_radius) {
            return Err(Error::Argument(format!(
                "sphere radius {sphere_radius} must exceed disk radius {disk_radius} > 0"
            )));
        }
        Ok(Self {
            sphere_radius,
            disk_radius,
            height,
        })
    }

    /// Every principal curvature.
    pub fn curvature(&self) -> f64 {
        1.0 / self.sphere_radius
    }

    pub fn height_at(&self, r: f64) -> f64 {
        let rr = self.sphere_radius;
        (rr * rr - r * r).sqrt() - (rr * rr - self.disk_radius * self.disk_radius).sqrt() + self.height
    }

    pub fn slope_at(&self, r: f64) -> f64 {
        -r / (self.sphere_radius * self.sphere_radius - r * r).sqrt()
    }

    pub fn surface(&self, grid: Arc<DomainGrid>) -> Result<GraphSurface> {
        GraphSurface::from_fn(AmbientModel::Euclidean, grid, |x| self.height_at(radius_of(x)))
    }
}

/// Equidistant hypersurface of the half-space with principal curvatures all
/// equal to `k`, spanning the sphere `|x| = a` at height `ε`.
///
/// Its Euclidean trace is a sphere of radius `ρ` centred at depth `−kρ`, so
/// it meets the ideal boundary at angle `arccos k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquidistantCap {
    pub k: f64,
    pub disk_radius: f64,
    pub boundary_height: f64,
    rho: f64,
}

impl EquidistantCap {
    pub fn new(k: f64, disk_radius: f64, boundary_height: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Argument(format!("equidistant curvature {k} must lie in (0, 1)")));
        }
        if !(disk_radius > 0.0 && boundary_height > 0.0) {
            return Err(Error::Argument(
                "disk radius and boundary height must be positive".into(),
            ));
        }
        let (a, e) = (disk_radius, boundary_height);
        let rho = (e * k + (e * e * k * k + (1.0 - k * k) * (a * a + e * e)).sqrt()) / (1.0 - k * k);
        Ok(Self {
            k,
            disk_radius,
            boundary_height,
            rho,
        })
    }

    /// Euclidean radius of the carrying sphere.
    pub fn euclidean_radius(&self) -> f64 {
        self.rho
    }

    pub fn height_at(&self, r: f64) -> f64 {
        -self.k * self.rho + (self.rho * self.rho - r * r).sqrt()
    }

    pub fn slope_at(&self, r: f64) -> f64 {
        -r / (self.rho * self.rho - r * r).sqrt()
    }

    /// `|Du|²` on the boundary sphere.
    pub fn boundary_slope_sq(&self) -> f64 {
        let a = self.disk_radius;
        a * a / (self.rho * self.rho - a * a)
    }

    /// Ideal-boundary limit `1/k² − 1`.
    pub fn limit_slope_sq(&self) -> f64 {
        1.0 / (self.k * self.k) - 1.0
    }

    pub fn surface(&self, grid: Arc<DomainGrid>) -> Result<GraphSurface> {
        GraphSurface::from_fn(AmbientModel::HyperbolicHalfSpace, grid, |x| {
            self.height_at(radius_of(x))
        })
    }
}

/// Geodesic sphere of the half-space: centre `(c, y)` and radius `ρ`.
///
/// Its Euclidean trace is the sphere of radius `y·sinh ρ` centred at
/// `(c, y·cosh ρ)`; every principal curvature equals `coth ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl GeodesicSphere {
    pub fn euclidean_center(&self) -> Vec<f64> {
        let mut c = self.center.clone();
        let y = c.last_mut().expect("non-empty centre");
        *y *= self.radius.cosh();
        c
    }

    pub fn euclidean_radius(&self) -> f64 {
        self.center.last().copied().unwrap_or(0.0) * self.radius.sinh()
    }

    pub fn curvature(&self) -> f64 {
        1.0 / self.radius.tanh()
    }

    /// Lower hemisphere as a radial profile `(u, u′, u″)` at horizontal
    /// distance `r` from the centre axis.
    pub fn lower_profile(&self, r: f64) -> Option<(f64, f64, f64)> {
        let big = self.euclidean_radius();
        let yc = self.euclidean_center().last().copied()?;
        let s2 = big * big - r * r;
        if !(s2 > 0.0) {
            return None;
        }
        let s = s2.sqrt();
        Some((yc - s, r / s, big * big / (s2 * s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::radial_jet;
    use crate::symmfunc::CurvatureFunction;

    #[test]
    fn equidistant_meets_prescribed_boundary() {
        for &k in &[0.3, 0.5, 0.8] {
            let cap = EquidistantCap::new(k, 1.0, 0.02).unwrap();
            assert!((cap.height_at(1.0) - 0.02).abs() < 1e-14);
            let f = CurvatureFunction::gauss(2).unwrap();
            for &r in &[0.0, 0.4, 0.95] {
                let rc = radial_jet(
                    AmbientModel::HyperbolicHalfSpace,
                    &f,
                    r,
                    cap.height_at(r),
                    if r == 0.0 { 0.0 } else { cap.slope_at(r) },
                    -cap.rho * cap.rho / (cap.rho * cap.rho - r * r).powf(1.5),
                )
                .unwrap();
                assert!((rc.kappa_radial - k).abs() < 1e-12);
                assert!((rc.kappa_angular - k).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_slope_tends_to_ideal_limit() {
        let k = 0.5;
        let mut prev = f64::INFINITY;
        for &e in &[1e-1, 1e-2, 1e-3, 1e-4] {
            let cap = EquidistantCap::new(k, 1.0, e).unwrap();
            let err = (cap.boundary_slope_sq() - cap.limit_slope_sq()).abs();
            assert!(err < prev);
            // linear in the boundary height
            assert!(err < 30.0 * e, "{err} at {e}");
            prev = err;
        }
    }

    #[test]
    fn geodesic_sphere_has_coth_curvature() {
        let s = GeodesicSphere {
            center: vec![0.3, 2.0],
            radius: 1.2,
        };
        let f = CurvatureFunction::gauss(2).unwrap();
        for &r in &[0.0, 0.5, 1.5] {
            let (u, du, d2u) = s.lower_profile(r).unwrap();
            let rc = radial_jet(AmbientModel::HyperbolicHalfSpace, &f, r, u, du, d2u).unwrap();
            assert!((rc.kappa_radial - s.curvature()).abs() < 1e-12);
            let kh = rc.kappa_angular;
            assert!((kh - s.curvature()).abs() < 1e-12, "{kh}");
        }
    }
}
