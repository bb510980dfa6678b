//! Prescribed curvature fields `κ(x, u)`.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Right-hand side of `K = κ`, evaluated at interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Prescription {
    Constant(f64),
    /// `constant + coefficients·x + height·u`.
    Affine {
        constant: f64,
        coefficients: Vec<f64>,
        height: f64,
    },
    /// One value per interior node; no spatial gradient is available.
    Grid(Arc<Vec<f64>>),
    /// `(1 − t)·from + t·to`.
    Blend {
        from: Box<Prescription>,
        to: Box<Prescription>,
        t: f64,
    },
}

impl Prescription {
    pub fn blend(from: &Prescription, to: &Prescription, t: f64) -> Self {
        if t == 0.0 {
            return from.clone();
        }
        if t == 1.0 {
            return to.clone();
        }
        Prescription::Blend {
            from: Box::new(from.clone()),
            to: Box::new(to.clone()),
            t,
        }
    }

    pub fn value(&self, node: usize, x: &[f64], u: f64) -> f64 {
        match self {
            Prescription::Constant(c) => *c,
            Prescription::Affine {
                constant,
                coefficients,
                height,
            } => constant + coefficients.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + height * u,
            Prescription::Grid(v) => v[node],
            Prescription::Blend { from, to, t } => {
                (1.0 - t) * from.value(node, x, u) + t * to.value(node, x, u)
            }
        }
    }

    /// `∂κ/∂u`.
    pub fn d_height(&self, node: usize, x: &[f64], u: f64) -> f64 {
        match self {
            Prescription::Constant(_) | Prescription::Grid(_) => 0.0,
            Prescription::Affine { height, .. } => *height,
            Prescription::Blend { from, to, t } => {
                (1.0 - t) * from.d_height(node, x, u) + t * to.d_height(node, x, u)
            }
        }
    }

    /// Coordinate gradient in ambient space, `(∂_x κ, ∂_u κ)`.
    pub fn ambient_gradient(&self, node: usize, x: &[f64], u: f64) -> Option<Vec<f64>> {
        match self {
            Prescription::Constant(_) => Some(vec![0.0; x.len() + 1]),
            Prescription::Affine {
                coefficients,
                height,
                ..
            } => {
                let mut g = coefficients.clone();
                g.resize(x.len(), 0.0);
                g.push(*height);
                Some(g)
            }
            Prescription::Grid(_) => None,
            Prescription::Blend { from, to, t } => {
                let a = from.ambient_gradient(node, x, u)?;
                let b = to.ambient_gradient(node, x, u)?;
                Some(a.iter().zip(&b).map(|(p, q)| (1.0 - t) * p + t * q).collect())
            }
        }
    }

    /// Checks dimensions against a grid with `n` coordinates and `len` nodes.
    pub fn validate(&self, n: usize, len: usize) -> Result<()> {
        match self {
            Prescription::Constant(c) if !c.is_finite() => {
                Err(Error::Argument("constant prescription is not finite".into()))
            }
            Prescription::Affine { coefficients, .. } if coefficients.len() != n => {
                Err(Error::Argument(format!(
                    "affine prescription has {} coefficients, grid has {n} coordinates",
                    coefficients.len()
                )))
            }
            Prescription::Grid(v) if v.len() != len => Err(Error::Argument(format!(
                "grid prescription has {} values, grid has {len} interior nodes",
                v.len()
            ))),
            Prescription::Blend { from, to, .. } => {
                from.validate(n, len)?;
                to.validate(n, len)
            }
            _ => Ok(()),
        }
    }
}
