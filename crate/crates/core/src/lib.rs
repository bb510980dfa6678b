pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod numfmt;
pub mod solver;
pub mod spectral;
pub mod symmfunc;

pub use error::{Error, Result};
