//! Graph hypersurfaces in Euclidean space and the hyperbolic half-space.

mod grid;
mod models;
mod operators;
mod prescription;
mod surface;

pub use grid::{fd_weights, BoundaryLine, BoundaryPoint, DomainGrid, GridShape, LinearForm, NodeStencil};
pub use operators::{
    analyze_stability, covariant_hessian, curvature_field, delta_k, jet_derivative, linearize,
    stability_operator, AmbientFunction, ConstantFunction, CurvatureLinearization, DeltaKField,
    DeltaKNode, HyperbolicDistance, JetDerivative, LinearFunction, LinearOperatorMatrix,
    StabilityConfig, StabilityReport,
};
pub use models::{EquidistantCap, GeodesicSphere, SphericalCap};
pub use prescription::Prescription;
pub use surface::{
    local_geometry, metric_inverse_sqrt, radial_jet, surface_jet, write_snapshot, AmbientModel,
    GraphSurface, LocalGeometry, PointJet, RadialCurvature, SurfaceJet,
};
