//! Newton iteration, κ-continuation and the radial shooting path.

mod continuation;
mod newton;
mod radial;

pub use continuation::{
    continuation_solve, continuation_solve_observed, ContinuationConfig, ContinuationEvent,
    ContinuationOutcome, ContinuationReport, ContinuationResult, StepControl, StepRecord,
};
pub use newton::{
    assemble_residual, newton_solve, newton_solve_observed, FailureKind, NewtonConfig,
    NewtonSolution, SolveFailure,
};
pub use radial::{radial_solve, radial_solve_with, RadialOptions, RadialProfile};
