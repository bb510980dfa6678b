//! Configuration parsing, orchestration and result files for the
//! `curvplateau` binary.

mod config;
mod run;

pub use config::{
    parse_config, AxiomSection, BoundaryConfig, CheckKind, ChecksSection, Command, ConfigError,
    ContinuationSection, DomainConfig, EvalSection, FunctionConfig, InitialConfig, KappaConfig, ModelKind,
    MuInfSection, NewtonSection, OrderingSection, RadialSection, RunConfig, SlopeSection, StabilitySection,
    StepControlKind, SuperharmonicSection, CUSTOM_FUNCTIONS,
};
pub use run::{
    run, run_file, RunOptions, RunOutcome, CONTINUATION_FILE, EVAL_FILE, EXIT_ADMISSIBILITY, EXIT_CHECK_FAILURE,
    EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO, EXIT_OK, MANIFEST_FILE, MU_INF_FILE, PROFILE_FILE, REPORT_FILE,
    SNAPSHOT_FILE,
};
