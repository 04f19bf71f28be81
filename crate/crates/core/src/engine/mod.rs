//! Conditional states, the RAIO check, factorized evolution, twin events
//! and the first-kind / second-kind / relative-collapse pipelines.

mod conditional;
mod evolution;
mod pipeline;
mod raio;
mod spec;

pub use conditional::{
    coincidence_probability, conditional_state, conditional_state_one_sided, twin_events_check, Coincidence,
    Conditional, TwinReport,
};
pub use evolution::{
    admissible_for_raio, block_constructed, check_factorization, evolve_conditional, factorization_deviation,
    random_block_constructed,
};
pub use pipeline::{run_pipeline, PipelineComparison, PipelineKind, PipelineLabel, PipelineOutcome};
pub use raio::{verify_raio, RaioReport};
pub use spec::{lift, FactorizedEvolution, PreparatorSpec, RegionEvent, Subsystem};
