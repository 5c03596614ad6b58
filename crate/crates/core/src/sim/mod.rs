//! Simulation: synthetic ground truths, simulated crowds, reference oracles
//! and the experiment driver.

mod answers;
mod experiment;
mod oracle;
mod truth;

pub use answers::{AnswerSetupError, TruthAnswers, VoteTableAnswerError, VoteTableAnswers};
pub use experiment::{
    cell_truth, derive_seed, run_experiment, run_rng, ExperimentConfig, ExperimentRow, RowFailure, RowResult,
    TruthModel,
};
pub use oracle::{
    count_contradiction_cycles, lower_bound, pareto_oracle, CycleError, OutcomeGraph, CYCLE_COUNT_MAX_OBJECTS,
};
pub use truth::{GroundTruth, TruthError, TruthFile};
