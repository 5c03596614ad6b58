//! Finding every Pareto-optimal object from pairwise comparisons.
//!
//! Objects are compared one criterion at a time; each criterion is a strict
//! partial order, so two objects may be indifferent. The crate keeps the
//! transitively closed knowledge gathered so far ([`order`]), picks the next
//! question worth asking ([`selection`]), turns crowd votes into outcomes
//! ([`aggregation`]), and simulates crowds against known ground truths
//! ([`sim`]).

mod bits;
mod fenwick;

pub mod aggregation;
pub mod dot;
pub mod fixtures;
pub mod order;
pub mod selection;
pub mod sim;

pub use order::{
    compute_partition, is_terminal, CriterionId, KnowledgeBase, ObjectId, Outcome, Partition, Question, StrictFact,
    Universe,
};
pub use selection::{Strategy, StrategyKind};
