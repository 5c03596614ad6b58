//! The iterative loop: select a question, obtain its outcome, record it,
//! repeat until no object is undetermined.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::engine::{ApplyError, Engine, SelectionMode};
use super::{candidate_sets, property2_violation, Strategy};
use crate::order::{compute_partition, KnowledgeBase, Outcome, Partition, Question};

/// Supplies a finalized outcome for any question.
pub trait AnswerSource {
    type Error: std::error::Error + Send + Sync + 'static;

    fn answer(&mut self, q: Question) -> Result<Outcome, Self::Error>;
}

impl<F, E> AnswerSource for F
where
    F: FnMut(Question) -> Result<Outcome, E>,
    E: std::error::Error + Send + Sync + 'static,
{
    type Error = E;

    fn answer(&mut self, q: Question) -> Result<Outcome, E> {
        self(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntrySource {
    /// Asked and recorded as answered.
    Asked,
    /// Asked; the answer contradicted recorded indifference and was recorded
    /// as indifferent instead.
    Resolved,
    /// Asked although the outcome was already known; nothing recorded.
    Redundant,
    /// Not asked: follows by transitivity from the preceding answer.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub question: Question,
    pub outcome: Outcome,
    pub source: EntrySource,
    /// Sizes of the confirmed, undetermined and dominated sets after the entry.
    pub sizes: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub strategy: Strategy,
    pub objects: usize,
    pub criteria: usize,
    pub entries: Vec<TranscriptEntry>,
    pub partition: Partition,
    pub asked: usize,
    pub derived: usize,
    /// Iterations where "no candidate question" and "no undetermined
    /// object" disagreed.
    pub property2_violations: usize,
}

impl Transcript {
    /// Entries for questions that were put to the answer source.
    pub fn asked_entries(&self) -> impl Iterator<Item = &TranscriptEntry> {
        self.entries.iter().filter(|e| e.source != EntrySource::Derived)
    }

    /// Rebuilds the knowledge base from the recorded entries.
    pub fn replay(&self) -> Result<KnowledgeBase, crate::order::OrderError> {
        let mut kb = KnowledgeBase::new(self.objects, self.criteria);
        for e in &self.entries {
            if matches!(e.source, EntrySource::Asked | EntrySource::Resolved) {
                kb.record_outcome(e.question, e.outcome)?;
            }
        }
        Ok(kb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: SelectionMode,
    /// Keep one entry per asked question. Off for bulk experiments.
    pub record_entries: bool,
    /// Add one [`EntrySource::Derived`] entry per derived fact.
    pub record_derived: bool,
    /// Recompute partition and candidate sets from scratch at every
    /// iteration to check that they empty out together. Costs O(n²·|C|) per
    /// iteration.
    pub check_property2: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: SelectionMode::Incremental,
            record_entries: true,
            record_derived: false,
            check_property2: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FrameworkError<E: std::error::Error + 'static> {
    #[error("answer source failed: {0}")]
    Answer(#[source] E),
    #[error(transparent)]
    Apply(#[from] ApplyError),
}

/// Runs the loop to completion and returns the transcript.
pub fn run_framework<A: AnswerSource>(
    objects: usize,
    criteria: usize,
    strategy: Strategy,
    answers: &mut A,
    rng: ChaCha8Rng,
    opts: RunOptions,
) -> Result<Transcript, FrameworkError<A::Error>> {
    let mut engine = Engine::new(objects, criteria, strategy, rng, opts.mode);
    let mut entries = Vec::new();
    let mut violations = 0;
    loop {
        if let Some(has) = engine.has_candidates() {
            if has == engine.is_terminal() {
                violations += 1;
            }
        }
        if opts.check_property2 && property2_violation(engine.knowledge()) {
            violations += 1;
        }
        let Some(q) = engine.next_question() else {
            if !engine.is_terminal() {
                // selection came up empty while objects are undetermined
                violations += 1;
            }
            break;
        };
        let proposed = answers.answer(q).map_err(FrameworkError::Answer)?;
        let applied = engine.apply(q, proposed)?;
        if !opts.record_entries {
            continue;
        }
        let sizes = engine.partition_sizes();
        let source = if applied.redundant {
            EntrySource::Redundant
        } else if applied.resolved {
            EntrySource::Resolved
        } else {
            EntrySource::Asked
        };
        entries.push(TranscriptEntry {
            question: q,
            outcome: applied.outcome,
            source,
            sizes,
        });
        if opts.record_derived {
            entries.extend(applied.derived.iter().map(|f| TranscriptEntry {
                question: Question {
                    x: f.better,
                    y: f.worse,
                    c: f.criterion,
                },
                outcome: Outcome::XBetter,
                source: EntrySource::Derived,
                sizes,
            }));
        }
    }
    Ok(Transcript {
        strategy,
        objects,
        criteria,
        entries,
        partition: engine.partition(),
        asked: engine.asked_count(),
        derived: engine.knowledge().derived_count(),
        property2_violations: violations,
    })
}

/// Replays the transcript and checks that every asked question was a
/// candidate question at the moment it was selected.
pub fn assert_candidate_only(transcript: &Transcript) -> bool {
    let mut kb = KnowledgeBase::new(transcript.objects, transcript.criteria);
    for e in transcript.asked_entries() {
        let part = compute_partition(&kb);
        if !candidate_sets(&kb, &part).contains(e.question) {
            return false;
        }
        if e.source != EntrySource::Redundant && kb.record_outcome(e.question, e.outcome).is_err() {
            return false;
        }
    }
    true
}
