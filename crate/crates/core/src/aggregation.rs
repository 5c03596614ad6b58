//! Turning crowd votes into finalized outcomes.
//!
//! A question is finalized once enough non-skip votes arrived: the side with
//! at least a `theta` share of them wins, otherwise the objects are recorded
//! indifferent. Before an outcome enters the knowledge base,
//! [`resolve_contradiction`] downgrades strict answers that would clash with
//! recorded indifference.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{ContradictionKind, KnowledgeBase, OrderError, Outcome, Question, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vote {
    PreferX,
    PreferY,
    Indifferent,
    Skip,
}

impl Vote {
    /// The vote matching a finalized outcome.
    pub fn for_outcome(o: Outcome) -> Self {
        match o {
            Outcome::XBetter => Vote::PreferX,
            Outcome::YBetter => Vote::PreferY,
            Outcome::Indifferent => Vote::Indifferent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VoteTally {
    pub prefer_x: u32,
    pub prefer_y: u32,
    pub indifferent: u32,
    #[serde(default)]
    pub skipped: u32,
}

impl VoteTally {
    pub fn new(prefer_x: u32, prefer_y: u32, indifferent: u32) -> Self {
        VoteTally {
            prefer_x,
            prefer_y,
            indifferent,
            skipped: 0,
        }
    }

    /// Votes that expressed a preference or indifference.
    pub fn responded(&self) -> u32 {
        self.prefer_x + self.prefer_y + self.indifferent
    }

    /// All votes, skips included.
    pub fn total(&self) -> u32 {
        self.responded() + self.skipped
    }

    pub fn add(&mut self, v: Vote) {
        match v {
            Vote::PreferX => self.prefer_x += 1,
            Vote::PreferY => self.prefer_y += 1,
            Vote::Indifferent => self.indifferent += 1,
            Vote::Skip => self.skipped += 1,
        }
    }

    /// The tally seen from the reversed question.
    pub fn flipped(self) -> Self {
        VoteTally {
            prefer_x: self.prefer_y,
            prefer_y: self.prefer_x,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregationConfig {
    pub k_min: u32,
    pub theta: f64,
}

impl AggregationConfig {
    /// Five responses, 60% threshold.
    pub const DEFAULT: AggregationConfig = AggregationConfig {
        k_min: 5,
        theta: 0.6,
    };

    /// A single respondent finalizes each question.
    pub const INTERACTIVE: AggregationConfig = AggregationConfig {
        k_min: 1,
        theta: 0.51,
    };

    pub fn new(k_min: u32, theta: f64) -> Result<Self, AggregationError> {
        let cfg = AggregationConfig { k_min, theta };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AggregationError> {
        if !(self.theta > 0.5 && self.theta <= 1.0) {
            return Err(AggregationError::InvalidConfig(format!(
                "theta must be in (0.5, 1], got {}",
                self.theta
            )));
        }
        if self.k_min == 0 {
            return Err(AggregationError::InvalidConfig("k_min must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for AggregationConfig {
    fn default() -> Self {
        AggregationConfig::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregationError {
    #[error("{responded} responses, at least {k_min} needed")]
    InsufficientVotes { responded: u32, k_min: u32 },
    #[error("answer for {0} reverses a known strict fact")]
    Unresolvable(Question),
    #[error("invalid aggregation settings: {0}")]
    InvalidConfig(String),
}

/// Finalizes a tally: `XBetter` when at least `theta` of the responses
/// prefer `x`, `YBetter` likewise for `y`, `Indifferent` otherwise.
pub fn aggregate(tally: VoteTally, cfg: AggregationConfig) -> Result<Outcome, AggregationError> {
    let responded = tally.responded();
    if responded < cfg.k_min || responded == 0 {
        return Err(AggregationError::InsufficientVotes {
            responded,
            k_min: cfg.k_min,
        });
    }
    let share = |count: u32| count as f64 / responded as f64;
    Ok(if share(tally.prefer_x) >= cfg.theta {
        Outcome::XBetter
    } else if share(tally.prefer_y) >= cfg.theta {
        Outcome::YBetter
    } else {
        Outcome::Indifferent
    })
}

/// Replaces a strict outcome by `Indifferent` when recording it would make
/// some pair recorded as indifferent strictly ordered through transitivity.
///
/// An outcome equal to what is already known passes through unchanged.
/// A strict outcome whose exact reverse is known cannot be repaired.
pub fn resolve_contradiction(kb: &KnowledgeBase, q: Question, proposed: Outcome) -> Result<Outcome, AggregationError> {
    match kb.validate(q, proposed) {
        Ok(()) | Err(OrderError::AlreadyKnown(_)) => Ok(proposed),
        Err(OrderError::DirectContradiction {
            kind: ContradictionKind::DerivedOverIndifference { .. },
            ..
        }) => Ok(Outcome::Indifferent),
        Err(_) => Err(AggregationError::Unresolvable(q)),
    }
}

/// One vote by one respondent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Response {
    pub respondent: String,
    pub question: Question,
    pub vote: Vote,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Screened {
    /// Responses of respondents who passed every validation question they
    /// answered, validation answers themselves excluded.
    pub retained: Vec<Response>,
    /// Number of respondents whose responses were all dropped.
    pub rejected: usize,
}

/// Drops every response of a respondent who answered a validation question
/// differently from its expected outcome.
pub fn filter_by_validation(responses: &[Response], validation: &[(Question, Outcome)]) -> Screened {
    let expected: HashMap<Question, Vote> = validation
        .iter()
        .flat_map(|&(q, o)| {
            [
                (q, Vote::for_outcome(o)),
                (q.reversed(), Vote::for_outcome(o.flipped())),
            ]
        })
        .collect();
    let failed: HashSet<&str> = responses
        .iter()
        .filter(|r| expected.get(&r.question).is_some_and(|&v| v != r.vote))
        .map(|r| r.respondent.as_str())
        .collect();
    Screened {
        retained: responses
            .iter()
            .filter(|r| !failed.contains(r.respondent.as_str()) && !expected.contains_key(&r.question))
            .cloned()
            .collect(),
        rejected: failed.len(),
    }
}

/// One row of a vote-table file: labels plus counts, oriented `x` vs `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRow {
    pub x: String,
    pub y: String,
    pub c: String,
    pub prefer_x: u32,
    pub prefer_y: u32,
    pub indifferent: u32,
    #[serde(default)]
    pub skipped: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoteTableError {
    #[error("malformed vote table: {0}")]
    Parse(String),
    #[error("vote table row {row}: unknown {what} {label:?}")]
    UnknownLabel { row: usize, what: &'static str, label: String },
    #[error("vote table row {row} compares {label:?} with itself")]
    SelfComparison { row: usize, label: String },
    #[error("vote table lists {0} twice")]
    Duplicate(String),
}

/// Vote counts per comparison, looked up in either orientation.
#[derive(Debug, Clone, Default)]
pub struct VoteTable {
    tallies: HashMap<Question, VoteTally>,
}

impl VoteTable {
    pub fn parse(json: &str) -> Result<Vec<VoteRow>, VoteTableError> {
        serde_json::from_str(json).map_err(|e| VoteTableError::Parse(e.to_string()))
    }

    pub fn from_rows(universe: &Universe, rows: &[VoteRow]) -> Result<Self, VoteTableError> {
        let mut tallies = HashMap::new();
        for (row, r) in rows.iter().enumerate() {
            let obj = |label: &str| {
                universe.find_object(label).ok_or_else(|| VoteTableError::UnknownLabel {
                    row,
                    what: "object",
                    label: label.to_string(),
                })
            };
            let (x, y) = (obj(&r.x)?, obj(&r.y)?);
            let c = universe.find_criterion(&r.c).ok_or_else(|| VoteTableError::UnknownLabel {
                row,
                what: "criterion",
                label: r.c.clone(),
            })?;
            if x == y {
                return Err(VoteTableError::SelfComparison { row, label: r.x.clone() });
            }
            let tally = VoteTally {
                prefer_x: r.prefer_x,
                prefer_y: r.prefer_y,
                indifferent: r.indifferent,
                skipped: r.skipped,
            };
            let q = Question { x, y, c };
            let (key, tally) = if q.normalized() == q {
                (q, tally)
            } else {
                (q.normalized(), tally.flipped())
            };
            if tallies.insert(key, tally).is_some() {
                return Err(VoteTableError::Duplicate(universe.describe(q)));
            }
        }
        Ok(VoteTable { tallies })
    }

    /// Counts for `q`, oriented as asked.
    pub fn tally(&self, q: Question) -> Option<VoteTally> {
        let n = q.normalized();
        let t = self.tallies.get(&n)?;
        Some(if n == q { *t } else { t.flipped() })
    }

    pub fn len(&self) -> usize {
        self.tallies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tallies.is_empty()
    }

    /// Rows back in file form, ordered by question.
    pub fn rows(&self, universe: &Universe) -> Vec<VoteRow> {
        let mut keys: Vec<&Question> = self.tallies.keys().collect();
        keys.sort();
        keys.into_iter()
            .map(|q| {
                let t = self.tallies[q];
                VoteRow {
                    x: universe.object_label(q.x).to_string(),
                    y: universe.object_label(q.y).to_string(),
                    c: universe.criterion_label(q.c).to_string(),
                    prefer_x: t.prefer_x,
                    prefer_y: t.prefer_y,
                    indifferent: t.indifferent,
                    skipped: t.skipped,
                }
            })
            .collect()
    }
}
