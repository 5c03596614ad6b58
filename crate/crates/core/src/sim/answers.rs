//! Answer sources for the framework loop.

use std::convert::Infallible;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::truth::GroundTruth;
use crate::aggregation::{aggregate, AggregationConfig, AggregationError, Vote, VoteTable, VoteTally};
use crate::order::{Outcome, Question, Universe};
use crate::selection::AnswerSource;

/// Simulated crowd answering from a ground truth.
///
/// Each question gets `k` votes for the true outcome; each vote is replaced
/// by one of the two other choices with probability `noise`. The votes are
/// finalized by [`aggregate`]. With zero noise the true outcome is returned
/// directly.
#[derive(Debug, Clone)]
pub struct TruthAnswers<'a> {
    truth: &'a GroundTruth,
    noise: f64,
    k: u32,
    cfg: AggregationConfig,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnswerSetupError {
    #[error("noise must be in [0, 0.5), got {0}")]
    Noise(f64),
    #[error("{k} votes per question cannot reach the minimum of {k_min}")]
    TooFewVotes { k: u32, k_min: u32 },
    #[error(transparent)]
    Config(#[from] AggregationError),
}

impl<'a> TruthAnswers<'a> {
    pub fn noiseless(truth: &'a GroundTruth) -> Self {
        TruthAnswers {
            truth,
            noise: 0.0,
            k: 1,
            cfg: AggregationConfig::INTERACTIVE,
            rng: rand::SeedableRng::seed_from_u64(0),
        }
    }

    pub fn noisy(
        truth: &'a GroundTruth,
        noise: f64,
        k: u32,
        cfg: AggregationConfig,
        rng: ChaCha8Rng,
    ) -> Result<Self, AnswerSetupError> {
        if !(0.0..0.5).contains(&noise) {
            return Err(AnswerSetupError::Noise(noise));
        }
        cfg.validate()?;
        if k < cfg.k_min {
            return Err(AnswerSetupError::TooFewVotes { k, k_min: cfg.k_min });
        }
        Ok(TruthAnswers {
            truth,
            noise,
            k,
            cfg,
            rng,
        })
    }
}

impl AnswerSource for TruthAnswers<'_> {
    type Error = Infallible;

    fn answer(&mut self, q: Question) -> Result<Outcome, Infallible> {
        let truth = self.truth.outcome(q.x, q.y, q.c);
        if self.noise == 0.0 {
            return Ok(truth);
        }
        let right = Vote::for_outcome(truth);
        let others: Vec<Vote> = [Vote::PreferX, Vote::PreferY, Vote::Indifferent]
            .into_iter()
            .filter(|&v| v != right)
            .collect();
        let mut tally = VoteTally::default();
        for _ in 0..self.k {
            let vote = if self.rng.gen::<f64>() < self.noise {
                others[self.rng.gen_range(0..2)]
            } else {
                right
            };
            tally.add(vote);
        }
        Ok(aggregate(tally, self.cfg).expect("k >= k_min checked at construction"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoteTableAnswerError {
    #[error("no votes recorded for {0}")]
    IncompleteDataset(String),
    #[error("votes for {question}: {source}")]
    Aggregation {
        question: String,
        #[source]
        source: AggregationError,
    },
}

/// Answers from a recorded vote table.
#[derive(Debug, Clone)]
pub struct VoteTableAnswers<'a> {
    universe: &'a Universe,
    table: &'a VoteTable,
    cfg: AggregationConfig,
}

impl<'a> VoteTableAnswers<'a> {
    pub fn new(universe: &'a Universe, table: &'a VoteTable, cfg: AggregationConfig) -> Self {
        VoteTableAnswers { universe, table, cfg }
    }
}

impl AnswerSource for VoteTableAnswers<'_> {
    type Error = VoteTableAnswerError;

    fn answer(&mut self, q: Question) -> Result<Outcome, VoteTableAnswerError> {
        let tally = self
            .table
            .tally(q)
            .ok_or_else(|| VoteTableAnswerError::IncompleteDataset(self.universe.describe(q)))?;
        aggregate(tally, self.cfg).map_err(|source| VoteTableAnswerError::Aggregation {
            question: self.universe.describe(q),
            source,
        })
    }
}
