//! Experiment grid: many seeded framework runs against synthetic or fixed
//! ground truths, each checked against the Pareto oracle.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::answers::TruthAnswers;
use super::oracle::{lower_bound, pareto_oracle};
use super::truth::GroundTruth;
use crate::aggregation::AggregationConfig;
use crate::selection::{run_framework, RunOptions, Strategy};

/// One framework run. Column order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub criteria: usize,
    pub strategy: String,
    pub seed: u64,
    pub questions_asked: usize,
    pub derived_facts: usize,
    pub pareto_count: usize,
    pub lower_bound: u64,
    /// Wall-clock time of the run; only filled in when timing is requested,
    /// so that output is byte-stable otherwise.
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RowFailure {
    #[error("{} n={} seed={}: found {} Pareto-optimal objects, oracle has {expected}", .row.strategy, .row.n, .row.seed, .row.pareto_count)]
    OracleMismatch { row: ExperimentRow, expected: usize },
    #[error("{} n={} seed={}: {} questions is below the lower bound {}", .row.strategy, .row.n, .row.seed, .row.questions_asked, .row.lower_bound)]
    BelowLowerBound { row: ExperimentRow },
    #[error("{strategy} n={n} seed={seed}: {message}")]
    Run {
        n: usize,
        strategy: String,
        seed: u64,
        message: String,
    },
}

pub type RowResult = Result<ExperimentRow, RowFailure>;

/// Where each replicate's ground truth comes from.
#[derive(Debug, Clone)]
pub enum TruthModel {
    /// Standard-normal scores per object and criterion, perturbed into
    /// relations.
    NormalScores,
    /// The same truth for every replicate; grid cells are ignored.
    Fixed(GroundTruth),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid: Vec<(usize, usize)>,
    pub strategies: Vec<Strategy>,
    pub seeds: u64,
    pub base_seed: u64,
    pub noise: f64,
    /// Votes per question when `noise > 0`.
    pub votes: u32,
    pub aggregation: AggregationConfig,
    pub timing: bool,
    pub truth: TruthModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: vec![(100, 4)],
            strategies: vec![Strategy::FRQ, Strategy::RANDOM_P, Strategy::RANDOM_Q],
            seeds: 30,
            base_seed: 0,
            noise: 0.0,
            votes: 10,
            aggregation: AggregationConfig::DEFAULT,
            timing: false,
            truth: TruthModel::NormalScores,
        }
    }
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds the parts into one seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5eed, |acc, &p| mix(acc ^ mix(p)))
}

fn name_key(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Ground truth for replicate `seed` of cell `(n, criteria)`.
pub fn cell_truth(n: usize, criteria: usize, seed: u64) -> GroundTruth {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[n as u64, criteria as u64, seed]));
    GroundTruth::synthetic(n, criteria, &mut rng)
}

/// Random source for one strategy run.
pub fn run_rng(n: usize, criteria: usize, seed: u64, strategy: Strategy) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(&[n as u64, criteria as u64, seed, name_key(strategy.name())]))
}

fn run_one(truth: &GroundTruth, strategy: Strategy, seed: u64, cfg: &ExperimentConfig) -> RowResult {
    let (n, criteria) = (truth.object_count(), truth.criterion_count());
    let failure = |message: String| RowFailure::Run {
        n,
        strategy: strategy.name().to_string(),
        seed,
        message,
    };
    let rng = run_rng(n, criteria, seed, strategy);
    let opts = RunOptions {
        record_entries: false,
        ..RunOptions::default()
    };
    let started = Instant::now();
    let transcript = if cfg.noise == 0.0 {
        run_framework(n, criteria, strategy, &mut TruthAnswers::noiseless(truth), rng, opts)
    } else {
        let vote_rng = ChaCha8Rng::seed_from_u64(derive_seed(&[n as u64, criteria as u64, seed, name_key("votes")]));
        let mut answers = TruthAnswers::noisy(truth, cfg.noise, cfg.votes, cfg.aggregation, vote_rng)
            .map_err(|e| failure(e.to_string()))?;
        run_framework(n, criteria, strategy, &mut answers, rng, opts)
    }
    .map_err(|e| failure(e.to_string()))?;
    let elapsed = started.elapsed();
    if transcript.property2_violations > 0 {
        return Err(failure(format!("{} property-2 violations", transcript.property2_violations)));
    }
    let oracle = pareto_oracle(truth);
    let row = ExperimentRow {
        n,
        criteria,
        strategy: strategy.name().to_string(),
        seed,
        questions_asked: transcript.asked,
        derived_facts: transcript.derived,
        pareto_count: transcript.partition.confirmed.len(),
        lower_bound: lower_bound(n as u64, criteria as u64, oracle.len() as u64),
        runtime_ms: cfg.timing.then_some(elapsed.as_secs_f64() * 1000.0),
    };
    if cfg.noise == 0.0 {
        if transcript.partition.confirmed != oracle {
            return Err(RowFailure::OracleMismatch {
                expected: oracle.len(),
                row,
            });
        }
        if (row.questions_asked as u64) < row.lower_bound {
            return Err(RowFailure::BelowLowerBound { row });
        }
    }
    Ok(row)
}

/// Runs every cell × strategy × seed and hands each row to `sink` as soon as
/// its cell is done. Within a cell, rows come strategy by strategy in
/// configuration order, seeds ascending.
pub fn run_experiment(cfg: &ExperimentConfig, mut sink: impl FnMut(&RowResult)) {
    let cells: Vec<(usize, usize)> = match &cfg.truth {
        TruthModel::NormalScores => cfg.grid.clone(),
        TruthModel::Fixed(t) => vec![(t.object_count(), t.criterion_count())],
    };
    for (n, criteria) in cells {
        let seeds: Vec<u64> = (0..cfg.seeds).map(|r| cfg.base_seed + r).collect();
        let per_seed: Vec<Vec<RowResult>> = seeds
            .par_iter()
            .map(|&seed| {
                let truth = match &cfg.truth {
                    TruthModel::NormalScores => cell_truth(n, criteria, seed),
                    TruthModel::Fixed(t) => t.clone(),
                };
                cfg.strategies
                    .iter()
                    .map(|&s| run_one(&truth, s, seed, cfg))
                    .collect()
            })
            .collect();
        for s in 0..cfg.strategies.len() {
            for rows in &per_seed {
                sink(&rows[s]);
            }
        }
    }
}
