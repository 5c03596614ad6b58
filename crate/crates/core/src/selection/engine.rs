//! Selection state machine shared by the framework loop and live sessions.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pools::Pool;
use super::tracker::Tracker;
use super::{
    candidate_sets, frq_select, open_questions, select_random_p, select_random_q, PairState, Strategy,
    StrategyKind,
};
use crate::aggregation::{resolve_contradiction, AggregationError};
use crate::order::{
    compute_partition, CriterionId, KnowledgeBase, ObjectId, OrderError, Outcome, Partition, Question,
    StrictFact,
};

/// How the engine finds the next question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Partition and candidate pools are updated per recorded fact.
    #[default]
    Incremental,
    /// Partition and candidate sets are recomputed from scratch before every
    /// selection. Slow; used to cross-check the incremental path.
    FullRecompute,
}

/// Result of feeding one answer to the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    /// Outcome that was recorded, after contradiction resolution.
    pub outcome: Outcome,
    /// True when the proposed outcome was replaced to avoid a contradiction.
    pub resolved: bool,
    /// True when the outcome was already known and nothing was recorded
    /// (only brute force asks such questions).
    pub redundant: bool,
    /// Strict facts derived by transitivity.
    pub derived: Vec<StrictFact>,
}

#[derive(Debug, thiserror::Error)]
pub enum ApplyError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
}

#[derive(Debug, Clone)]
pub struct Engine {
    strategy: Strategy,
    mode: SelectionMode,
    kb: KnowledgeBase,
    tracker: Tracker,
    pool: Pool,
    pair: Option<PairState>,
    rng: ChaCha8Rng,
    brute_next: u64,
    brute_cursor: Option<(usize, usize, usize)>,
    asked: usize,
    changed: Vec<usize>,
}

/// Everything needed to rebuild an [`Engine`] exactly: the recorded outcomes
/// are replayed, the rest is restored verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSnapshot {
    pub strategy: Strategy,
    pub mode: SelectionMode,
    pub objects: usize,
    pub criteria: usize,
    pub recorded: Vec<(Question, Outcome)>,
    pub asked: usize,
    pub pair: Option<PairState>,
    pub brute_next: u64,
    pub rng: ChaCha8Rng,
}

impl Engine {
    pub fn new(n: usize, criteria: usize, strategy: Strategy, rng: ChaCha8Rng, mode: SelectionMode) -> Self {
        let kb = KnowledgeBase::new(n, criteria);
        let tracker = Tracker::new(n, criteria);
        let mut pool = match mode {
            SelectionMode::Incremental => Pool::new(strategy, n, criteria),
            SelectionMode::FullRecompute => Pool::BruteForce,
        };
        if mode == SelectionMode::Incremental {
            for a in 0..n {
                for b in a + 1..n {
                    pool.touch(&tracker, a, b, strategy.use_mo());
                }
            }
        }
        Engine {
            strategy,
            mode,
            kb,
            tracker,
            pool,
            pair: None,
            rng,
            brute_next: 0,
            brute_cursor: None,
            asked: 0,
            changed: Vec::new(),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn knowledge(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn pair_state(&self) -> Option<&PairState> {
        self.pair.as_ref()
    }

    /// Questions answered so far, counting redundant brute-force questions.
    pub fn asked_count(&self) -> usize {
        self.asked
    }

    pub fn partition(&self) -> Partition {
        match self.mode {
            SelectionMode::Incremental => self.tracker.partition(),
            SelectionMode::FullRecompute => compute_partition(&self.kb),
        }
    }

    /// Sizes of the confirmed, undetermined and dominated sets.
    pub fn partition_sizes(&self) -> [usize; 3] {
        match self.mode {
            SelectionMode::Incremental => self.tracker.sizes(),
            SelectionMode::FullRecompute => {
                let (a, b, c) = compute_partition(&self.kb).sizes();
                [a, b, c]
            }
        }
    }

    pub fn is_terminal(&self) -> bool {
        match self.mode {
            SelectionMode::Incremental => self.tracker.unknown_count() == 0,
            SelectionMode::FullRecompute => compute_partition(&self.kb).unknown.is_empty(),
        }
    }

    /// Whether any candidate question remains, when the pool tracks them.
    pub fn has_candidates(&self) -> Option<bool> {
        match self.mode {
            SelectionMode::Incremental => self.pool.has_candidates(),
            SelectionMode::FullRecompute => None,
        }
    }

    /// Total number of questions brute force asks.
    pub fn question_universe(&self) -> u64 {
        let n = self.kb.object_count() as u64;
        self.kb.criterion_count() as u64 * n * n.saturating_sub(1) / 2
    }

    /// Picks the next question, or `None` when the run is over: the
    /// partition is settled, or brute force has gone through every question.
    pub fn next_question(&mut self) -> Option<Question> {
        if self.strategy.kind() == StrategyKind::BruteForce {
            return self.next_brute_force();
        }
        if self.is_terminal() {
            return None;
        }
        let use_mo = self.strategy.use_mo();
        let picked = match self.mode {
            SelectionMode::Incremental => {
                self.pool
                    .select(&self.kb, &self.tracker, self.pair.as_ref(), use_mo, &mut self.rng)
            }
            SelectionMode::FullRecompute => self.select_full(),
        };
        let (q, pair) = picked?;
        if pair.is_some() {
            self.pair = pair;
        }
        Some(q)
    }

    fn select_full(&mut self) -> Option<(Question, Option<PairState>)> {
        let part = compute_partition(&self.kb);
        let use_mo = self.strategy.use_mo();
        if !self.strategy.use_cq() {
            let open = open_questions(&self.kb, &part, use_mo);
            return select_random_q(&open, &mut self.rng).ok().map(|q| (q, None));
        }
        let mut cands = candidate_sets(&self.kb, &part);
        if !use_mo {
            cands = cands.merged();
        }
        match self.strategy.kind() {
            StrategyKind::RandomQ => select_random_q(&cands, &mut self.rng).ok().map(|q| (q, None)),
            StrategyKind::RandomP => select_random_p(self.pair.as_ref(), &cands, &mut self.rng)
                .ok()
                .map(|(q, s)| (q, Some(s))),
            StrategyKind::Frq => frq_select(self.pair.as_ref(), &self.kb, &cands)
                .ok()
                .map(|(q, s)| (q, Some(s))),
            StrategyKind::BruteForce => unreachable!("handled by next_brute_force"),
        }
    }

    /// Pairs `i < j` in lexicographic order, criteria ascending within a pair.
    fn next_brute_force(&mut self) -> Option<Question> {
        if self.brute_next >= self.question_universe() {
            return None;
        }
        let (n, c) = (self.kb.object_count(), self.kb.criterion_count());
        let (i, j, k) = match self.brute_cursor {
            Some(cur) => cur,
            None => {
                let pair = (self.brute_next / c as u64) as usize;
                let mut i = 0;
                let mut before = 0;
                while before + (n - i - 1) <= pair {
                    before += n - i - 1;
                    i += 1;
                }
                (i, i + 1 + pair - before, (self.brute_next % c as u64) as usize)
            }
        };
        let next = if k + 1 < c {
            (i, j, k + 1)
        } else if j + 1 < n {
            (i, j + 1, 0)
        } else {
            (i + 1, i + 2, 0)
        };
        self.brute_cursor = Some(next);
        self.brute_next += 1;
        Some(Question::new(i, j, k))
    }

    /// Records the answer to `q`, resolving a contradiction with recorded
    /// indifference first.
    pub fn apply(&mut self, q: Question, proposed: Outcome) -> Result<Applied, ApplyError> {
        if let Some(known) = self.kb.known(q) {
            if self.strategy.kind() != StrategyKind::BruteForce {
                return Err(OrderError::AlreadyKnown(q).into());
            }
            self.asked += 1;
            return Ok(Applied {
                outcome: known,
                resolved: false,
                redundant: true,
                derived: Vec::new(),
            });
        }
        let outcome = resolve_contradiction(&self.kb, q, proposed)?;
        let derived = self.kb.insert_validated(q, outcome);
        self.track(q, outcome, &derived);
        self.asked += 1;
        Ok(Applied {
            outcome,
            resolved: outcome != proposed,
            redundant: false,
            derived,
        })
    }

    fn record(&mut self, q: Question, outcome: Outcome) -> Result<(), OrderError> {
        let derived = self.kb.record_outcome(q, outcome)?;
        self.track(q, outcome, &derived);
        Ok(())
    }

    fn track(&mut self, q: Question, outcome: Outcome, derived: &[StrictFact]) {
        if self.mode == SelectionMode::FullRecompute {
            return;
        }
        let use_mo = self.strategy.use_mo();
        let mut changed = std::mem::take(&mut self.changed);
        changed.clear();
        self.tracker.record(q.x.index(), q.y.index(), outcome, &mut changed);
        self.pool.touch(&self.tracker, q.x.index(), q.y.index(), use_mo);
        for f in derived {
            let (b, w) = (f.better.index(), f.worse.index());
            self.tracker.record(b, w, Outcome::XBetter, &mut changed);
            self.pool.touch(&self.tracker, b, w, use_mo);
        }
        let n = self.tracker.n();
        for &z in &changed {
            for w in (0..n).filter(|&w| w != z) {
                self.pool.touch(&self.tracker, z, w, use_mo);
            }
        }
        self.changed = changed;
    }

    pub fn snapshot(&self) -> EngineSnapshot {
        EngineSnapshot {
            strategy: self.strategy,
            mode: self.mode,
            objects: self.kb.object_count(),
            criteria: self.kb.criterion_count(),
            recorded: self.kb.asked().to_vec(),
            asked: self.asked,
            pair: self.pair.clone(),
            brute_next: self.brute_next,
            rng: self.rng.clone(),
        }
    }

    pub fn restore(snap: &EngineSnapshot) -> Result<Self, OrderError> {
        let mut e = Engine::new(snap.objects, snap.criteria, snap.strategy, snap.rng.clone(), snap.mode);
        for &(q, o) in &snap.recorded {
            e.record(q, o)?;
        }
        e.asked = snap.asked;
        e.pair = snap.pair.clone();
        e.brute_next = snap.brute_next;
        Ok(e)
    }

    /// Open criteria for an oriented pair, for display.
    pub fn open_criteria(&self, x: ObjectId, y: ObjectId) -> Vec<CriterionId> {
        (0..self.kb.criterion_count())
            .map(CriterionId::from)
            .filter(|&c| self.kb.outcome_of(x, y, c).is_none())
            .collect()
    }
}
