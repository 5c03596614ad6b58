//! Question selection: candidate questions, macro-ordering, and the
//! micro-ordering strategies RandomQ, RandomP and FRQ.
//!
//! The functions in this module are reference implementations that work from
//! a freshly computed [`Partition`]. The [`Engine`] keeps the same state
//! incrementally and is what the framework loop and the service use; its
//! [`SelectionMode::FullRecompute`] mode routes through the functions here so
//! the two paths can be checked against each other.

mod engine;
mod framework;
mod pools;
mod tracker;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{compute_partition, CriterionId, KnowledgeBase, ObjectId, Partition, Question};

pub use engine::{Applied, ApplyError, Engine, EngineSnapshot, SelectionMode};
pub use framework::{
    assert_candidate_only, run_framework, AnswerSource, EntrySource, FrameworkError, RunOptions, Transcript,
    TranscriptEntry,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    BruteForce,
    RandomQ,
    RandomP,
    Frq,
}

/// A selection strategy plus the candidate-question (`use_cq`) and
/// macro-ordering (`use_mo`) switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Strategy {
    kind: StrategyKind,
    use_cq: bool,
    use_mo: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("{0:?} only works on candidate questions")]
    NeedsCandidates(StrategyKind),
    #[error("unknown strategy {0:?}")]
    UnknownName(String),
}

impl Strategy {
    pub fn new(kind: StrategyKind, use_cq: bool, use_mo: bool) -> Result<Self, StrategyError> {
        if !use_cq && matches!(kind, StrategyKind::RandomP | StrategyKind::Frq) {
            return Err(StrategyError::NeedsCandidates(kind));
        }
        Ok(Strategy {
            kind,
            use_cq,
            use_mo,
        })
    }

    pub const BRUTE_FORCE: Strategy = Strategy::fixed(StrategyKind::BruteForce, true, true);
    pub const RANDOM_Q: Strategy = Strategy::fixed(StrategyKind::RandomQ, true, true);
    pub const RANDOM_P: Strategy = Strategy::fixed(StrategyKind::RandomP, true, true);
    pub const FRQ: Strategy = Strategy::fixed(StrategyKind::Frq, true, true);
    /// Candidate questions without macro-ordering.
    pub const CQ_NO_MO: Strategy = Strategy::fixed(StrategyKind::RandomQ, true, false);
    /// Macro-ordering over all open questions.
    pub const NO_CQ_MO: Strategy = Strategy::fixed(StrategyKind::RandomQ, false, true);
    /// Uniform over all open questions.
    pub const NO_CQ_NO_MO: Strategy = Strategy::fixed(StrategyKind::RandomQ, false, false);

    const fn fixed(kind: StrategyKind, use_cq: bool, use_mo: bool) -> Self {
        Strategy {
            kind,
            use_cq,
            use_mo,
        }
    }

    /// Every strategy and ablation, in reporting order.
    pub const ALL: [Strategy; 7] = [
        Strategy::FRQ,
        Strategy::RANDOM_P,
        Strategy::RANDOM_Q,
        Strategy::CQ_NO_MO,
        Strategy::NO_CQ_MO,
        Strategy::NO_CQ_NO_MO,
        Strategy::BRUTE_FORCE,
    ];

    pub fn kind(self) -> StrategyKind {
        self.kind
    }

    pub fn use_cq(self) -> bool {
        self.use_cq
    }

    pub fn use_mo(self) -> bool {
        self.use_mo
    }

    /// Stable machine name, used in CSV output and JSON.
    pub fn name(self) -> &'static str {
        match (self.kind, self.use_cq, self.use_mo) {
            (StrategyKind::BruteForce, _, _) => "bruteforce",
            (StrategyKind::Frq, _, true) => "frq",
            (StrategyKind::Frq, _, false) => "frq-nomo",
            (StrategyKind::RandomP, _, true) => "randomp",
            (StrategyKind::RandomP, _, false) => "randomp-nomo",
            (StrategyKind::RandomQ, true, true) => "randomq",
            (StrategyKind::RandomQ, true, false) => "cq-nomo",
            (StrategyKind::RandomQ, false, true) => "nocq-mo",
            (StrategyKind::RandomQ, false, false) => "nocq-nomo",
        }
    }

    /// Name used in human-readable tables.
    pub fn display_name(self) -> &'static str {
        match self.name() {
            "bruteforce" => "BruteForce",
            "frq" => "FRQ",
            "frq-nomo" => "FRQ-MO",
            "randomp" => "RandomP",
            "randomp-nomo" => "RandomP-MO",
            "randomq" => "RandomQ",
            "cq-nomo" => "+CQ-MO",
            "nocq-mo" => "-CQ+MO",
            _ => "-CQ-MO",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "bruteforce" | "brute-force" => Strategy::BRUTE_FORCE,
            "frq" => Strategy::FRQ,
            "frq-nomo" => Strategy::fixed(StrategyKind::Frq, true, false),
            "randomp" => Strategy::RANDOM_P,
            "randomp-nomo" => Strategy::fixed(StrategyKind::RandomP, true, false),
            "randomq" | "+cq+mo" | "cq-mo" => Strategy::RANDOM_Q,
            "cq-nomo" | "+cq-mo" => Strategy::CQ_NO_MO,
            "nocq-mo" | "-cq+mo" => Strategy::NO_CQ_MO,
            "nocq-nomo" | "-cq-mo" => Strategy::NO_CQ_NO_MO,
            _ => return Err(StrategyError::UnknownName(s)),
        })
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no candidate question left to select")]
pub struct Exhausted;

/// Candidate questions split by macro-ordering tier, each sorted by `(x, y, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSets {
    /// Questions whose `y` is not known to be dominated.
    pub q1: Vec<Question>,
    /// Questions whose `y` is known to be dominated.
    pub q2: Vec<Question>,
}

impl CandidateSets {
    pub fn is_empty(&self) -> bool {
        self.q1.is_empty() && self.q2.is_empty()
    }

    pub fn len(&self) -> usize {
        self.q1.len() + self.q2.len()
    }

    /// Both tiers as one, for runs without macro-ordering.
    pub fn merged(mut self) -> Self {
        self.q1.append(&mut self.q2);
        self.q1.sort_unstable();
        self
    }

    /// The tier selection draws from: `q1` unless it is empty.
    pub fn active_tier(&self) -> &[Question] {
        if self.q1.is_empty() {
            &self.q2
        } else {
            &self.q1
        }
    }

    pub fn contains(&self, q: Question) -> bool {
        self.q1.binary_search(&q).is_ok() || self.q2.binary_search(&q).is_ok()
    }
}

/// All oriented questions `x ?c y` with an unknown outcome, `x` undetermined,
/// and no criterion where `x` is already better than `y`.
pub fn candidate_sets(kb: &KnowledgeBase, part: &Partition) -> CandidateSets {
    let mut sets = CandidateSets::default();
    for &x in &part.unknown {
        for y in (0..kb.object_count()).map(ObjectId::from) {
            if y == x || !kb.may_dominate(y, x) {
                continue;
            }
            let tier = if part.is_dominated(y) {
                &mut sets.q2
            } else {
                &mut sets.q1
            };
            for c in (0..kb.criterion_count()).map(CriterionId::from) {
                if kb.outcome_of(x, y, c).is_none() {
                    tier.push(Question { x, y, c });
                }
            }
        }
    }
    sets
}

/// Open questions for runs that ignore the candidate conditions: every
/// unknown comparison once, oriented with the smaller object first. With
/// macro-ordering, a question goes to the first tier when at least one of its
/// objects is not known to be dominated.
pub fn open_questions(kb: &KnowledgeBase, part: &Partition, use_mo: bool) -> CandidateSets {
    let mut sets = CandidateSets::default();
    let n = kb.object_count();
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (ObjectId::from(i), ObjectId::from(j));
            let low = use_mo && part.is_dominated(x) && part.is_dominated(y);
            for c in (0..kb.criterion_count()).map(CriterionId::from) {
                if kb.outcome_of(x, y, c).is_none() {
                    let tier = if low { &mut sets.q2 } else { &mut sets.q1 };
                    tier.push(Question { x, y, c });
                }
            }
        }
    }
    sets
}

/// Uniform draw from `q1`, or from `q2` when `q1` is empty.
pub fn select_random_q<R: Rng + ?Sized>(cands: &CandidateSets, rng: &mut R) -> Result<Question, Exhausted> {
    let tier = cands.active_tier();
    if tier.is_empty() {
        return Err(Exhausted);
    }
    let r = rng.gen_range(0..tier.len() as u64) as usize;
    Ok(tier[r])
}

/// The pair a strategy keeps asking about, and the criteria still open for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairState {
    pub x: ObjectId,
    pub y: ObjectId,
    pub remaining: Vec<CriterionId>,
}

fn pair_key(a: ObjectId, b: ObjectId) -> (ObjectId, ObjectId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Best oriented candidate question for criterion `c` of the unordered pair:
/// the orientation in the lower tier, the smaller object first on ties.
fn orient(cands: &CandidateSets, lo: ObjectId, hi: ObjectId, c: CriterionId) -> Option<Question> {
    let fwd = Question { x: lo, y: hi, c };
    let rev = Question { x: hi, y: lo, c };
    [&cands.q1, &cands.q2]
        .into_iter()
        .find_map(|tier| [fwd, rev].into_iter().find(|q| tier.binary_search(q).is_ok()))
}

/// Criteria with a candidate question for the unordered pair, ascending.
fn pair_criteria(cands: &CandidateSets, lo: ObjectId, hi: ObjectId) -> Vec<CriterionId> {
    let mut cs: Vec<CriterionId> = cands
        .q1
        .iter()
        .chain(&cands.q2)
        .filter(|q| pair_key(q.x, q.y) == (lo, hi))
        .map(|q| q.c)
        .collect();
    cs.sort_unstable();
    cs.dedup();
    cs
}

/// RandomP: keep comparing the current pair while it has candidate
/// questions, otherwise draw a new pair uniformly among the pairs with
/// candidate questions in the active tier. The criterion is drawn uniformly.
pub fn select_random_p<R: Rng + ?Sized>(
    state: Option<&PairState>,
    cands: &CandidateSets,
    rng: &mut R,
) -> Result<(Question, PairState), Exhausted> {
    if cands.is_empty() {
        return Err(Exhausted);
    }
    let current = state
        .map(|s| pair_key(s.x, s.y))
        .filter(|&(lo, hi)| !pair_criteria(cands, lo, hi).is_empty());
    let (lo, hi) = match current {
        Some(p) => p,
        None => {
            let mut pairs: Vec<(ObjectId, ObjectId)> =
                cands.active_tier().iter().map(|q| pair_key(q.x, q.y)).collect();
            pairs.sort_unstable();
            pairs.dedup();
            pairs[rng.gen_range(0..pairs.len() as u64) as usize]
        }
    };
    let criteria = pair_criteria(cands, lo, hi);
    let c = criteria[rng.gen_range(0..criteria.len() as u64) as usize];
    let q = orient(cands, lo, hi, c).expect("criterion taken from the candidate sets");
    let remaining = criteria.into_iter().filter(|&k| k != c).collect();
    Ok((q, PairState { x: lo, y: hi, remaining }))
}

/// `r_c(x,y)`: how much more `y` looks like a winner on `c` than `x` does,
/// counting objects below, level with, and above each of them.
pub fn criterion_score(kb: &KnowledgeBase, x: ObjectId, y: ObjectId, c: CriterionId) -> i64 {
    let cl = kb.closure(c);
    let standing = |z: ObjectId| {
        let z = z.index();
        cl.better_than_count(z) as i64 + cl.indifferent_to_count(z) as i64 - cl.worse_than_count(z) as i64
    };
    standing(y) - standing(x)
}

/// Criteria ordered by decreasing [`criterion_score`], ties by index.
pub fn order_criteria(kb: &KnowledgeBase, x: ObjectId, y: ObjectId, criteria: &mut [CriterionId]) {
    criteria.sort_by_key(|&c| (std::cmp::Reverse(criterion_score(kb, x, y, c)), c));
}

/// FRQ: stay with the current ordered pair while it has candidate questions;
/// otherwise take the pair with the fewest candidate questions in the active
/// tier, preferring an `x` that dominates few objects and a `y` that
/// dominates many. The criterion with the highest score goes first.
pub fn frq_select(
    state: Option<&PairState>,
    kb: &KnowledgeBase,
    cands: &CandidateSets,
) -> Result<(Question, PairState), Exhausted> {
    if cands.is_empty() {
        return Err(Exhausted);
    }
    let criteria_of = |x: ObjectId, y: ObjectId, tier: &[Question]| -> Vec<CriterionId> {
        let start = tier.partition_point(|q| (q.x, q.y) < (x, y));
        tier[start..]
            .iter()
            .take_while(|q| (q.x, q.y) == (x, y))
            .map(|q| q.c)
            .collect()
    };
    let sticky = state.and_then(|s| {
        let mut cs = criteria_of(s.x, s.y, &cands.q1);
        cs.extend(criteria_of(s.x, s.y, &cands.q2));
        (!cs.is_empty()).then_some((s.x, s.y, cs))
    });
    let (x, y, mut criteria) = match sticky {
        Some(found) => found,
        None => {
            let tier = cands.active_tier();
            let mut best: Option<((usize, usize, std::cmp::Reverse<usize>, ObjectId, ObjectId), usize)> = None;
            let mut dominated_count = std::collections::HashMap::new();
            let mut d = |z: ObjectId| *dominated_count.entry(z).or_insert_with(|| kb.dominance_count(z));
            let mut i = 0;
            while i < tier.len() {
                let (x, y) = (tier[i].x, tier[i].y);
                let len = tier[i..].iter().take_while(|q| (q.x, q.y) == (x, y)).count();
                let key = (len, d(x), std::cmp::Reverse(d(y)), x, y);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, i));
                }
                i += len;
            }
            let (key, _) = best.expect("active tier is non-empty");
            let (x, y) = (key.3, key.4);
            (x, y, criteria_of(x, y, tier))
        }
    };
    order_criteria(kb, x, y, &mut criteria);
    let c = criteria.remove(0);
    Ok((Question { x, y, c }, PairState { x, y, remaining: criteria }))
}

/// Number of Property-2 violations for a knowledge base: 1 when exactly one of
/// "no candidate question" and "no undetermined object" holds, else 0.
pub fn property2_violation(kb: &KnowledgeBase) -> bool {
    let part = compute_partition(kb);
    candidate_sets(kb, &part).is_empty() != part.unknown.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Outcome;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(x: usize, y: usize, c: usize) -> Question {
        Question::new(x, y, c)
    }

    #[test]
    fn empty_kb_two_objects_both_orientations_in_q1() {
        let kb = KnowledgeBase::new(2, 1);
        let part = compute_partition(&kb);
        let sets = candidate_sets(&kb, &part);
        assert_eq!(sets.q1, vec![q(0, 1, 0), q(1, 0, 0)]);
        assert!(sets.q2.is_empty());
    }

    #[test]
    fn known_better_criterion_rules_out_orientation() {
        // a = 0, b = 1, criteria story, music, acting
        let mut kb = KnowledgeBase::new(2, 3);
        kb.record_outcome(q(0, 1, 1), Outcome::XBetter).unwrap();
        let part = compute_partition(&kb);
        // a is better than the only other object somewhere: confirmed
        assert_eq!(part.confirmed, vec![ObjectId(0)]);
        assert_eq!(part.unknown, vec![ObjectId(1)]);
        let sets = candidate_sets(&kb, &part);
        // (a, b, ·) would hypothesize b dominating a, impossible once a >music b
        assert!(sets.q1.iter().all(|q| q.x == ObjectId(1)));
        assert_eq!(sets.q1, vec![q(1, 0, 0), q(1, 0, 2)]);
    }

    #[test]
    fn random_q_prefers_first_tier() {
        let sets = CandidateSets {
            q1: vec![q(0, 1, 0)],
            q2: vec![q(1, 0, 0)],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(select_random_q(&sets, &mut rng), Ok(q(0, 1, 0)));
        let sets = CandidateSets {
            q1: vec![],
            q2: vec![q(1, 0, 0)],
        };
        assert_eq!(select_random_q(&sets, &mut rng), Ok(q(1, 0, 0)));
        assert_eq!(select_random_q(&CandidateSets::default(), &mut rng), Err(Exhausted));
    }

    #[test]
    fn random_q_is_seed_deterministic() {
        let sets = CandidateSets {
            q1: (0..5).map(|c| q(0, 1, c)).collect(),
            q2: vec![],
        };
        let a = select_random_q(&sets, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = select_random_q(&sets, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_p_abandons_pair_once_both_ways_ruled_out() {
        // c = 2, f = 5 over six movies
        let mut kb = KnowledgeBase::new(6, 3);
        kb.record_outcome(q(2, 5, 0), Outcome::XBetter).unwrap();
        let state = PairState {
            x: ObjectId(2),
            y: ObjectId(5),
            remaining: vec![CriterionId(1), CriterionId(2)],
        };
        let part = compute_partition(&kb);
        let sets = candidate_sets(&kb, &part);
        let (next, st) = select_random_p(Some(&state), &sets, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!((st.x, st.y), (ObjectId(2), ObjectId(5)));
        assert_eq!(next.x, ObjectId(5), "only f may still be dominated by c");

        kb.record_outcome(q(5, 2, 1), Outcome::XBetter).unwrap();
        let part = compute_partition(&kb);
        let sets = candidate_sets(&kb, &part);
        let (next, st) = select_random_p(Some(&state), &sets, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_ne!((st.x, st.y), (ObjectId(2), ObjectId(5)));
        assert!(sets.contains(next));
    }

    #[test]
    fn random_p_single_pair() {
        let sets = CandidateSets {
            q1: vec![q(1, 0, 0)],
            q2: vec![],
        };
        let (next, st) = select_random_p(None, &sets, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(next, q(1, 0, 0));
        assert_eq!((st.x, st.y), (ObjectId(0), ObjectId(1)));
    }

    #[test]
    fn frq_full_tie_picks_first_pair_and_criterion() {
        let kb = KnowledgeBase::new(4, 3);
        let part = compute_partition(&kb);
        let sets = candidate_sets(&kb, &part);
        let (next, st) = frq_select(None, &kb, &sets).unwrap();
        assert_eq!(next, q(0, 1, 0));
        assert_eq!(st.remaining, vec![CriterionId(1), CriterionId(2)]);
    }

    #[test]
    fn frq_prefers_pair_with_fewer_remaining() {
        let mut kb = KnowledgeBase::new(4, 3);
        kb.record_outcome(q(2, 3, 0), Outcome::Indifferent).unwrap();
        let part = compute_partition(&kb);
        let sets = candidate_sets(&kb, &part);
        let (next, _) = frq_select(None, &kb, &sets).unwrap();
        assert_eq!((next.x, next.y), (ObjectId(2), ObjectId(3)));
    }

    #[test]
    fn frq_orders_movie_pair_by_scores() {
        // movies a..f = 0..5; criteria story, music, acting = 0, 1, 2
        let mut kb = KnowledgeBase::new(6, 3);
        kb.record_outcome(q(1, 0, 0), Outcome::XBetter).unwrap();
        kb.record_outcome(q(0, 1, 1), Outcome::XBetter).unwrap();
        kb.record_outcome(q(2, 0, 0), Outcome::XBetter).unwrap();
        kb.record_outcome(q(2, 0, 2), Outcome::Indifferent).unwrap();
        kb.record_outcome(q(2, 0, 1), Outcome::XBetter).unwrap();
        assert_eq!(kb.outcome_of(2.into(), 1.into(), 1.into()), Some(Outcome::XBetter));
        let part = compute_partition(&kb);
        let sets = candidate_sets(&kb, &part);
        let (next, st) = frq_select(None, &kb, &sets).unwrap();
        assert_eq!((next.x, next.y), (ObjectId(1), ObjectId(2)));
        assert_eq!(next.c, CriterionId(2));
        assert_eq!(st.remaining, vec![CriterionId(0)]);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!("+CQ-MO".parse::<Strategy>().unwrap(), Strategy::CQ_NO_MO);
        assert!("fastest".parse::<Strategy>().is_err());
        assert_eq!(
            Strategy::new(StrategyKind::Frq, false, true),
            Err(StrategyError::NeedsCandidates(StrategyKind::Frq))
        );
    }
}
