//! Knowledge base of pairwise-comparison outcomes.
//!
//! Each criterion keeps a [`PreferenceClosure`]: the transitively closed strict
//! better-than relation derived from recorded outcomes, plus the set of pairs
//! recorded as indifferent. Indifference is never derived, only recorded.
//! On top of the closures the [`KnowledgeBase`] answers dominance queries and
//! partitions the objects into confirmed Pareto-optimal, undetermined and
//! confirmed dominated sets.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{iter_bits, BitMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u32);

impl ObjectId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ObjectId {
    fn from(i: usize) -> Self {
        ObjectId(i as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CriterionId(pub u16);

impl CriterionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for CriterionId {
    fn from(i: usize) -> Self {
        CriterionId(i as u16)
    }
}

/// Labels for the objects and criteria of one problem instance.
///
/// Identifiers are dense: objects are `0..n`, criteria are `0..|C|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    objects: Vec<String>,
    criteria: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("at least one object is required")]
    NoObjects,
    #[error("at least one criterion is required")]
    NoCriteria,
    #[error("duplicate object label {0:?}")]
    DuplicateObject(String),
    #[error("duplicate criterion label {0:?}")]
    DuplicateCriterion(String),
}

impl Universe {
    pub fn new(objects: Vec<String>, criteria: Vec<String>) -> Result<Self, UniverseError> {
        if objects.is_empty() {
            return Err(UniverseError::NoObjects);
        }
        if criteria.is_empty() {
            return Err(UniverseError::NoCriteria);
        }
        if let Some(d) = first_duplicate(&objects) {
            return Err(UniverseError::DuplicateObject(d));
        }
        if let Some(d) = first_duplicate(&criteria) {
            return Err(UniverseError::DuplicateCriterion(d));
        }
        Ok(Universe { objects, criteria })
    }

    /// Objects labelled `o0..o{n-1}`, criteria `c0..c{m-1}`.
    pub fn numbered(n: usize, criteria: usize) -> Result<Self, UniverseError> {
        Universe::new(
            (0..n).map(|i| format!("o{i}")).collect(),
            (0..criteria).map(|i| format!("c{i}")).collect(),
        )
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn criterion_count(&self) -> usize {
        self.criteria.len()
    }

    pub fn object_label(&self, id: ObjectId) -> &str {
        &self.objects[id.index()]
    }

    pub fn criterion_label(&self, id: CriterionId) -> &str {
        &self.criteria[id.index()]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.objects
    }

    pub fn criterion_labels(&self) -> &[String] {
        &self.criteria
    }

    pub fn find_object(&self, label: &str) -> Option<ObjectId> {
        self.objects.iter().position(|o| o == label).map(ObjectId::from)
    }

    pub fn find_criterion(&self, label: &str) -> Option<CriterionId> {
        self.criteria
            .iter()
            .position(|c| c == label)
            .map(CriterionId::from)
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.objects.len()).map(ObjectId::from)
    }

    pub fn criteria(&self) -> impl Iterator<Item = CriterionId> {
        (0..self.criteria.len()).map(CriterionId::from)
    }

    /// Human-readable rendering of a question, e.g. `a ?story b`.
    pub fn describe(&self, q: Question) -> String {
        format!(
            "{} ?{} {}",
            self.object_label(q.x),
            self.criterion_label(q.c),
            self.object_label(q.y)
        )
    }

    /// Rendering of a finalized outcome, e.g. `b >story a`.
    pub fn describe_outcome(&self, q: Question, o: Outcome) -> String {
        let (x, y, c) = (
            self.object_label(q.x),
            self.object_label(q.y),
            self.criterion_label(q.c),
        );
        match o {
            Outcome::XBetter => format!("{x} >{c} {y}"),
            Outcome::YBetter => format!("{y} >{c} {x}"),
            Outcome::Indifferent => format!("{x} ~{c} {y}"),
        }
    }
}

fn first_duplicate(labels: &[String]) -> Option<String> {
    let mut seen = std::collections::HashSet::new();
    labels.iter().find(|l| !seen.insert(l.as_str())).cloned()
}

/// A pairwise comparison `x ?c y`.
///
/// Orientation matters for candidate-question checks: `x` is the object
/// hypothesized to be dominated by `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Question {
    pub x: ObjectId,
    pub y: ObjectId,
    pub c: CriterionId,
}

impl Question {
    pub fn new(x: impl Into<ObjectId>, y: impl Into<ObjectId>, c: impl Into<CriterionId>) -> Self {
        Question {
            x: x.into(),
            y: y.into(),
            c: c.into(),
        }
    }

    /// Same comparison with `x` and `y` swapped.
    pub fn reversed(self) -> Self {
        Question {
            x: self.y,
            y: self.x,
            c: self.c,
        }
    }

    /// Orientation with the smaller object index first.
    pub fn normalized(self) -> Self {
        if self.x <= self.y {
            self
        } else {
            self.reversed()
        }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ?{} {}", self.x.0, self.c.0, self.y.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    XBetter,
    YBetter,
    Indifferent,
}

impl Outcome {
    /// The same fact seen from the reversed question.
    pub fn flipped(self) -> Self {
        match self {
            Outcome::XBetter => Outcome::YBetter,
            Outcome::YBetter => Outcome::XBetter,
            Outcome::Indifferent => Outcome::Indifferent,
        }
    }

    pub fn is_strict(self) -> bool {
        !matches!(self, Outcome::Indifferent)
    }
}

/// `better ≻ worse` on `criterion`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StrictFact {
    pub better: ObjectId,
    pub worse: ObjectId,
    pub criterion: CriterionId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContradictionKind {
    /// The reverse strict fact is already derivable.
    Reverse,
    /// A strict fact is already derivable for a pair being recorded indifferent.
    StrictKnown,
    /// The pair itself was recorded indifferent.
    RecordedIndifferent,
    /// Closing the new edge would make `better ≻ worse` for a pair recorded indifferent.
    DerivedOverIndifference { better: ObjectId, worse: ObjectId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("question compares object {0:?} with itself")]
    SameObject(ObjectId),
    #[error("object {0:?} is outside the universe")]
    ObjectOutOfRange(ObjectId),
    #[error("criterion {0:?} is outside the universe")]
    CriterionOutOfRange(CriterionId),
    #[error("outcome of {0} is already known")]
    AlreadyKnown(Question),
    #[error("outcome {proposed:?} for {question} contradicts known facts ({kind:?})")]
    DirectContradiction {
        question: Question,
        proposed: Outcome,
        kind: ContradictionKind,
    },
}

/// Strict better-than facts for one criterion, kept transitively closed,
/// plus the recorded indifference pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceClosure {
    succ: BitMatrix,
    pred: BitMatrix,
    indiff: BitMatrix,
    strict_count: usize,
    indiff_count: usize,
}

impl PreferenceClosure {
    pub fn new(n: usize) -> Self {
        PreferenceClosure {
            succ: BitMatrix::new(n),
            pred: BitMatrix::new(n),
            indiff: BitMatrix::new(n),
            strict_count: 0,
            indiff_count: 0,
        }
    }

    #[inline]
    pub fn better(&self, u: usize, v: usize) -> bool {
        self.succ.get(u, v)
    }

    #[inline]
    pub fn indifferent(&self, u: usize, v: usize) -> bool {
        self.indiff.get(u, v)
    }

    /// Outcome of `x ? y`, if known.
    #[inline]
    pub fn outcome(&self, x: usize, y: usize) -> Option<Outcome> {
        if self.succ.get(x, y) {
            Some(Outcome::XBetter)
        } else if self.succ.get(y, x) {
            Some(Outcome::YBetter)
        } else if self.indiff.get(x, y) {
            Some(Outcome::Indifferent)
        } else {
            None
        }
    }

    /// Number of ordered strict pairs in the closure.
    pub fn strict_count(&self) -> usize {
        self.strict_count
    }

    /// Number of unordered pairs recorded indifferent.
    pub fn indifferent_count(&self) -> usize {
        self.indiff_count
    }

    /// Objects strictly better than `z`.
    pub fn better_than_count(&self, z: usize) -> usize {
        self.pred.row_count(z)
    }

    /// Objects strictly worse than `z`.
    pub fn worse_than_count(&self, z: usize) -> usize {
        self.succ.row_count(z)
    }

    /// Objects recorded indifferent to `z`.
    pub fn indifferent_to_count(&self, z: usize) -> usize {
        self.indiff.row_count(z)
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ.iter_row(u)
    }

    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred.iter_row(v)
    }

    /// First recorded-indifferent pair `(p, w)` that adding `u ≻ v` would
    /// turn strict, with `p` reaching `u` and `v` reaching `w`.
    pub fn indifference_conflict(&self, u: usize, v: usize) -> Option<(usize, usize)> {
        if self.indiff_count == 0 {
            return None;
        }
        // sources = pred(u) ∪ {u}, targets = succ(v) ∪ {v}; scan the smaller side
        let mut sources = self.pred.row(u).to_vec();
        sources[u / 64] |= 1 << (u % 64);
        let mut targets = self.succ.row(v).to_vec();
        targets[v / 64] |= 1 << (v % 64);
        let count = |m: &[u64]| m.iter().map(|w| w.count_ones()).sum::<u32>();
        if count(&sources) <= count(&targets) {
            iter_bits(&sources).find_map(|p| self.indiff.first_common(p, &targets).map(|w| (p, w)))
        } else {
            iter_bits(&targets).find_map(|w| self.indiff.first_common(w, &sources).map(|p| (p, w)))
        }
    }

    /// Adds `u ≻ v` and closes it. Returns every ordered pair that became
    /// strict, the direct pair included.
    ///
    /// The caller guarantees `u ≠ v`, the pair is unknown, and no recorded
    /// indifference conflicts (see [`Self::indifference_conflict`]).
    pub(crate) fn insert_strict(&mut self, u: usize, v: usize) -> Vec<(usize, usize)> {
        let mut targets = self.succ.row(v).to_vec();
        targets[v / 64] |= 1 << (v % 64);
        let mut sources = self.pred.row(u).to_vec();
        sources[u / 64] |= 1 << (u % 64);
        let mut added = Vec::new();
        for p in iter_bits(&sources) {
            if self.succ.get(p, v) {
                // already above v, hence above all of succ(v)
                continue;
            }
            let pred = &mut self.pred;
            self.succ.or_row_fresh(p, &targets, |w| {
                pred.set(w, p);
                added.push((p, w));
            });
        }
        self.strict_count += added.len();
        added
    }

    pub(crate) fn insert_indifferent(&mut self, u: usize, v: usize) {
        self.indiff.set(u, v);
        self.indiff.set(v, u);
        self.indiff_count += 1;
    }
}

/// Asked outcomes `R(Q)` and their closure `R⁺(Q)` across all criteria.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    n: usize,
    closures: Vec<PreferenceClosure>,
    asked: Vec<(Question, Outcome)>,
    derived_count: usize,
}

impl KnowledgeBase {
    /// Empty knowledge over `n` objects and `criteria` criteria.
    ///
    /// # Panics
    /// If `criteria` is zero: dominance is undefined without criteria.
    pub fn new(n: usize, criteria: usize) -> Self {
        assert!(criteria > 0, "a knowledge base needs at least one criterion");
        KnowledgeBase {
            n,
            closures: (0..criteria).map(|_| PreferenceClosure::new(n)).collect(),
            asked: Vec::new(),
            derived_count: 0,
        }
    }

    pub fn for_universe(u: &Universe) -> Self {
        KnowledgeBase::new(u.object_count(), u.criterion_count())
    }

    pub fn object_count(&self) -> usize {
        self.n
    }

    pub fn criterion_count(&self) -> usize {
        self.closures.len()
    }

    pub fn closure(&self, c: CriterionId) -> &PreferenceClosure {
        &self.closures[c.index()]
    }

    /// `R(Q)` in recording order.
    pub fn asked(&self) -> &[(Question, Outcome)] {
        &self.asked
    }

    pub fn asked_count(&self) -> usize {
        self.asked.len()
    }

    /// Strict facts that entered `R⁺(Q)` by transitivity alone.
    pub fn derived_count(&self) -> usize {
        self.derived_count
    }

    fn check(&self, x: ObjectId, y: ObjectId, c: CriterionId) -> Result<(), OrderError> {
        if x.index() >= self.n {
            return Err(OrderError::ObjectOutOfRange(x));
        }
        if y.index() >= self.n {
            return Err(OrderError::ObjectOutOfRange(y));
        }
        if c.index() >= self.closures.len() {
            return Err(OrderError::CriterionOutOfRange(c));
        }
        if x == y {
            return Err(OrderError::SameObject(x));
        }
        Ok(())
    }

    /// Outcome of `x ?c y` in `R⁺(Q)`, or `None` while unknown.
    #[inline]
    pub fn outcome_of(&self, x: ObjectId, y: ObjectId, c: CriterionId) -> Option<Outcome> {
        self.closures[c.index()].outcome(x.index(), y.index())
    }

    /// Outcome recorded for question `q`, if any. Alias of [`Self::outcome_of`].
    pub fn known(&self, q: Question) -> Option<Outcome> {
        self.outcome_of(q.x, q.y, q.c)
    }

    /// Checks whether recording `o` for `q` would be accepted.
    pub fn validate(&self, q: Question, o: Outcome) -> Result<(), OrderError> {
        self.check(q.x, q.y, q.c)?;
        let closure = &self.closures[q.c.index()];
        let (x, y) = (q.x.index(), q.y.index());
        if let Some(known) = closure.outcome(x, y) {
            if known == o {
                return Err(OrderError::AlreadyKnown(q));
            }
            let kind = match (known, o) {
                (Outcome::Indifferent, _) => ContradictionKind::RecordedIndifferent,
                (_, Outcome::Indifferent) => ContradictionKind::StrictKnown,
                _ => ContradictionKind::Reverse,
            };
            return Err(OrderError::DirectContradiction {
                question: q,
                proposed: o,
                kind,
            });
        }
        let (u, v) = match o {
            Outcome::XBetter => (x, y),
            Outcome::YBetter => (y, x),
            Outcome::Indifferent => return Ok(()),
        };
        if let Some((p, w)) = closure.indifference_conflict(u, v) {
            return Err(OrderError::DirectContradiction {
                question: q,
                proposed: o,
                kind: ContradictionKind::DerivedOverIndifference {
                    better: ObjectId::from(p),
                    worse: ObjectId::from(w),
                },
            });
        }
        Ok(())
    }

    /// Adds `o` as the outcome of `q` and closes the criterion's relation.
    ///
    /// Returns the strict facts derived by transitivity, excluding the
    /// recorded one. Callers must route crowd answers through
    /// [`crate::aggregation::resolve_contradiction`] first.
    pub fn record_outcome(&mut self, q: Question, o: Outcome) -> Result<Vec<StrictFact>, OrderError> {
        self.validate(q, o)?;
        Ok(self.insert_validated(q, o))
    }

    /// [`Self::record_outcome`] for an outcome already passed through
    /// [`Self::validate`].
    pub(crate) fn insert_validated(&mut self, q: Question, o: Outcome) -> Vec<StrictFact> {
        let (x, y) = (q.x.index(), q.y.index());
        let closure = &mut self.closures[q.c.index()];
        let derived = match o {
            Outcome::Indifferent => {
                closure.insert_indifferent(x, y);
                Vec::new()
            }
            Outcome::XBetter | Outcome::YBetter => {
                let (u, v) = if o == Outcome::XBetter { (x, y) } else { (y, x) };
                closure
                    .insert_strict(u, v)
                    .into_iter()
                    .filter(|&pair| pair != (u, v))
                    .map(|(p, w)| StrictFact {
                        better: ObjectId::from(p),
                        worse: ObjectId::from(w),
                        criterion: q.c,
                    })
                    .collect()
            }
        };
        self.derived_count += derived.len();
        self.asked.push((q, o));
        derived
    }

    /// Whether `y` could still turn out to dominate `x`.
    ///
    /// False once `x ≻c y` is known for some criterion.
    pub fn may_dominate(&self, y: ObjectId, x: ObjectId) -> bool {
        !self
            .closures
            .iter()
            .any(|cl| cl.better(x.index(), y.index()))
    }

    /// Whether `y` dominates `x` under `R⁺(Q)`: every criterion is known and
    /// favours `y` or is indifferent, and at least one favours `y`.
    pub fn dominates(&self, y: ObjectId, x: ObjectId) -> bool {
        let (x, y) = (x.index(), y.index());
        let mut strictly = false;
        for cl in &self.closures {
            if cl.better(y, x) {
                strictly = true;
            } else if !cl.indifferent(x, y) {
                return false;
            }
        }
        strictly
    }

    /// Number of objects `x` dominates under `R⁺(Q)`.
    pub fn dominance_count(&self, x: ObjectId) -> usize {
        (0..self.n)
            .map(ObjectId::from)
            .filter(|&y| y != x && self.dominates(x, y))
            .count()
    }

    /// Whether `x` is known to be undominated by `y`: some criterion prefers
    /// `x`, or every criterion is recorded indifferent.
    pub fn safe_from(&self, x: ObjectId, y: ObjectId) -> bool {
        let (x, y) = (x.index(), y.index());
        self.closures.iter().any(|cl| cl.better(x, y))
            || self.closures.iter().all(|cl| cl.indifferent(x, y))
    }

    /// Outcomes of every criterion for the pair, in criterion order.
    pub fn pair_outcomes(&self, x: ObjectId, y: ObjectId) -> Vec<Option<Outcome>> {
        self.closures
            .iter()
            .map(|cl| cl.outcome(x.index(), y.index()))
            .collect()
    }
}

/// The three-way split of the objects under `R⁺(Q)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Partition {
    /// Objects that must be Pareto-optimal.
    pub confirmed: Vec<ObjectId>,
    /// Objects whose status is not yet determined.
    pub unknown: Vec<ObjectId>,
    /// Objects known to be dominated.
    pub dominated: Vec<ObjectId>,
}

impl Partition {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.confirmed.len(), self.unknown.len(), self.dominated.len())
    }

    pub fn is_unknown(&self, x: ObjectId) -> bool {
        self.unknown.binary_search(&x).is_ok()
    }

    pub fn is_dominated(&self, x: ObjectId) -> bool {
        self.dominated.binary_search(&x).is_ok()
    }

    pub fn is_confirmed(&self, x: ObjectId) -> bool {
        self.confirmed.binary_search(&x).is_ok()
    }
}

/// Full recomputation of the partition from the knowledge base, O(n²·|C|).
pub fn compute_partition(kb: &KnowledgeBase) -> Partition {
    let mut part = Partition::default();
    let objects: Vec<ObjectId> = (0..kb.object_count()).map(ObjectId::from).collect();
    for &x in &objects {
        let others = || objects.iter().copied().filter(move |&y| y != x);
        if others().any(|y| kb.dominates(y, x)) {
            part.dominated.push(x);
        } else if others().all(|y| kb.safe_from(x, y)) {
            part.confirmed.push(x);
        } else {
            part.unknown.push(x);
        }
    }
    part
}

/// A question sequence is terminal once no object is undetermined.
pub fn is_terminal(partition: &Partition) -> bool {
    partition.unknown.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: usize, y: usize, c: usize) -> Question {
        Question::new(x, y, c)
    }

    // movies a..f = 0..5, criteria story, music, acting = 0, 1, 2
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;
    const F: usize = 5;

    fn story_kb() -> KnowledgeBase {
        use Outcome::*;
        let rows = [
            (A, B, YBetter),
            (A, C, YBetter),
            (A, D, YBetter),
            (A, E, XBetter),
            (A, F, XBetter),
            (B, C, Indifferent),
            (B, D, Indifferent),
            (B, E, XBetter),
            (B, F, XBetter),
            (C, D, XBetter),
            (C, E, XBetter),
            (C, F, XBetter),
            (D, E, XBetter),
            (D, F, XBetter),
            (E, F, YBetter),
        ];
        let mut kb = KnowledgeBase::new(6, 3);
        for (x, y, o) in rows {
            if kb.outcome_of(x.into(), y.into(), 0.into()).is_none() {
                kb.record_outcome(q(x, y, 0), o).unwrap();
            } else {
                assert_eq!(kb.outcome_of(x.into(), y.into(), 0.into()), Some(o));
            }
        }
        kb
    }

    #[test]
    fn single_edge_has_no_derivations() {
        let mut kb = KnowledgeBase::new(6, 3);
        let derived = kb.record_outcome(q(B, E, 0), Outcome::XBetter).unwrap();
        assert!(derived.is_empty());
        assert_eq!(kb.outcome_of(B.into(), E.into(), 0.into()), Some(Outcome::XBetter));
        assert_eq!(kb.outcome_of(E.into(), B.into(), 0.into()), Some(Outcome::YBetter));
        assert_eq!(kb.derived_count(), 0);
        assert_eq!(kb.asked_count(), 1);
    }

    #[test]
    fn transitivity_derives_new_fact() {
        let mut kb = KnowledgeBase::new(4, 1);
        kb.record_outcome(q(0, 2, 0), Outcome::XBetter).unwrap();
        let derived = kb.record_outcome(q(2, 3, 0), Outcome::XBetter).unwrap();
        assert_eq!(
            derived,
            vec![StrictFact {
                better: 0.into(),
                worse: 3.into(),
                criterion: 0.into()
            }]
        );
        assert_eq!(kb.derived_count(), 1);
    }

    #[test]
    fn reverse_edge_is_a_direct_contradiction() {
        let mut kb = KnowledgeBase::new(6, 3);
        kb.record_outcome(q(B, E, 0), Outcome::XBetter).unwrap();
        let err = kb.record_outcome(q(E, B, 0), Outcome::XBetter).unwrap_err();
        assert!(matches!(
            err,
            OrderError::DirectContradiction {
                kind: ContradictionKind::Reverse,
                ..
            }
        ));
        let err = kb.record_outcome(q(B, E, 0), Outcome::XBetter).unwrap_err();
        assert_eq!(err, OrderError::AlreadyKnown(q(B, E, 0)));
        let err = kb.record_outcome(q(B, E, 0), Outcome::Indifferent).unwrap_err();
        assert!(matches!(err, OrderError::DirectContradiction { .. }));
    }

    #[test]
    fn strict_fact_over_recorded_indifference_is_rejected() {
        let mut kb = KnowledgeBase::new(3, 1);
        kb.record_outcome(q(0, 1, 0), Outcome::Indifferent).unwrap();
        kb.record_outcome(q(1, 2, 0), Outcome::XBetter).unwrap();
        // 2 ≻ 0 would give 1 ≻ 0 against 0 ~ 1
        let err = kb.record_outcome(q(2, 0, 0), Outcome::XBetter).unwrap_err();
        assert!(matches!(
            err,
            OrderError::DirectContradiction {
                kind: ContradictionKind::DerivedOverIndifference { .. },
                ..
            }
        ));
        assert_eq!(kb.asked_count(), 2);
    }

    #[test]
    fn invalid_questions() {
        let mut kb = KnowledgeBase::new(3, 1);
        assert_eq!(
            kb.record_outcome(q(1, 1, 0), Outcome::XBetter),
            Err(OrderError::SameObject(1.into()))
        );
        assert_eq!(
            kb.record_outcome(q(1, 5, 0), Outcome::XBetter),
            Err(OrderError::ObjectOutOfRange(5.into()))
        );
        assert_eq!(
            kb.record_outcome(q(1, 2, 3), Outcome::XBetter),
            Err(OrderError::CriterionOutOfRange(3.into()))
        );
    }

    #[test]
    fn story_table_lookups() {
        let kb = story_kb();
        assert_eq!(kb.outcome_of(A.into(), F.into(), 0.into()), Some(Outcome::XBetter));
        assert_eq!(kb.outcome_of(B.into(), C.into(), 0.into()), Some(Outcome::Indifferent));
        assert_eq!(kb.outcome_of(A.into(), B.into(), 1.into()), None);
        // c ≻ d ≻ a: c ≻ a arrives by transitivity before its row
        assert!(kb.derived_count() > 0);
        assert_eq!(kb.closure(0.into()).indifferent_count(), 2);
    }

    #[test]
    fn empty_kb_knows_nothing() {
        let kb = KnowledgeBase::new(2, 1);
        assert_eq!(kb.outcome_of(0.into(), 1.into(), 0.into()), None);
        assert!(kb.may_dominate(0.into(), 1.into()));
        assert!(kb.may_dominate(1.into(), 0.into()));
        let part = compute_partition(&kb);
        assert_eq!(part.unknown, vec![ObjectId(0), ObjectId(1)]);
        assert!(!is_terminal(&part));
    }

    #[test]
    fn may_dominate_rules_out_after_one_better_criterion() {
        let mut kb = KnowledgeBase::new(6, 3);
        kb.record_outcome(q(A, B, 1), Outcome::XBetter).unwrap();
        assert!(!kb.may_dominate(B.into(), A.into()));
        assert!(kb.may_dominate(A.into(), B.into()));

        let mut kb = KnowledgeBase::new(2, 2);
        kb.record_outcome(q(1, 0, 0), Outcome::XBetter).unwrap();
        assert!(kb.may_dominate(1.into(), 0.into()));
    }

    #[test]
    fn dominance_examples() {
        let mut kb = KnowledgeBase::new(6, 3);
        kb.record_outcome(q(C, D, 0), Outcome::XBetter).unwrap();
        assert!(!kb.dominates(C.into(), D.into()), "incomplete evidence");
        kb.record_outcome(q(C, D, 1), Outcome::XBetter).unwrap();
        kb.record_outcome(q(C, D, 2), Outcome::Indifferent).unwrap();
        assert!(kb.dominates(C.into(), D.into()));
        assert!(!kb.dominates(D.into(), C.into()));

        kb.record_outcome(q(B, A, 0), Outcome::XBetter).unwrap();
        kb.record_outcome(q(A, B, 1), Outcome::XBetter).unwrap();
        kb.record_outcome(q(B, A, 2), Outcome::XBetter).unwrap();
        assert!(!kb.dominates(A.into(), B.into()));
        assert!(!kb.dominates(B.into(), A.into()));
    }

    fn cyclic_fixture() -> KnowledgeBase {
        use Outcome::*;
        let (x, y, z) = (0, 1, 2);
        let mut kb = KnowledgeBase::new(3, 3);
        for (qq, o) in [
            (q(x, y, 0), XBetter),
            (q(x, y, 1), Indifferent),
            (q(x, y, 2), Indifferent),
            (q(y, z, 0), Indifferent),
            (q(y, z, 1), XBetter),
            (q(y, z, 2), Indifferent),
            (q(z, x, 0), Indifferent),
            (q(z, x, 1), Indifferent),
            (q(z, x, 2), XBetter),
        ] {
            kb.record_outcome(qq, o).unwrap();
        }
        kb
    }

    #[test]
    fn dominance_cycle_is_representable() {
        let kb = cyclic_fixture();
        assert!(kb.dominates(0.into(), 1.into()));
        assert!(kb.dominates(1.into(), 2.into()));
        assert!(kb.dominates(2.into(), 0.into()));
        let part = compute_partition(&kb);
        assert_eq!(part.dominated.len(), 3);
        assert!(part.confirmed.is_empty() && part.unknown.is_empty());
        assert!(is_terminal(&part));
    }

    #[test]
    fn terminal_examples() {
        let o = |v: &[u32]| v.iter().map(|&i| ObjectId(i)).collect::<Vec<_>>();
        assert!(is_terminal(&Partition {
            confirmed: o(&[1]),
            unknown: vec![],
            dominated: o(&[0, 2, 3, 4, 5]),
        }));
        assert!(!is_terminal(&Partition {
            confirmed: vec![],
            unknown: o(&[0, 1, 2]),
            dominated: vec![],
        }));
    }

    #[test]
    fn single_object_is_confirmed() {
        let kb = KnowledgeBase::new(1, 2);
        let part = compute_partition(&kb);
        assert_eq!(part.confirmed, vec![ObjectId(0)]);
        assert!(is_terminal(&part));
    }

    #[test]
    #[should_panic]
    fn zero_criteria_rejected() {
        KnowledgeBase::new(3, 0);
    }

    #[test]
    fn universe_validation() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(
            Universe::new(s(&["a"]), vec![]),
            Err(UniverseError::NoCriteria)
        );
        assert_eq!(
            Universe::new(s(&["a", "a"]), s(&["c"])),
            Err(UniverseError::DuplicateObject("a".into()))
        );
        let u = Universe::new(s(&["a", "b"]), s(&["story"])).unwrap();
        assert_eq!(u.find_object("b"), Some(ObjectId(1)));
        assert_eq!(u.describe_outcome(Question::new(0, 1, 0), Outcome::YBetter), "b >story a");
    }
}
