//! Reference answers computed straight from a ground truth, plus the lower
//! bound on questions and the contradiction-cycle counter.

use thiserror::Error;

use super::truth::GroundTruth;
use crate::order::{CriterionId, ObjectId, Outcome};

/// Objects no other object dominates under the ground truth, by a direct
/// pairwise scan.
pub fn pareto_oracle(truth: &GroundTruth) -> Vec<ObjectId> {
    let n = truth.object_count();
    let criteria: Vec<CriterionId> = truth.universe().criteria().collect();
    let dominates = |y: ObjectId, x: ObjectId| {
        let mut strictly = false;
        for &c in &criteria {
            match truth.outcome(y, x, c) {
                Outcome::XBetter => strictly = true,
                Outcome::YBetter => return false,
                Outcome::Indifferent => {}
            }
        }
        strictly
    };
    (0..n)
        .map(ObjectId::from)
        .filter(|&x| !(0..n).map(ObjectId::from).any(|y| y != x && dominates(y, x)))
        .collect()
}

/// Questions any strategy needs when `k` of `n` objects are Pareto-optimal
/// under `c` criteria: `(n - k)·c + 2(k - 1)`, or `n·c` when `k = 0`.
///
/// With a single criterion two Pareto-optimal objects can only be
/// indifferent, which one question settles, so the second term becomes
/// `k - 1` there.
pub fn lower_bound(n: u64, c: u64, k: u64) -> u64 {
    assert!(k <= n && c >= 1, "need 0 <= k <= n and c >= 1");
    if k == 0 {
        n * c
    } else {
        (n - k) * c + c.min(2) * (k - 1)
    }
}

/// Largest object count [`count_contradiction_cycles`] accepts.
pub const CYCLE_COUNT_MAX_OBJECTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("cycle enumeration is exponential; {0} objects exceed the limit of {CYCLE_COUNT_MAX_OBJECTS}")]
    TooLarge(usize),
}

/// Complete outcomes for one criterion: directed edges for strict
/// preferences, undirected edges for indifference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeGraph {
    n: usize,
    better: Vec<bool>,
}

impl OutcomeGraph {
    /// `outcome(x, y)` for every `x < y`; the graph may contain cycles.
    pub fn from_fn(n: usize, mut outcome: impl FnMut(usize, usize) -> Outcome) -> Self {
        let mut better = vec![false; n * n];
        for x in 0..n {
            for y in x + 1..n {
                match outcome(x, y) {
                    Outcome::XBetter => better[x * n + y] = true,
                    Outcome::YBetter => better[y * n + x] = true,
                    Outcome::Indifferent => {}
                }
            }
        }
        OutcomeGraph { n, better }
    }

    fn edge(&self, a: usize, b: usize) -> bool {
        self.better[a * self.n + b]
    }

    fn indifferent(&self, a: usize, b: usize) -> bool {
        a != b && !self.edge(a, b) && !self.edge(b, a)
    }

    /// Simple directed paths from `from` to `to` through vertices allowed by
    /// `allowed`, of at least two edges.
    fn count_paths(&self, from: usize, to: usize, allowed: &dyn Fn(usize) -> bool) -> u64 {
        let mut on_path = vec![false; self.n];
        on_path[from] = true;
        self.paths_rec(from, to, 0, &mut on_path, allowed)
    }

    fn paths_rec(&self, at: usize, to: usize, depth: usize, on_path: &mut [bool], allowed: &dyn Fn(usize) -> bool) -> u64 {
        let mut total = 0;
        for next in 0..self.n {
            if !self.edge(at, next) {
                continue;
            }
            if next == to {
                if depth >= 1 {
                    total += 1;
                }
                continue;
            }
            if on_path[next] || !allowed(next) {
                continue;
            }
            on_path[next] = true;
            total += self.paths_rec(next, to, depth + 1, on_path, allowed);
            on_path[next] = false;
        }
        total
    }
}

/// Elementary cycles with no undirected edge or exactly one, whose directed
/// edges all run the same way around. Such a cycle means the outcomes cannot
/// come from a strict partial order.
pub fn count_contradiction_cycles(g: &OutcomeGraph) -> Result<u64, CycleError> {
    let n = g.n;
    if n > CYCLE_COUNT_MAX_OBJECTS {
        return Err(CycleError::TooLarge(n));
    }
    let mut total = 0;
    // directed cycles, each counted from its smallest vertex
    for s in 0..n {
        total += g.count_paths(s, s, &|v| v > s);
    }
    // one undirected edge {a, b} closed by a directed path either way
    for a in 0..n {
        for b in a + 1..n {
            if g.indifferent(a, b) {
                total += g.count_paths(a, b, &|_| true);
                total += g.count_paths(b, a, &|_| true);
            }
        }
    }
    Ok(total)
}
