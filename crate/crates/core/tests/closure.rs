use pareto_elicit::order::{ContradictionKind, OrderError};
use pareto_elicit::{CriterionId, KnowledgeBase, ObjectId, Outcome, Question};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All-pairs reachability by repeated relaxation over an adjacency matrix.
fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(u, v) in edges {
        r[u][v] = true;
    }
    loop {
        let mut grew = false;
        for a in 0..n {
            for b in 0..n {
                if !r[a][b] && (0..n).any(|m| r[a][m] && r[m][b]) {
                    r[a][b] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            return r;
        }
    }
}

/// Edges consistent with a hidden random ranking, in shuffled order.
fn random_sequence(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rank[a] < rank[b] && rng.gen_bool(0.08) {
                edges.push((a, b));
            }
        }
    }
    edges.shuffle(rng);
    edges
}

#[test]
fn closure_matches_reachability_on_random_sequences() {
    let n = 32;
    let c = CriterionId(0);
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_sequence(n, &mut rng);
        let mut kb = KnowledgeBase::new(n, 1);
        let mut inserted = Vec::new();
        for &(u, v) in &edges {
            if kb.outcome_of(ObjectId::from(u), ObjectId::from(v), c).is_some() {
                continue;
            }
            kb.record_outcome(Question::new(u, v, c), Outcome::XBetter).unwrap();
            inserted.push((u, v));
            // check after every insertion, not only at the end
            let want = reachability(n, &inserted);
            let cl = kb.closure(c);
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(cl.better(a, b), want[a][b], "seed {seed}, pair ({a}, {b})");
                }
            }
        }
        let strict: usize = reachability(n, &inserted).iter().flatten().filter(|&&x| x).count();
        assert_eq!(kb.closure(c).strict_count(), strict);
        assert_eq!(kb.derived_count() + inserted.len(), strict);
    }
}

#[test]
fn indifference_is_never_derived() {
    let mut kb = KnowledgeBase::new(3, 1);
    kb.record_outcome(Question::new(0, 1, 0), Outcome::Indifferent).unwrap();
    kb.record_outcome(Question::new(1, 2, 0), Outcome::Indifferent).unwrap();
    assert_eq!(kb.outcome_of(ObjectId(0), ObjectId(2), CriterionId(0)), None);
    assert_eq!(kb.closure(CriterionId(0)).indifferent_count(), 2);
}

#[test]
fn derived_strict_fact_over_recorded_indifference_is_rejected() {
    let mut kb = KnowledgeBase::new(3, 1);
    kb.record_outcome(Question::new(0, 2, 0), Outcome::Indifferent).unwrap();
    kb.record_outcome(Question::new(0, 1, 0), Outcome::XBetter).unwrap();
    let err = kb.record_outcome(Question::new(1, 2, 0), Outcome::XBetter).unwrap_err();
    assert!(matches!(
        err,
        OrderError::DirectContradiction {
            kind: ContradictionKind::DerivedOverIndifference { .. },
            ..
        }
    ));
    // the rejected answer left nothing behind
    assert_eq!(kb.outcome_of(ObjectId(1), ObjectId(2), CriterionId(0)), None);
    assert_eq!(kb.asked_count(), 2);
}

proptest! {
    #[test]
    fn closure_is_irreflexive_antisymmetric_transitive(
        n in 2usize..12,
        ops in proptest::collection::vec((0usize..12, 0usize..12, 0u8..3), 0..60),
    ) {
        let mut kb = KnowledgeBase::new(n, 1);
        let c = CriterionId(0);
        for (a, b, o) in ops {
            let (a, b) = (a % n, b % n);
            if a == b {
                continue;
            }
            let o = [Outcome::XBetter, Outcome::YBetter, Outcome::Indifferent][o as usize];
            // rejected answers are fine; accepted ones must keep the invariants
            let _ = kb.record_outcome(Question::new(a, b, c), o);
        }
        let cl = kb.closure(c);
        for a in 0..n {
            prop_assert!(!cl.better(a, a));
            for b in 0..n {
                prop_assert!(!(cl.better(a, b) && cl.better(b, a)));
                prop_assert!(!(cl.better(a, b) && cl.indifferent(a, b)));
                for m in 0..n {
                    if cl.better(a, m) && cl.better(m, b) {
                        prop_assert!(cl.better(a, b));
                    }
                }
            }
        }
    }
}
