#![allow(dead_code)]

use pareto_elicit::sim::GroundTruth;
use pareto_elicit::{CriterionId, ObjectId, Outcome, Universe};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pareto set straight from the definition, comparing every ordered pair on
/// every criterion.
pub fn naive_pareto(truth: &GroundTruth) -> Vec<ObjectId> {
    let n = truth.object_count();
    let m = truth.criterion_count();
    let mut out = Vec::new();
    'x: for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            let outs: Vec<Outcome> = (0..m)
                .map(|c| truth.outcome(ObjectId::from(y), ObjectId::from(x), CriterionId::from(c)))
                .collect();
            let never_worse = outs.iter().all(|&o| o != Outcome::YBetter);
            let once_better = outs.iter().any(|&o| o == Outcome::XBetter);
            if never_worse && once_better {
                continue 'x;
            }
        }
        out.push(ObjectId::from(x));
    }
    out
}

/// Small consistent instance: half from perturbed normal scores, half from
/// random sparse edges under a hidden ranking per criterion.
pub fn random_instance(seed: u64) -> GroundTruth {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=3);
    if seed % 2 == 0 {
        return GroundTruth::synthetic(n, m, &mut rng);
    }
    let density = rng.gen_range(0.1..0.9);
    let edges: Vec<Vec<(ObjectId, ObjectId)>> = (0..m)
        .map(|_| {
            let mut rank: Vec<usize> = (0..n).collect();
            rank.shuffle(&mut rng);
            let mut list = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if rank[a] < rank[b] && rng.gen_bool(density) {
                        list.push((ObjectId::from(a), ObjectId::from(b)));
                    }
                }
            }
            list
        })
        .collect();
    GroundTruth::from_edges(Universe::numbered(n, m).unwrap(), &edges).unwrap()
}
