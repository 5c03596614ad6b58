//! Complete ground-truth preference relations.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitMatrix;
use crate::order::{CriterionId, ObjectId, Outcome, Universe, UniverseError};

/// One strict partial order per criterion over all objects; every pair not
/// ordered either way is indifferent.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    universe: Universe,
    better: Vec<BitMatrix>,
    /// Latent scores `[object][criterion]`, when generated from scores.
    scores: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruthError {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error("malformed ground truth: {0}")]
    Parse(String),
    #[error("unknown {what} {label:?}")]
    UnknownLabel { what: &'static str, label: String },
    #[error("criterion {0:?} orders objects in a cycle")]
    Cyclic(String),
}

/// Ground-truth file: strict edges per criterion label as `[better, worse]`
/// pairs. Pairs not implied by the edges are indifferent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthFile {
    pub objects: Vec<String>,
    pub criteria: Vec<String>,
    pub strict: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Transitive closure by Warshall's algorithm on bit rows.
fn close(m: &mut BitMatrix, n: usize) {
    for k in 0..n {
        let row_k = m.row(k).to_vec();
        for i in 0..n {
            if m.get(i, k) {
                m.or_row(i, &row_k);
            }
        }
    }
}

impl GroundTruth {
    /// Closes the given strict edges per criterion. Fails if an edge set is
    /// cyclic.
    pub fn from_edges(universe: Universe, edges: &[Vec<(ObjectId, ObjectId)>]) -> Result<Self, TruthError> {
        let n = universe.object_count();
        assert_eq!(edges.len(), universe.criterion_count(), "one edge list per criterion");
        let mut better = Vec::with_capacity(edges.len());
        for (c, list) in edges.iter().enumerate() {
            let mut m = BitMatrix::new(n);
            for &(a, b) in list {
                m.set(a.index(), b.index());
            }
            close(&mut m, n);
            if (0..n).any(|i| m.get(i, i)) {
                return Err(TruthError::Cyclic(universe.criterion_labels()[c].clone()));
            }
            better.push(m);
        }
        Ok(GroundTruth {
            universe,
            better,
            scores: None,
        })
    }

    /// For every criterion and pair with different scores, orders the pair
    /// by score with probability `1 - exp(-gap)`; otherwise the pair is
    /// indifferent. Sampled indifferences that contradict the closure of the
    /// sampled strict edges become strict.
    pub fn perturbed<R: Rng + ?Sized>(universe: Universe, scores: Vec<Vec<f64>>, rng: &mut R) -> Self {
        let n = universe.object_count();
        let m = universe.criterion_count();
        assert_eq!(scores.len(), n, "one score row per object");
        let mut better = Vec::with_capacity(m);
        for c in 0..m {
            let mut rel = BitMatrix::new(n);
            for i in 0..n {
                for j in i + 1..n {
                    let v: f64 = rng.gen();
                    let (si, sj) = (scores[i][c], scores[j][c]);
                    if si == sj {
                        continue;
                    }
                    let (hi, lo, gap) = if si > sj { (i, j, si - sj) } else { (j, i, sj - si) };
                    if v < 1.0 - (-gap).exp() {
                        rel.set(hi, lo);
                    }
                }
            }
            close(&mut rel, n);
            better.push(rel);
        }
        GroundTruth {
            universe,
            better,
            scores: Some(scores),
        }
    }

    /// Standard-normal scores `[object][criterion]`.
    pub fn normal_scores<R: Rng + ?Sized>(n: usize, criteria: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..criteria).map(|_| rng.sample(StandardNormal)).collect())
            .collect()
    }

    /// Numbered objects with standard-normal scores, perturbed into relations.
    pub fn synthetic<R: Rng + ?Sized>(n: usize, criteria: usize, rng: &mut R) -> Self {
        let universe = Universe::numbered(n, criteria).expect("n and criteria are positive");
        let scores = GroundTruth::normal_scores(n, criteria, rng);
        GroundTruth::perturbed(universe, scores, rng)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn object_count(&self) -> usize {
        self.universe.object_count()
    }

    pub fn criterion_count(&self) -> usize {
        self.universe.criterion_count()
    }

    pub fn scores(&self) -> Option<&[Vec<f64>]> {
        self.scores.as_deref()
    }

    #[inline]
    pub fn better(&self, x: ObjectId, y: ObjectId, c: CriterionId) -> bool {
        self.better[c.index()].get(x.index(), y.index())
    }

    /// Outcome of `x ?c y`.
    pub fn outcome(&self, x: ObjectId, y: ObjectId, c: CriterionId) -> Outcome {
        if self.better(x, y, c) {
            Outcome::XBetter
        } else if self.better(y, x, c) {
            Outcome::YBetter
        } else {
            Outcome::Indifferent
        }
    }

    /// The same objects judged on the first `k` criteria only.
    pub fn restrict_criteria(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.criterion_count());
        let labels = self.universe.criterion_labels()[..k].to_vec();
        GroundTruth {
            universe: Universe::new(self.universe.object_labels().to_vec(), labels).expect("subset of valid labels"),
            better: self.better[..k].to_vec(),
            scores: self
                .scores
                .as_ref()
                .map(|s| s.iter().map(|row| row[..k].to_vec()).collect()),
        }
    }

    /// Checks irreflexivity, asymmetry and transitivity of every criterion.
    /// O(n³·|C|); meant for tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.object_count();
        for c in self.universe.criteria() {
            for a in (0..n).map(ObjectId::from) {
                if self.better(a, a, c) {
                    return Err(format!("{a:?} better than itself on {c:?}"));
                }
                for b in (0..n).map(ObjectId::from) {
                    if self.better(a, b, c) && self.better(b, a, c) {
                        return Err(format!("{a:?} and {b:?} both better on {c:?}"));
                    }
                    if !self.better(a, b, c) {
                        continue;
                    }
                    for d in (0..n).map(ObjectId::from) {
                        if self.better(b, d, c) && !self.better(a, d, c) {
                            return Err(format!("{a:?} > {b:?} > {d:?} not closed on {c:?}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_file(file: &TruthFile) -> Result<Self, TruthError> {
        let universe = Universe::new(file.objects.clone(), file.criteria.clone())?;
        let mut edges = vec![Vec::new(); universe.criterion_count()];
        for (label, list) in &file.strict {
            let c = universe.find_criterion(label).ok_or_else(|| TruthError::UnknownLabel {
                what: "criterion",
                label: label.clone(),
            })?;
            for [a, b] in list {
                let find = |l: &String| {
                    universe.find_object(l).ok_or_else(|| TruthError::UnknownLabel {
                        what: "object",
                        label: l.clone(),
                    })
                };
                edges[c.index()].push((find(a)?, find(b)?));
            }
        }
        GroundTruth::from_edges(universe, &edges)
    }

    pub fn parse(json: &str) -> Result<Self, TruthError> {
        let file: TruthFile = serde_json::from_str(json).map_err(|e| TruthError::Parse(e.to_string()))?;
        GroundTruth::from_file(&file)
    }

    /// Every strict pair per criterion, in object order.
    pub fn to_file(&self) -> TruthFile {
        let u = &self.universe;
        let n = self.object_count();
        let strict = u
            .criteria()
            .map(|c| {
                let mut list = Vec::new();
                for a in (0..n).map(ObjectId::from) {
                    for b in (0..n).map(ObjectId::from) {
                        if self.better(a, b, c) {
                            list.push([u.object_label(a).to_string(), u.object_label(b).to_string()]);
                        }
                    }
                }
                (u.criterion_label(c).to_string(), list)
            })
            .collect();
        TruthFile {
            objects: u.object_labels().to_vec(),
            criteria: u.criterion_labels().to_vec(),
            strict,
            note: None,
        }
    }
}
