//! One live elicitation: the engine, the open question and its votes.

use std::collections::BTreeMap;

use pareto_elicit::aggregation::{aggregate, AggregationConfig, AggregationError, Response, Vote, VoteTally};
use pareto_elicit::dot::dominance_dot;
use pareto_elicit::fixtures::{Dataset, DatasetError};
use pareto_elicit::selection::{candidate_sets, Engine, EngineSnapshot, SelectionMode};
use pareto_elicit::{ObjectId, Outcome, Question, Strategy, Universe};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("invalid session spec: {0}")]
    InvalidSpec(String),
    #[error("no session {0:?}")]
    UnknownSession(String),
    #[error("question {got} is no longer open; the open question is {open}")]
    StaleQuestion { got: u64, open: u64 },
    #[error("session is finished; no question is open")]
    SessionTerminal,
    #[error("recording the outcome failed: {0}")]
    Internal(String),
}

/// Body of `POST /sessions`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSpec {
    /// Bundled dataset whose objects and criteria to use instead of listing
    /// them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default)]
    pub objects: Vec<String>,
    #[serde(default)]
    pub criteria: Vec<String>,
    /// Defaults to FRQ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    /// Defaults to 1 with `theta` 0.51: one answer decides a question.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_min: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Responses per question, skips included, after which the question is
    /// decided with whatever arrived. Defaults to `3 * k_min`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Image URL per object label, for clients that show pictures.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub media: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenQuestion {
    pub id: u64,
    pub question: Question,
    pub tally: VoteTally,
}

/// The open question as shown to a respondent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionView {
    pub question_id: u64,
    pub x: String,
    pub y: String,
    pub criterion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_media: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_media: Option<String>,
    pub choices: Vec<Vote>,
    pub tally: VoteTally,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionView {
    pub confirmed: Vec<String>,
    pub undetermined: Vec<String>,
    pub dominated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub asked: usize,
    /// Questions brute force would ask.
    pub total: u64,
}

/// Body of `GET /sessions/{id}/state`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub id: String,
    pub status: Status,
    pub strategy: Strategy,
    pub objects: Vec<String>,
    pub criteria: Vec<String>,
    pub k_min: u32,
    pub theta: f64,
    pub response_cap: u32,
    pub partition: PartitionView,
    pub asked: usize,
    pub derived: usize,
    pub remaining_candidates: usize,
    pub progress: Progress,
    pub question: Option<QuestionView>,
}

/// Body of `GET /sessions/{id}/result`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultView {
    pub id: String,
    /// False while some object is undetermined; the sets are then provisional.
    pub complete: bool,
    pub pareto: Vec<String>,
    pub dominated: Vec<String>,
    pub undetermined: Vec<String>,
    pub asked: usize,
    /// Every recorded outcome, in the order finalized.
    pub outcomes: Vec<OutcomeView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeView {
    pub x: String,
    pub y: String,
    pub criterion: String,
    pub outcome: Outcome,
}

/// Body of `POST /sessions/{id}/votes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRequest {
    pub question_id: u64,
    pub vote: Vote,
    #[serde(default)]
    pub respondent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finalized {
    pub question_id: u64,
    pub x: String,
    pub y: String,
    pub criterion: String,
    /// Outcome as recorded, oriented as asked.
    pub outcome: Outcome,
    /// The crowd's outcome contradicted recorded indifference and was
    /// recorded as indifferent instead.
    pub resolved: bool,
    pub derived: usize,
}

/// Response to a vote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteReceipt {
    pub status: Status,
    pub finalized: Option<Finalized>,
    /// The open question after the vote: the same one with its updated
    /// tally, or the next one.
    pub question: Option<QuestionView>,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    universe: Universe,
    media: BTreeMap<String, String>,
    cfg: AggregationConfig,
    response_cap: u32,
    engine: Engine,
    current: Option<OpenQuestion>,
    next_id: u64,
    responses: Vec<Response>,
}

/// Everything a session is rebuilt from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub objects: Vec<String>,
    pub criteria: Vec<String>,
    #[serde(default)]
    pub media: BTreeMap<String, String>,
    pub k_min: u32,
    pub theta: f64,
    pub response_cap: u32,
    pub engine: EngineSnapshot,
    pub current: Option<OpenQuestion>,
    pub next_id: u64,
    pub responses: Vec<Response>,
}

impl Session {
    pub fn create(id: String, spec: &SessionSpec) -> Result<Self, SessionError> {
        let invalid = |m: String| SessionError::InvalidSpec(m);
        let universe = match &spec.fixture {
            Some(name) => {
                if !spec.objects.is_empty() || !spec.criteria.is_empty() {
                    return Err(invalid("give either a fixture or objects and criteria, not both".into()));
                }
                Dataset::fixture(name)
                    .map_err(|e: DatasetError| invalid(e.to_string()))?
                    .universe()
                    .clone()
            }
            None => Universe::new(spec.objects.clone(), spec.criteria.clone()).map_err(|e| invalid(e.to_string()))?,
        };
        if let Some(label) = spec.media.keys().find(|l| universe.find_object(l).is_none()) {
            return Err(invalid(format!("media given for unknown object {label:?}")));
        }
        let interactive = AggregationConfig::INTERACTIVE;
        let cfg = AggregationConfig::new(
            spec.k_min.unwrap_or(interactive.k_min),
            spec.theta.unwrap_or(interactive.theta),
        )
        .map_err(|e| invalid(e.to_string()))?;
        let response_cap = spec.response_cap.unwrap_or(3 * cfg.k_min);
        if response_cap < cfg.k_min {
            return Err(invalid(format!(
                "response_cap {response_cap} is below k_min {}",
                cfg.k_min
            )));
        }
        let strategy = spec.strategy.unwrap_or(Strategy::FRQ);
        let rng = ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or_else(rand::random));
        let engine = Engine::new(
            universe.object_count(),
            universe.criterion_count(),
            strategy,
            rng,
            SelectionMode::Incremental,
        );
        let mut s = Session {
            id,
            universe,
            media: spec.media.clone(),
            cfg,
            response_cap,
            engine,
            current: None,
            next_id: 1,
            responses: Vec::new(),
        };
        s.open_next();
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn status(&self) -> Status {
        if self.current.is_some() {
            Status::Active
        } else {
            Status::Terminal
        }
    }

    /// Every vote received, skips included, in arrival order.
    pub fn responses(&self) -> &[Response] {
        &self.responses
    }

    fn open_next(&mut self) {
        self.current = self.engine.next_question().map(|question| {
            let id = self.next_id;
            self.next_id += 1;
            OpenQuestion {
                id,
                question,
                tally: VoteTally::default(),
            }
        });
    }

    fn label(&self, o: ObjectId) -> String {
        self.universe.object_label(o).to_string()
    }

    pub fn question(&self) -> Option<QuestionView> {
        let open = self.current.as_ref()?;
        let q = open.question;
        Some(QuestionView {
            question_id: open.id,
            x: self.label(q.x),
            y: self.label(q.y),
            criterion: self.universe.criterion_label(q.c).to_string(),
            x_media: self.media.get(self.universe.object_label(q.x)).cloned(),
            y_media: self.media.get(self.universe.object_label(q.y)).cloned(),
            choices: vec![Vote::PreferX, Vote::Indifferent, Vote::PreferY, Vote::Skip],
            tally: open.tally,
        })
    }

    fn labels(&self, ids: &[ObjectId]) -> Vec<String> {
        ids.iter().map(|&o| self.label(o)).collect()
    }

    pub fn state(&self) -> StateView {
        let part = self.engine.partition();
        let kb = self.engine.knowledge();
        StateView {
            id: self.id.clone(),
            status: self.status(),
            strategy: self.engine.strategy(),
            objects: self.universe.object_labels().to_vec(),
            criteria: self.universe.criterion_labels().to_vec(),
            k_min: self.cfg.k_min,
            theta: self.cfg.theta,
            response_cap: self.response_cap,
            partition: PartitionView {
                confirmed: self.labels(&part.confirmed),
                undetermined: self.labels(&part.unknown),
                dominated: self.labels(&part.dominated),
            },
            asked: self.engine.asked_count(),
            derived: kb.derived_count(),
            remaining_candidates: candidate_sets(kb, &part).len(),
            progress: Progress {
                asked: self.engine.asked_count(),
                total: self.engine.question_universe(),
            },
            question: self.question(),
        }
    }

    pub fn result(&self) -> ResultView {
        let part = self.engine.partition();
        let outcomes = self
            .engine
            .knowledge()
            .asked()
            .iter()
            .map(|&(q, outcome)| OutcomeView {
                x: self.label(q.x),
                y: self.label(q.y),
                criterion: self.universe.criterion_label(q.c).to_string(),
                outcome,
            })
            .collect();
        ResultView {
            id: self.id.clone(),
            complete: part.unknown.is_empty(),
            pareto: self.labels(&part.confirmed),
            dominated: self.labels(&part.dominated),
            undetermined: self.labels(&part.unknown),
            asked: self.engine.asked_count(),
            outcomes,
        }
    }

    pub fn dominance_dot(&self) -> String {
        dominance_dot(&self.universe, self.engine.knowledge())
    }

    /// Outcome for the open question once enough responses are in: the
    /// threshold rule as soon as `k_min` respondents answered, or, when the
    /// response cap is reached first (skips count toward it), a met
    /// threshold or else indifference.
    fn decide(&self, tally: VoteTally) -> Option<Outcome> {
        match aggregate(tally, self.cfg) {
            Ok(o) => Some(o),
            Err(AggregationError::InsufficientVotes { .. }) if tally.total() >= self.response_cap => {
                let responded = tally.responded();
                let met = |count: u32| responded > 0 && count as f64 / responded as f64 >= self.cfg.theta;
                Some(if met(tally.prefer_x) {
                    Outcome::XBetter
                } else if met(tally.prefer_y) {
                    Outcome::YBetter
                } else {
                    Outcome::Indifferent
                })
            }
            Err(_) => None,
        }
    }

    pub fn submit_vote(&mut self, req: &VoteRequest) -> Result<VoteReceipt, SessionError> {
        let Some(open) = self.current.as_mut() else {
            return Err(SessionError::SessionTerminal);
        };
        if open.id != req.question_id {
            return Err(SessionError::StaleQuestion {
                got: req.question_id,
                open: open.id,
            });
        }
        open.tally.add(req.vote);
        let (id, question, tally) = (open.id, open.question, open.tally);
        self.responses.push(Response {
            respondent: req.respondent.clone(),
            question,
            vote: req.vote,
        });
        let finalized = match self.decide(tally) {
            None => None,
            Some(proposed) => {
                let applied = self
                    .engine
                    .apply(question, proposed)
                    .map_err(|e| SessionError::Internal(e.to_string()))?;
                self.open_next();
                Some(Finalized {
                    question_id: id,
                    x: self.label(question.x),
                    y: self.label(question.y),
                    criterion: self.universe.criterion_label(question.c).to_string(),
                    outcome: applied.outcome,
                    resolved: applied.resolved,
                    derived: applied.derived.len(),
                })
            }
        };
        Ok(VoteReceipt {
            status: self.status(),
            finalized,
            question: self.question(),
        })
    }

    pub fn to_state(&self) -> SessionState {
        SessionState {
            id: self.id.clone(),
            objects: self.universe.object_labels().to_vec(),
            criteria: self.universe.criterion_labels().to_vec(),
            media: self.media.clone(),
            k_min: self.cfg.k_min,
            theta: self.cfg.theta,
            response_cap: self.response_cap,
            engine: self.engine.snapshot(),
            current: self.current.clone(),
            next_id: self.next_id,
            responses: self.responses.clone(),
        }
    }

    pub fn from_state(state: SessionState) -> Result<Self, String> {
        let universe = Universe::new(state.objects, state.criteria).map_err(|e| e.to_string())?;
        let cfg = AggregationConfig::new(state.k_min, state.theta).map_err(|e| e.to_string())?;
        let snap = &state.engine;
        if snap.objects != universe.object_count() || snap.criteria != universe.criterion_count() {
            return Err("engine snapshot does not match the session's objects and criteria".into());
        }
        let engine = Engine::restore(snap).map_err(|e| e.to_string())?;
        Ok(Session {
            id: state.id,
            universe,
            media: state.media,
            cfg,
            response_cap: state.response_cap,
            engine,
            current: state.current,
            next_id: state.next_id,
            responses: state.responses,
        })
    }
}
