//! Datasets bundled with the crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{VoteRow, VoteTable, VoteTableError};
use crate::order::{Universe, UniverseError};
use crate::sim::{GroundTruth, TruthError};

const MOVIE_FULL: &str = include_str!("../fixtures/movie-full.json");
const FIG3: &str = include_str!("../fixtures/fig3.json");
const MOVIE_STORY: &str = include_str!("../fixtures/movie-story.json");

/// Vote-table dataset: the universe plus recorded vote counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteDataset {
    pub objects: Vec<String>,
    pub criteria: Vec<String>,
    pub votes: Vec<VoteRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("malformed dataset: {0}")]
    Parse(String),
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Votes(#[from] VoteTableError),
    #[error(transparent)]
    Truth(#[from] TruthError),
    #[error("unknown fixture {0:?}; expected one of movie-full, movie-story, fig3")]
    UnknownFixture(String),
}

impl VoteDataset {
    pub fn parse(json: &str) -> Result<Self, DatasetError> {
        serde_json::from_str(json).map_err(|e| DatasetError::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<(Universe, VoteTable), DatasetError> {
        let u = Universe::new(self.objects.clone(), self.criteria.clone())?;
        let table = VoteTable::from_rows(&u, &self.votes)?;
        Ok((u, table))
    }
}

/// A dataset that can answer questions: a complete ground truth or a vote table.
#[derive(Debug, Clone)]
pub enum Dataset {
    Truth(GroundTruth),
    Votes(Universe, VoteTable),
}

impl Dataset {
    pub fn universe(&self) -> &Universe {
        match self {
            Dataset::Truth(t) => t.universe(),
            Dataset::Votes(u, _) => u,
        }
    }

    /// Bundled dataset by name.
    pub fn fixture(name: &str) -> Result<Self, DatasetError> {
        match name {
            "movie-full" => Ok(Dataset::Truth(movie_full())),
            "fig3" => Ok(Dataset::Truth(fig3())),
            "movie-story" => {
                let (u, t) = movie_story().build()?;
                Ok(Dataset::Votes(u, t))
            }
            other => Err(DatasetError::UnknownFixture(other.to_string())),
        }
    }

    /// Reads a ground-truth file (`strict` key) or a vote dataset (`votes` key).
    pub fn parse(json: &str) -> Result<Self, DatasetError> {
        let value: serde_json::Value = serde_json::from_str(json).map_err(|e| DatasetError::Parse(e.to_string()))?;
        if value.get("votes").is_some() {
            let (u, t) = VoteDataset::parse(json)?.build()?;
            Ok(Dataset::Votes(u, t))
        } else {
            Ok(Dataset::Truth(GroundTruth::parse(json)?))
        }
    }
}

/// Six movies on story, music and acting; `b` is the only Pareto-optimal one.
pub fn movie_full() -> GroundTruth {
    GroundTruth::parse(MOVIE_FULL).expect("bundled fixture is valid")
}

/// Three objects whose dominance forms a cycle.
pub fn fig3() -> GroundTruth {
    GroundTruth::parse(FIG3).expect("bundled fixture is valid")
}

/// Story votes for the six movies; music and acting have no votes.
pub fn movie_story() -> VoteDataset {
    VoteDataset::parse(MOVIE_STORY).expect("bundled fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        assert_eq!(movie_full().object_count(), 6);
        assert_eq!(fig3().criterion_count(), 3);
        let (u, t) = movie_story().build().unwrap();
        assert_eq!(u.criterion_count(), 3);
        assert_eq!(t.len(), 15);
        assert!(Dataset::fixture("nope").is_err());
    }
}
