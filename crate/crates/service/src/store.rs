use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use crate::session::{Session, SessionError, SessionSpec};
use crate::snapshot::{self, SnapshotError};

pub type SharedSession = Arc<Mutex<Session>>;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Snapshot { path: PathBuf, source: SnapshotError },
}

/// Live sessions, optionally mirrored to one snapshot file per session.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, SharedSession>>,
    state_dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// Opens `dir`, creating it if needed, and loads every `*.json` snapshot
    /// in it. A corrupt snapshot fails the whole load.
    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        let io_err = |path: &Path, source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        };
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir).map_err(|e| io_err(&dir, e))? {
            let path = entry.map_err(|e| io_err(&dir, e))?.path();
            if path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
            let session = snapshot::decode(&text).map_err(|source| StoreError::Snapshot {
                path: path.clone(),
                source,
            })?;
            sessions.insert(session.id().to_string(), Arc::new(Mutex::new(session)));
        }
        Ok(SessionStore {
            sessions: RwLock::new(sessions),
            state_dir: Some(dir),
        })
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn create(&self, spec: &SessionSpec) -> Result<SharedSession, SessionError> {
        let id = format!("{:032x}", rand::random::<u128>());
        let session = Session::create(id.clone(), spec)?;
        self.persist(&session)?;
        let shared = Arc::new(Mutex::new(session));
        self.sessions.write().unwrap().insert(id, shared.clone());
        Ok(shared)
    }

    pub fn get(&self, id: &str) -> Result<SharedSession, SessionError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    /// Writes the session's snapshot when the store has a state directory.
    /// The file is replaced atomically.
    pub fn persist(&self, session: &Session) -> Result<(), SessionError> {
        let Some(dir) = &self.state_dir else {
            return Ok(());
        };
        let path = dir.join(format!("{}.json", session.id()));
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, snapshot::encode(session))
            .and_then(|()| fs::rename(&tmp, &path))
            .map_err(|e| SessionError::Internal(format!("saving {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::VoteRequest;
    use pareto_elicit::aggregation::Vote;

    #[test]
    fn sessions_survive_a_restart() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SessionSpec {
            objects: vec!["a".into(), "b".into(), "c".into()],
            criteria: vec!["x".into(), "y".into()],
            ..SessionSpec::default()
        };
        let store = SessionStore::persistent(dir.path()).unwrap();
        let shared = store.create(&spec).unwrap();
        let before = {
            let mut s = shared.lock().unwrap();
            let q = s.question().unwrap().question_id;
            s.submit_vote(&VoteRequest {
                question_id: q,
                vote: Vote::PreferY,
                respondent: "r".into(),
            })
            .unwrap();
            store.persist(&s).unwrap();
            s.to_state()
        };
        let reopened = SessionStore::persistent(dir.path()).unwrap();
        assert_eq!(reopened.len(), 1);
        let s = reopened.get(&before.id).unwrap();
        assert_eq!(s.lock().unwrap().to_state(), before);
        assert!(matches!(reopened.get("nope"), Err(SessionError::UnknownSession(_))));
    }

    #[test]
    fn corrupt_file_fails_the_load() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("x.json"), "not json").unwrap();
        assert!(matches!(
            SessionStore::persistent(dir.path()),
            Err(StoreError::Snapshot { .. })
        ));
    }
}
