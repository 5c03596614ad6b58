//! Versioned on-disk form of a session.
//!
//! ```json
//! {"format": "pareto-elicit-session", "version": 1, "checksum": "<sha256 hex>", "session": {...}}
//! ```
//!
//! The checksum covers the compact JSON serialization of `session`.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::session::{Session, SessionState};

pub const FORMAT: &str = "pareto-elicit-session";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error("snapshot version {0} is not supported")]
    UnsupportedVersion(u32),
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    checksum: String,
    session: Value,
}

fn checksum(session: &Value) -> String {
    hex::encode(Sha256::digest(session.to_string().as_bytes()))
}

pub fn encode(session: &Session) -> String {
    let value = serde_json::to_value(session.to_state()).expect("session state serializes");
    let env = Envelope {
        format: FORMAT.into(),
        version: VERSION,
        checksum: checksum(&value),
        session: value,
    };
    serde_json::to_string_pretty(&env).expect("envelope serializes")
}

pub fn decode(text: &str) -> Result<Session, SnapshotError> {
    let corrupt = |m: String| SnapshotError::Corrupt(m);
    let env: Envelope = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    if env.format != FORMAT {
        return Err(corrupt(format!("unexpected format {:?}", env.format)));
    }
    if env.version != VERSION {
        return Err(SnapshotError::UnsupportedVersion(env.version));
    }
    if checksum(&env.session) != env.checksum {
        return Err(corrupt("checksum mismatch".into()));
    }
    let state: SessionState = serde_json::from_value(env.session).map_err(|e| corrupt(e.to_string()))?;
    Session::from_state(state).map_err(corrupt)
}
