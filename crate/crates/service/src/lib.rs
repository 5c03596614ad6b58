//! Live elicitation sessions behind a small HTTP API.
//!
//! A session asks one question at a time, collects votes on it until the
//! threshold rule decides it, and records the outcome. See [`http`] for the
//! routes and [`snapshot`] for the file format sessions are saved in.

pub mod http;
pub mod session;
pub mod snapshot;
pub mod store;

pub use http::router;
pub use session::{Session, SessionError, SessionSpec};
pub use store::SessionStore;
