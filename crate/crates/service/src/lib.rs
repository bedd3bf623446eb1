//! Experiment service for the approval-voting study: participants get a
//! playlist of elections, submit ballots, and see seeded outcomes. Every
//! state change goes through an append-only event log first.

pub mod error;
pub mod experiment;
pub mod http;
pub mod log;
pub mod playlist;
pub mod session;

pub use error::{Result, ServiceError};
pub use experiment::{Experiment, ExportFilter, ServiceConfig, MAX_APPROVALS};
pub use http::{router, serve};
pub use log::{Event, EventLog, LOG_FILE_NAME};
pub use playlist::{Election, Group, PlaylistConfig};
pub use session::{
    resolve_election, CurrentElection, ElectionResult, ElectionView, Outcome, SessionRecord, SessionSummary,
};
