//! Append-only newline-delimited JSON event log.
//!
//! Each event is written with a single `write_all` followed by `sync_data`.
//! A final line without its newline is a write torn by a crash: it is
//! dropped (and truncated away) on open. Any other unparsable line is an error.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};
use crate::playlist::{Election, Group};

pub const LOG_FILE_NAME: &str = "events.ndjson";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case", deny_unknown_fields)]
pub enum Event {
    SessionCreated {
        session_id: String,
        group: Group,
        seed: u64,
        model: String,
        playlist: Vec<Election>,
    },
    /// Ballots are label strings in candidate order; empty means abstain.
    BallotSubmitted {
        session_id: String,
        election_index: usize,
        ballot: String,
        missing_ballots: Vec<String>,
        winners: String,
        earnings_delta_cents: i64,
    },
}

#[derive(Debug)]
pub struct EventLog {
    file: Option<File>,
    path: Option<PathBuf>,
}

impl EventLog {
    /// A log that keeps nothing; for tests and throwaway servers.
    pub fn in_memory() -> Self {
        EventLog { file: None, path: None }
    }

    /// Opens (creating if needed) `dir/events.ndjson` and returns its events.
    pub fn open(dir: &Path) -> Result<(Self, Vec<Event>)> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(LOG_FILE_NAME);
        let mut text = String::new();
        if path.exists() {
            File::open(&path)?.read_to_string(&mut text)?;
        }
        let complete = text.rfind('\n').map_or(0, |i| i + 1);
        if complete < text.len() {
            tracing::warn!(bytes = text.len() - complete, "dropping torn final event");
            OpenOptions::new().write(true).open(&path)?.set_len(complete as u64)?;
        }
        let mut events = Vec::new();
        for (no, line) in text[..complete].lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let event = serde_json::from_str(line)
                .map_err(|e| ServiceError::Storage(format!("{}:{}: {e}", path.display(), no + 1)))?;
            events.push(event);
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok((EventLog { file: Some(file), path: Some(path) }, events))
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn append(&mut self, event: &Event) -> Result<()> {
        let Some(file) = self.file.as_mut() else {
            return Ok(());
        };
        let mut line = serde_json::to_string(event).map_err(|e| ServiceError::Internal(e.to_string()))?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        file.sync_data()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn created(id: &str) -> Event {
        Event::SessionCreated {
            session_id: id.into(),
            group: Group::ThreeWinner,
            seed: 9,
            model: "uniform-subsets".into(),
            playlist: vec![Election { scenario_id: "3".into(), k: 1, n: 0 }],
        }
    }

    #[test]
    fn append_then_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let (mut log, events) = EventLog::open(dir.path()).unwrap();
        assert!(events.is_empty());
        log.append(&created("a")).unwrap();
        log.append(&created("b")).unwrap();
        drop(log);
        let (_, events) = EventLog::open(dir.path()).unwrap();
        assert_eq!(events, vec![created("a"), created("b")]);
    }

    #[test]
    fn torn_tail_is_dropped_and_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let (mut log, _) = EventLog::open(dir.path()).unwrap();
        log.append(&created("a")).unwrap();
        drop(log);
        let path = dir.path().join(LOG_FILE_NAME);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"event\":\"session_cre").unwrap();
        drop(f);

        let (mut log, events) = EventLog::open(dir.path()).unwrap();
        assert_eq!(events, vec![created("a")]);
        log.append(&created("b")).unwrap();
        drop(log);
        let (_, events) = EventLog::open(dir.path()).unwrap();
        assert_eq!(events, vec![created("a"), created("b")]);
    }

    #[test]
    fn corrupt_interior_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(LOG_FILE_NAME), "not json\n").unwrap();
        assert!(matches!(EventLog::open(dir.path()), Err(ServiceError::Storage(_))));
    }

    #[test]
    fn wire_format() {
        let e = Event::BallotSubmitted {
            session_id: "s".into(),
            election_index: 0,
            ballot: "ABE".into(),
            missing_ballots: vec!["".into()],
            winners: "E".into(),
            earnings_delta_cents: 25,
        };
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.starts_with("{\"event\":\"ballot_submitted\""), "{text}");
        assert_eq!(serde_json::from_str::<Event>(&text).unwrap(), e);
    }
}
