//! Ballot log CSV: `session_id,scenario_id,k,n,ballot`, where `ballot` is
//! the approved labels concatenated in candidate order (empty = abstain).

use serde::{Deserialize, Serialize};

use crate::election::Ballot;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

pub const BALLOT_LOG_HEADER: &str = "session_id,scenario_id,k,n,ballot";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallotLogRow {
    pub session_id: String,
    pub scenario_id: String,
    pub k: usize,
    pub n: u32,
    pub ballot: String,
}

/// A log row resolved against its scenario's candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallotRecord {
    pub session_id: String,
    pub scenario_id: String,
    pub k: usize,
    pub n: u32,
    pub ballot: Ballot,
}

impl BallotLogRow {
    pub fn resolve(&self, scenarios: &[Scenario]) -> Result<BallotRecord> {
        let scenario = scenarios
            .iter()
            .find(|s| s.id == self.scenario_id)
            .ok_or_else(|| Error::Data(format!("unknown scenario {:?}", self.scenario_id)))?;
        Ok(BallotRecord {
            session_id: self.session_id.clone(),
            scenario_id: self.scenario_id.clone(),
            k: self.k,
            n: self.n,
            ballot: Ballot::parse(&scenario.candidates, &self.ballot)?,
        })
    }
}

pub fn write_ballot_log(rows: &[BallotLogRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
    format!("{BALLOT_LOG_HEADER}\n{body}")
}

/// Parses a ballot log and resolves every ballot against `scenarios`.
pub fn parse_ballot_log(text: &str, scenarios: &[Scenario]) -> Result<Vec<BallotRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let expected: Vec<&str> = BALLOT_LOG_HEADER.split(',').collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!("ballot log header must be `{BALLOT_LOG_HEADER}`")));
    }
    reader
        .deserialize::<BallotLogRow>()
        .enumerate()
        .map(|(i, row)| {
            let row = row.map_err(|e| Error::Parse(format!("record {}: {e}", i + 1)))?;
            row.resolve(scenarios)
        })
        .collect()
}
