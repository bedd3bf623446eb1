//! The experiment store: sessions in memory, backed by the event log.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use approval_core::analysis::{write_ballot_log, BallotLogRow};
use approval_core::{builtin_scenarios, Ballot, CompletionModel, Scenario};

use crate::error::{Result, ServiceError};
use crate::log::{Event, EventLog};
use crate::playlist::{Election, Group, PlaylistConfig};
use crate::session::{
    derive_identity, dollars, resolve_election, CandidateView, CreatedSession, CurrentElection, DoneView,
    ElectionResult, ElectionView, HistoryEntry, Outcome, SessionRecord, SessionSummary,
};

/// Approvals a participant may give per election.
pub const MAX_APPROVALS: usize = 5;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub model: CompletionModel,
    pub playlists: PlaylistConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportFilter {
    pub scenario: Option<String>,
    pub k: Option<usize>,
    pub n: Option<u32>,
}

impl ExportFilter {
    fn accepts(&self, e: &Election) -> bool {
        self.scenario.as_ref().is_none_or(|s| *s == e.scenario_id)
            && self.k.is_none_or(|k| k == e.k)
            && self.n.is_none_or(|n| n == e.n)
    }
}

#[derive(Default)]
struct Sessions {
    by_id: HashMap<String, Arc<Mutex<SessionRecord>>>,
    /// Creation order.
    order: Vec<String>,
}

pub struct Experiment {
    config: ServiceConfig,
    scenarios: Vec<Scenario>,
    sessions: RwLock<Sessions>,
    log: Mutex<EventLog>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

impl Experiment {
    pub fn in_memory(config: ServiceConfig) -> Self {
        Experiment {
            config,
            scenarios: builtin_scenarios(),
            sessions: RwLock::new(Sessions::default()),
            log: Mutex::new(EventLog::in_memory()),
        }
    }

    /// Opens the log in `dir` and replays it.
    pub fn open(dir: &Path, config: ServiceConfig) -> Result<Self> {
        let (log, events) = EventLog::open(dir)?;
        let exp = Experiment { log: Mutex::new(log), ..Experiment::in_memory(config) };
        for (i, event) in events.into_iter().enumerate() {
            exp.apply(event).map_err(|e| ServiceError::Storage(format!("replaying event {}: {e}", i + 1)))?;
        }
        Ok(exp)
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    fn scenario(&self, id: &str) -> Result<&Scenario> {
        self.scenarios
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| ServiceError::Internal(format!("playlist names unknown scenario {id:?}")))
    }

    fn apply(&self, event: Event) -> Result<()> {
        match event {
            Event::SessionCreated { session_id, group, seed, model, playlist } => {
                let model: CompletionModel = model.parse()?;
                let mut sessions = self.sessions.write().unwrap_or_else(|p| p.into_inner());
                if sessions.by_id.contains_key(&session_id) {
                    return Err(ServiceError::Conflict(format!("duplicate session {session_id}")));
                }
                let record = SessionRecord { id: session_id.clone(), group, seed, model, playlist, results: vec![] };
                sessions.by_id.insert(session_id.clone(), Arc::new(Mutex::new(record)));
                sessions.order.push(session_id);
            }
            Event::BallotSubmitted { session_id, election_index, ballot, missing_ballots, winners, earnings_delta_cents } => {
                let handle = self.handle(&session_id)?;
                let mut s = lock(&handle);
                if s.is_done() || election_index != s.cursor() {
                    return Err(ServiceError::Conflict(format!(
                        "ballot for election {election_index} but session {session_id} is at {}",
                        s.cursor()
                    )));
                }
                let scenario = self.scenario(&s.playlist[election_index].scenario_id)?;
                let parse = |text: &str| Ballot::parse(&scenario.candidates, text);
                let result = ElectionResult {
                    ballot: parse(&ballot)?,
                    missing_ballots: missing_ballots.iter().map(|b| parse(b)).collect::<approval_core::Result<_>>()?,
                    winners: parse(&winners)?,
                    earnings_delta_cents,
                };
                if scenario.utilities.of_set(result.winners) != earnings_delta_cents {
                    return Err(ServiceError::Storage(format!(
                        "logged earnings {earnings_delta_cents} do not match the winners {winners:?}"
                    )));
                }
                s.results.push(result);
            }
        }
        Ok(())
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<SessionRecord>>> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions.by_id.get(id).cloned().ok_or_else(|| ServiceError::NotFound(id.to_owned()))
    }

    /// Creates and persists a session. Without a seed one is drawn from the OS.
    pub fn create_session(&self, group: Option<Group>, seed: Option<u64>) -> Result<SessionRecord> {
        let seed = seed.unwrap_or_else(rand::random);
        let mut sessions = self.sessions.write().unwrap_or_else(|p| p.into_inner());
        let (id, drawn) = derive_identity(seed, sessions.order.len());
        let group = group.unwrap_or(drawn);
        let record = SessionRecord {
            id: id.clone(),
            group,
            seed,
            model: self.config.model.clone(),
            playlist: self.config.playlists.playlist(group),
            results: vec![],
        };
        lock(&self.log).append(&Event::SessionCreated {
            session_id: id.clone(),
            group,
            seed,
            model: record.model.to_string(),
            playlist: record.playlist.clone(),
        })?;
        sessions.by_id.insert(id.clone(), Arc::new(Mutex::new(record.clone())));
        sessions.order.push(id.clone());
        drop(sessions);
        tracing::info!(session = %id, group = group.winners(), "session created");
        Ok(record)
    }

    pub fn created_view(record: &SessionRecord) -> CreatedSession {
        CreatedSession { session_id: record.id.clone(), group: record.group, total_elections: record.playlist.len() }
    }

    pub fn session(&self, id: &str) -> Result<SessionRecord> {
        let handle = self.handle(id)?;
        let record = lock(&handle).clone();
        Ok(record)
    }

    /// The election to vote in next; never reveals missing ballots.
    pub fn current_election(&self, id: &str) -> Result<CurrentElection> {
        let handle = self.handle(id)?;
        let s = lock(&handle);
        if s.is_done() {
            return Ok(CurrentElection::Done(DoneView {
                session_id: s.id.clone(),
                total_elections: s.playlist.len(),
                raw_total_cents: s.raw_total_cents(),
                displayed_payout_cents: s.displayed_payout_cents(),
                displayed_payout: dollars(s.displayed_payout_cents()),
            }));
        }
        let election = &s.playlist[s.cursor()];
        let scenario = self.scenario(&election.scenario_id)?;
        let candidates = (0..scenario.m())
            .map(|i| CandidateView {
                label: scenario.candidates.label(i).to_owned(),
                payout_cents: scenario.utilities.0[i],
                payout: dollars(scenario.utilities.0[i]),
                votes: scenario.base_scores.0[i],
            })
            .collect();
        Ok(CurrentElection::Election(ElectionView {
            session_id: s.id.clone(),
            election_index: s.cursor(),
            total_elections: s.playlist.len(),
            scenario_id: scenario.id.clone(),
            k: election.k,
            missing_voters: election.n,
            max_approvals: MAX_APPROVALS.min(scenario.m()),
            candidates,
        }))
    }

    /// Resolves the current election with `approved`. `election_index`, when
    /// given, must name the current election (guards against double submits).
    pub fn submit_ballot<S: AsRef<str>>(
        &self,
        id: &str,
        approved: &[S],
        election_index: Option<usize>,
    ) -> Result<Outcome> {
        let handle = self.handle(id)?;
        let mut s = lock(&handle);
        if s.is_done() {
            return Err(ServiceError::Conflict(format!("session {id} has finished all elections")));
        }
        let index = s.cursor();
        if let Some(expected) = election_index {
            if expected != index {
                return Err(ServiceError::Conflict(format!("election {expected} is not current (current is {index})")));
            }
        }
        let election = s.playlist[index].clone();
        let scenario = self.scenario(&election.scenario_id)?;
        if approved.len() > MAX_APPROVALS {
            return Err(ServiceError::Validation(format!("at most {MAX_APPROVALS} approvals allowed")));
        }
        let ballot = Ballot::from_labels(&scenario.candidates, approved)?;
        let result = resolve_election(scenario, &election, &s.model, s.seed, index, ballot)?;

        let render = |b: Ballot| b.render(&scenario.candidates);
        lock(&self.log).append(&Event::BallotSubmitted {
            session_id: s.id.clone(),
            election_index: index,
            ballot: render(result.ballot),
            missing_ballots: result.missing_ballots.iter().map(|b| render(*b)).collect(),
            winners: render(result.winners),
            earnings_delta_cents: result.earnings_delta_cents,
        })?;
        s.results.push(result.clone());

        let labels = |b: Ballot| b.labels(&scenario.candidates);
        let outcome = Outcome {
            session_id: s.id.clone(),
            election_index: index,
            ballot: labels(result.ballot),
            winners: labels(result.winners),
            revealed_missing_ballots: result.missing_ballots.iter().map(|b| labels(*b)).collect(),
            earnings_delta_cents: result.earnings_delta_cents,
            earnings_delta: dollars(result.earnings_delta_cents),
            raw_total_cents: s.raw_total_cents(),
            done: s.is_done(),
        };
        drop(s);
        tracing::info!(session = %id, election = index, delta = outcome.earnings_delta_cents, "ballot recorded");
        Ok(outcome)
    }

    /// Totals and history. Fails if the earnings accounting does not add up.
    pub fn session_summary(&self, id: &str) -> Result<SessionSummary> {
        let handle = self.handle(id)?;
        let s = lock(&handle);
        let mut history = Vec::with_capacity(s.results.len());
        let mut from_winners = 0i64;
        for (i, r) in s.results.iter().enumerate() {
            let election = &s.playlist[i];
            let scenario = self.scenario(&election.scenario_id)?;
            from_winners += scenario.utilities.of_set(r.winners);
            let labels = |b: Ballot| b.labels(&scenario.candidates);
            history.push(HistoryEntry {
                election_index: i,
                scenario_id: election.scenario_id.clone(),
                k: election.k,
                n: election.n,
                ballot: labels(r.ballot),
                revealed_missing_ballots: r.missing_ballots.iter().map(|b| labels(*b)).collect(),
                winners: labels(r.winners),
                earnings_delta_cents: r.earnings_delta_cents,
            });
        }
        let raw = s.raw_total_cents();
        if raw != from_winners {
            return Err(ServiceError::Internal(format!(
                "earnings accounting broken for {id}: deltas sum to {raw}, winners are worth {from_winners}"
            )));
        }
        Ok(SessionSummary {
            session_id: s.id.clone(),
            group: s.group,
            completed: s.cursor(),
            total_elections: s.playlist.len(),
            raw_total_cents: raw,
            displayed_payout_cents: s.displayed_payout_cents(),
            displayed_payout: dollars(s.displayed_payout_cents()),
            history,
        })
    }

    /// Ballot-log CSV of every submitted ballot, by session creation order then election index.
    pub fn export_log(&self, filter: &ExportFilter) -> Result<String> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        let mut rows = Vec::new();
        for id in &sessions.order {
            let s = lock(&sessions.by_id[id]);
            for (election, r) in s.playlist.iter().zip(&s.results) {
                if !filter.accepts(election) {
                    continue;
                }
                let scenario = self.scenario(&election.scenario_id)?;
                rows.push(BallotLogRow {
                    session_id: s.id.clone(),
                    scenario_id: election.scenario_id.clone(),
                    k: election.k,
                    n: election.n,
                    ballot: r.ballot.render(&scenario.candidates),
                });
            }
        }
        Ok(write_ballot_log(&rows))
    }

    /// Every session in creation order.
    pub fn sessions(&self) -> Vec<SessionRecord> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions.order.iter().map(|id| lock(&sessions.by_id[id]).clone()).collect()
    }
}
