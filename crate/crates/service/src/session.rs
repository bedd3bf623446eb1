//! Session state and the outcome of one election.

use approval_core::{sample_winning_set, tally, Ballot, CompletionModel, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::playlist::{Election, Group};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionResult {
    pub ballot: Ballot,
    pub missing_ballots: Vec<Ballot>,
    pub winners: Ballot,
    pub earnings_delta_cents: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionRecord {
    pub id: String,
    pub group: Group,
    pub seed: u64,
    pub model: CompletionModel,
    pub playlist: Vec<Election>,
    pub results: Vec<ElectionResult>,
}

impl SessionRecord {
    pub fn cursor(&self) -> usize {
        self.results.len()
    }

    pub fn is_done(&self) -> bool {
        self.cursor() >= self.playlist.len()
    }

    pub fn raw_total_cents(&self) -> i64 {
        self.results.iter().map(|r| r.earnings_delta_cents).sum()
    }

    /// What the participant is paid: the raw total, never below zero.
    pub fn displayed_payout_cents(&self) -> i64 {
        self.raw_total_cents().max(0)
    }
}

// Stream 0 of the session generator derives the id and group; election i
// uses stream 2i+1 for its missing ballots and 2i+2 for the tie-break seed.
const IDENTITY_STREAM: u64 = 0;

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Session id and random group for the `seq`-th session created with `seed`.
pub(crate) fn derive_identity(seed: u64, seq: usize) -> (String, Group) {
    let mut rng = stream(seed, IDENTITY_STREAM);
    let tag: u64 = rng.random();
    let group = if rng.random_bool(0.5) { Group::TwoWinner } else { Group::ThreeWinner };
    (format!("{tag:016x}-{seq}"), group)
}

/// Draws the missing ballots and the winners of election `index` given the participant's ballot.
pub fn resolve_election(
    scenario: &Scenario,
    election: &Election,
    model: &CompletionModel,
    seed: u64,
    index: usize,
    ballot: Ballot,
) -> Result<ElectionResult> {
    let sampler = model.sampler(scenario.m())?;
    let mut missing_rng = stream(seed, 2 * index as u64 + 1);
    let missing_ballots: Vec<Ballot> = (0..election.n).map(|_| sampler.sample(&mut missing_rng)).collect();

    let mut scores = tally(&scenario.base_scores, ballot)?;
    for b in &missing_ballots {
        scores.add_ballot(*b);
    }
    let tie_seed: u64 = stream(seed, 2 * index as u64 + 2).random();
    let winners = sample_winning_set(&scores, election.k, tie_seed)?;
    Ok(ElectionResult {
        ballot,
        missing_ballots,
        winners,
        earnings_delta_cents: scenario.utilities.of_set(winners),
    })
}

/// `$0.25`, `-$1.00`.
pub fn dollars(cents: i64) -> String {
    let sign = if cents < 0 { "-" } else { "" };
    let abs = cents.unsigned_abs();
    format!("{sign}${}.{:02}", abs / 100, abs % 100)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateView {
    pub label: String,
    pub payout_cents: i64,
    pub payout: String,
    pub votes: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElectionView {
    pub session_id: String,
    pub election_index: usize,
    pub total_elections: usize,
    pub scenario_id: String,
    pub k: usize,
    pub missing_voters: u32,
    pub max_approvals: usize,
    pub candidates: Vec<CandidateView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoneView {
    pub session_id: String,
    pub total_elections: usize,
    pub raw_total_cents: i64,
    pub displayed_payout_cents: i64,
    pub displayed_payout: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CurrentElection {
    Election(ElectionView),
    Done(DoneView),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub session_id: String,
    pub election_index: usize,
    pub ballot: Vec<String>,
    pub winners: Vec<String>,
    pub revealed_missing_ballots: Vec<Vec<String>>,
    pub earnings_delta_cents: i64,
    pub earnings_delta: String,
    pub raw_total_cents: i64,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryEntry {
    pub election_index: usize,
    pub scenario_id: String,
    pub k: usize,
    pub n: u32,
    pub ballot: Vec<String>,
    pub revealed_missing_ballots: Vec<Vec<String>>,
    pub winners: Vec<String>,
    pub earnings_delta_cents: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub group: Group,
    pub completed: usize,
    pub total_elections: usize,
    pub raw_total_cents: i64,
    pub displayed_payout_cents: i64,
    pub displayed_payout: String,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CreatedSession {
    pub session_id: String,
    pub group: Group,
    pub total_elections: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approval_core::{builtin, CandidateSet};

    #[test]
    fn dollar_rendering() {
        assert_eq!(dollars(25), "$0.25");
        assert_eq!(dollars(-100), "-$1.00");
        assert_eq!(dollars(-75), "-$0.75");
        assert_eq!(dollars(1234), "$12.34");
        assert_eq!(dollars(0), "$0.00");
    }

    #[test]
    fn payout_clamps_but_raw_total_is_kept() {
        let mk = |d| ElectionResult {
            ballot: Ballot::EMPTY,
            missing_ballots: vec![],
            winners: Ballot::EMPTY,
            earnings_delta_cents: d,
        };
        let s = SessionRecord {
            id: "x".into(),
            group: Group::TwoWinner,
            seed: 0,
            model: CompletionModel::UniformSubsets,
            playlist: vec![],
            results: vec![mk(25), mk(0), mk(-100)],
        };
        assert_eq!(s.raw_total_cents(), -75);
        assert_eq!(s.displayed_payout_cents(), 0);
    }

    #[test]
    fn resolution_is_deterministic_and_consistent() {
        let s3 = builtin("3").unwrap();
        let e = Election { scenario_id: "3".into(), k: 1, n: 3 };
        let ballot = Ballot::parse(&CandidateSet::lettered(5).unwrap(), "ABE").unwrap();
        let model = CompletionModel::UniformSubsets;
        let a = resolve_election(&s3, &e, &model, 42, 7, ballot).unwrap();
        let b = resolve_election(&s3, &e, &model, 42, 7, ballot).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.missing_ballots.len(), 3);
        assert_eq!(a.winners.len(), 1);
        assert_eq!(a.earnings_delta_cents, s3.utilities.of_set(a.winners));
    }

    #[test]
    fn no_missing_voters_and_no_tie_is_forced() {
        // Tally (3,3,4,4,4) plus {E} leaves E alone on top.
        let s3 = builtin("3").unwrap();
        let e = Election { scenario_id: "3".into(), k: 1, n: 0 };
        let ballot = Ballot::parse(&s3.candidates, "E").unwrap();
        for seed in 0..20 {
            let r = resolve_election(&s3, &e, &CompletionModel::UniformSubsets, seed, 0, ballot).unwrap();
            assert_eq!(r.winners, ballot);
            assert_eq!(r.earnings_delta_cents, 25);
        }
    }

    #[test]
    fn identity_depends_on_seed_and_sequence() {
        assert_eq!(derive_identity(5, 0), derive_identity(5, 0));
        assert_ne!(derive_identity(5, 0).0, derive_identity(5, 1).0);
        assert_ne!(derive_identity(5, 0).0, derive_identity(6, 0).0);
        let twos = (0..200u64).filter(|&s| derive_identity(s, 0).1 == Group::TwoWinner).count();
        assert!((70..130).contains(&twos), "{twos}");
    }
}
