//! k-winner approval voting with missing votes.
//!
//! The crate computes exact expected utilities of approval ballots when some
//! voters have not voted yet (ties at the cutoff broken uniformly at random),
//! generates and classifies the truthful, take-the-X-best and
//! regret-minimization heuristic ballots, searches all ballots for the best
//! response, and reproduces per-scenario heuristic-performance tables.
//!
//! Utilities are integer cents and every probability is an exact rational.

pub mod analysis;
pub mod election;
pub mod error;
pub mod money;
pub mod scenario;
pub mod strategy;
pub mod uncertainty;

pub use election::{
    expected_outcome_utility, sample_winning_set, sample_winning_set_with, tally, winner_distribution, Ballot,
    CandidateSet, ScoreVector, UtilityVector, WinnerDistribution, MAX_CANDIDATES,
};
pub use error::{Error, Result};
pub use money::Rational;
pub use scenario::{builtin, builtin_scenarios, Scenario};
pub use strategy::{
    best_response, classify_ballot, heuristic_ballots, is_sincere, regret_min_ballot, take_x_best,
    truthful_ballot, BestResponse, Classification, HeuristicLabel,
};
pub use uncertainty::{
    expected_utility_bruteforce, expected_utility_exact, expected_utility_mc, increment_distribution,
    CompletionModel, Evaluator, IncrementDistribution, McEstimate,
};
