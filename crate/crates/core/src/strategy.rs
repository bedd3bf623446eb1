//! Heuristic ballots, sincerity, classification and exact best response.

use std::fmt;

use rayon::prelude::*;

use crate::election::{Ballot, UtilityVector};
use crate::error::{Error, Result};
use crate::money::Rational;
use crate::scenario::Scenario;
use crate::uncertainty::{CompletionModel, Evaluator};

/// Approve every candidate with strictly positive utility.
pub fn truthful_ballot(u: &UtilityVector) -> Ballot {
    Ballot::from_indices((0..u.len()).filter(|&i| u.0[i] > 0))
}

/// Approve the `x` highest-utility candidates; only defined inside the truthful ballot
/// and when the x-th and (x+1)-th utilities differ.
pub fn take_x_best(u: &UtilityVector, x: usize) -> Result<Ballot> {
    let positive = truthful_ballot(u).len();
    if x == 0 || x > positive {
        return Err(Error::Domain(format!(
            "take-{x}-best needs 1 <= x <= {positive} (candidates with positive utility)"
        )));
    }
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u.0[b].cmp(&u.0[a]));
    if x < order.len() && u.0[order[x - 1]] == u.0[order[x]] {
        return Err(Error::Domain(format!(
            "utility tie across the take-{x}-best boundary ({} cents)",
            u.0[order[x]]
        )));
    }
    Ok(Ballot::from_indices(order[..x].iter().copied()))
}

/// Approve everyone except the disliked (negative-utility) candidates.
pub fn regret_min_ballot(u: &UtilityVector) -> Ballot {
    Ballot::from_indices((0..u.len()).filter(|&i| u.0[i] >= 0))
}

/// Every approved candidate is liked at least as much as every disapproved one.
pub fn is_sincere(ballot: Ballot, u: &UtilityVector) -> bool {
    let approved = (0..u.len()).filter(|&i| ballot.contains(i)).map(|i| u.0[i]).min();
    let rejected = (0..u.len()).filter(|&i| !ballot.contains(i)).map(|i| u.0[i]).max();
    match (approved, rejected) {
        (Some(lo), Some(hi)) => lo >= hi,
        _ => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeuristicLabel {
    Truthful,
    TakeXBest(usize),
    RegretMinimization,
    Abstain,
    Other,
}

impl HeuristicLabel {
    /// Short names used in tables: `Truth`, `Take-2`, `Regret`, `Abstain`, `Other`.
    pub fn short_name(self) -> String {
        match self {
            HeuristicLabel::Truthful => "Truth".into(),
            HeuristicLabel::TakeXBest(x) => format!("Take-{x}"),
            HeuristicLabel::RegretMinimization => "Regret".into(),
            HeuristicLabel::Abstain => "Abstain".into(),
            HeuristicLabel::Other => "Other".into(),
        }
    }
}

impl fmt::Display for HeuristicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.short_name())
    }
}

/// Every labelled heuristic ballot for a utility vector, in the order
/// Truth, Take-1.., Regret, Abstain. Undefined take-X ballots are skipped.
pub fn heuristic_ballots(u: &UtilityVector) -> Vec<(HeuristicLabel, Ballot)> {
    let mut out = vec![(HeuristicLabel::Truthful, truthful_ballot(u))];
    for x in 1..=truthful_ballot(u).len() {
        if let Ok(b) = take_x_best(u, x) {
            out.push((HeuristicLabel::TakeXBest(x), b));
        }
    }
    out.push((HeuristicLabel::RegretMinimization, regret_min_ballot(u)));
    out.push((HeuristicLabel::Abstain, Ballot::EMPTY));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// All matching labels, sorted; `[Other]` when nothing matches.
    pub labels: Vec<HeuristicLabel>,
    pub sincere: bool,
}

impl Classification {
    pub fn has(&self, label: HeuristicLabel) -> bool {
        self.labels.contains(&label)
    }
}

pub fn classify_ballot(ballot: Ballot, u: &UtilityVector) -> Classification {
    let mut labels: Vec<HeuristicLabel> = heuristic_ballots(u)
        .into_iter()
        .filter(|(_, b)| *b == ballot)
        .map(|(label, _)| label)
        .collect();
    if labels.is_empty() {
        labels.push(HeuristicLabel::Other);
    }
    labels.sort();
    Classification { labels, sincere: is_sincere(ballot, u) }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub max_eu: Rational,
    /// In ascending bit order.
    pub maximizers: Vec<Ballot>,
}

/// Exhaustive search over all `2^m` ballots.
pub fn best_response(scenario: &Scenario, k: usize, model: &CompletionModel) -> Result<BestResponse> {
    let evaluator = Evaluator::new(scenario, k, model)?;
    let values = all_ballot_values(&evaluator, scenario.m())?;
    Ok(best_of(&values))
}

pub(crate) fn all_ballot_values(evaluator: &Evaluator<'_>, m: usize) -> Result<Vec<(Ballot, Rational)>> {
    Ballot::all(m)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|b| evaluator.expected_utility(b).map(|v| (b, v)))
        .collect()
}

pub(crate) fn best_of(values: &[(Ballot, Rational)]) -> BestResponse {
    let max_eu = values.iter().map(|(_, v)| v).max().expect("at least one ballot").clone();
    let maximizers = values.iter().filter(|(_, v)| *v == max_eu).map(|(b, _)| *b).collect();
    BestResponse { max_eu, maximizers }
}
