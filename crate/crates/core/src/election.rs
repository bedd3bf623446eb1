//! Approval-voting primitives: candidates, ballots, tallies and the
//! k-winner outcome under uniform random tie-breaking.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{model, Error, Result};
use crate::money::Rational;

/// Ballots are bit sets in one `u16`.
pub const MAX_CANDIDATES: usize = 16;

/// Ordered, distinct candidate labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct CandidateSet {
    labels: Vec<String>,
}

impl CandidateSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_CANDIDATES {
            return Err(Error::Validation(format!(
                "candidate count must be in 1..={MAX_CANDIDATES}, got {}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(Error::Validation(format!("invalid candidate label {label:?}")));
            }
            if labels[..i].contains(label) {
                return Err(Error::Validation(format!("duplicate candidate label {label:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// Single-letter labels `A`, `B`, ... for `m` candidates.
    pub fn lettered(m: usize) -> Result<Self> {
        Self::new((0..m).map(|i| ((b'A' + i as u8) as char).to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl TryFrom<Vec<String>> for CandidateSet {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<CandidateSet> for Vec<String> {
    fn from(set: CandidateSet) -> Self {
        set.labels
    }
}

/// An approval ballot: the set of approved candidate indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ballot(u16);

impl Ballot {
    pub const EMPTY: Ballot = Ballot(0);

    pub const fn from_bits(bits: u16) -> Self {
        Ballot(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_CANDIDATES);
        Ballot(((1u32 << m) - 1) as u16)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        indices.into_iter().fold(Ballot::EMPTY, |b, i| b.with(i))
    }

    pub fn with(self, index: usize) -> Self {
        Ballot(self.0 | (1 << index))
    }

    pub fn without(self, index: usize) -> Self {
        Ballot(self.0 & !(1 << index))
    }

    pub fn contains(self, index: usize) -> bool {
        index < MAX_CANDIDATES && self.0 & (1 << index) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Ballot) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when every approved index is below `m`.
    pub fn fits(self, m: usize) -> bool {
        self.is_subset_of(Ballot::full(m))
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_CANDIDATES).filter(move |&i| self.contains(i))
    }

    /// All `2^m` ballots over `m` candidates, in bit order.
    pub fn all(m: usize) -> impl Iterator<Item = Ballot> {
        (0..(1u32 << m)).map(|bits| Ballot(bits as u16))
    }

    /// Parses labels concatenated in candidate order (`"ABE"`); `""` is the empty ballot.
    pub fn parse(candidates: &CandidateSet, text: &str) -> Result<Self> {
        let mut rest = text.trim();
        let mut ballot = Ballot::EMPTY;
        let mut next = 0;
        while !rest.is_empty() {
            let hit = (next..candidates.len()).find(|&j| rest.starts_with(candidates.label(j)));
            match hit {
                Some(j) => {
                    ballot = ballot.with(j);
                    rest = &rest[candidates.label(j).len()..];
                    next = j + 1;
                }
                None => {
                    return Err(Error::Validation(format!(
                        "ballot {text:?} is not a list of candidate labels in candidate order"
                    )))
                }
            }
        }
        Ok(ballot)
    }

    /// Builds a ballot from a list of labels in any order; rejects unknown or repeated labels.
    pub fn from_labels<S: AsRef<str>>(candidates: &CandidateSet, labels: &[S]) -> Result<Self> {
        let mut ballot = Ballot::EMPTY;
        for label in labels {
            let label = label.as_ref();
            let index = candidates
                .index_of(label)
                .ok_or_else(|| Error::Validation(format!("unknown candidate {label:?}")))?;
            if ballot.contains(index) {
                return Err(Error::Validation(format!("candidate {label:?} approved twice")));
            }
            ballot = ballot.with(index);
        }
        Ok(ballot)
    }

    /// Labels concatenated in candidate order, as used in ballot logs.
    pub fn render(self, candidates: &CandidateSet) -> String {
        self.iter().map(|i| candidates.label(i)).collect()
    }

    pub fn labels(self, candidates: &CandidateSet) -> Vec<String> {
        self.iter().map(|i| candidates.label(i).to_owned()).collect()
    }

    /// `[C,E]` style rendering.
    pub fn display(self, candidates: &CandidateSet) -> String {
        format!("[{}]", self.labels(candidates).join(","))
    }
}

/// Per-candidate utility in integer cents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UtilityVector(pub Vec<i64>);

impl UtilityVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// Additive utility of a set of winners.
    pub fn of_set(&self, winners: Ballot) -> i64 {
        winners.iter().map(|i| self.0[i]).sum()
    }
}

impl From<Vec<i64>> for UtilityVector {
    fn from(v: Vec<i64>) -> Self {
        UtilityVector(v)
    }
}

/// Per-candidate approval counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScoreVector(pub Vec<u32>);

impl ScoreVector {
    pub fn zeros(m: usize) -> Self {
        ScoreVector(vec![0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add_ballot(&mut self, ballot: Ballot) {
        for i in ballot.iter() {
            self.0[i] += 1;
        }
    }

    pub fn add(&mut self, increment: &[u32]) {
        for (s, d) in self.0.iter_mut().zip(increment) {
            *s += d;
        }
    }
}

impl From<Vec<u32>> for ScoreVector {
    fn from(v: Vec<u32>) -> Self {
        ScoreVector(v)
    }
}

impl fmt::Display for ScoreVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Adds the focal voter's ballot to the known scores.
pub fn tally(base: &ScoreVector, own: Ballot) -> Result<ScoreVector> {
    if !own.fits(base.len()) {
        return Err(model(format!(
            "ballot approves a candidate outside the {} scored candidates",
            base.len()
        )));
    }
    let mut scores = base.clone();
    scores.add_ballot(own);
    Ok(scores)
}

/// Shape of the k-winner cutoff for one score vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoff {
    /// k-th largest score.
    pub score: u32,
    /// Candidates strictly above the cutoff score (all elected).
    pub above: usize,
    /// Candidates exactly at the cutoff score.
    pub tied: usize,
    /// Seats left for the tied candidates.
    pub open: usize,
}

pub fn cutoff(scores: &[u32], k: usize) -> Result<Cutoff> {
    let m = scores.len();
    if k == 0 || k > m {
        return Err(model(format!("number of winners must be in 1..={m}, got {k}")));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let score = sorted[k - 1];
    let above = scores.iter().filter(|&&s| s > score).count();
    let tied = scores.iter().filter(|&&s| s == score).count();
    Ok(Cutoff { score, above, tied, open: k - above })
}

/// Exact per-candidate probability of being in the winning set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerDistribution {
    k: usize,
    probs: Vec<Rational>,
}

impl WinnerDistribution {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn probability(&self, candidate: usize) -> &Rational {
        &self.probs[candidate]
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().sum()
    }
}

pub fn winner_distribution(scores: &ScoreVector, k: usize) -> Result<WinnerDistribution> {
    let cut = cutoff(scores.as_slice(), k)?;
    let tie_share = Rational::new(BigInt::from(cut.open), BigInt::from(cut.tied));
    let probs = scores
        .as_slice()
        .iter()
        .map(|&s| {
            if s > cut.score {
                Rational::from_integer(1.into())
            } else if s == cut.score {
                tie_share.clone()
            } else {
                Rational::zero()
            }
        })
        .collect();
    Ok(WinnerDistribution { k, probs })
}

/// Expected utility of the election outcome, in cents.
pub fn expected_outcome_utility(dist: &WinnerDistribution, u: &UtilityVector) -> Result<Rational> {
    if dist.probs.len() != u.len() {
        return Err(model(format!(
            "distribution has {} candidates but utility vector has {}",
            dist.probs.len(),
            u.len()
        )));
    }
    Ok(dist
        .probs
        .iter()
        .zip(u.as_slice())
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, &v)| p * BigInt::from(v))
        .sum())
}

/// Outcome utility as an integer fraction `numer / tied`, avoiding big rationals.
///
/// Equal to `expected_outcome_utility(winner_distribution(scores, k), u)`.
pub(crate) fn outcome_value_scaled(scores: &[u32], k: usize, u: &[i64]) -> Result<(i128, i128)> {
    let cut = cutoff(scores, k)?;
    let mut above = 0i128;
    let mut tied = 0i128;
    for (&s, &v) in scores.iter().zip(u) {
        if s > cut.score {
            above += v as i128;
        } else if s == cut.score {
            tied += v as i128;
        }
    }
    let denom = cut.tied as i128;
    Ok((above * denom + cut.open as i128 * tied, denom))
}

/// Draws a concrete winning set, breaking the cutoff tie uniformly at random.
pub fn sample_winning_set(scores: &ScoreVector, k: usize, seed: u64) -> Result<Ballot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_winning_set_with(scores, k, &mut rng)
}

pub fn sample_winning_set_with<R: Rng + ?Sized>(
    scores: &ScoreVector,
    k: usize,
    rng: &mut R,
) -> Result<Ballot> {
    let s = scores.as_slice();
    let cut = cutoff(s, k)?;
    let mut winners = Ballot::from_indices((0..s.len()).filter(|&i| s[i] > cut.score));
    let tied: Vec<usize> = (0..s.len()).filter(|&i| s[i] == cut.score).collect();
    if cut.open == tied.len() {
        winners = tied.iter().fold(winners, |b, &i| b.with(i));
    } else {
        for pick in index::sample(rng, tied.len(), cut.open) {
            winners = winners.with(tied[pick]);
        }
    }
    Ok(winners)
}
