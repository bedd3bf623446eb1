//! Expected utility of a focal ballot when `n` voters have not voted yet.
//!
//! Missing voters are i.i.d. draws from a [`CompletionModel`]. Three routes
//! compute the same expectation:
//!
//! * [`expected_utility_exact`] sums over the joint law of score increments
//!   ([`increment_distribution`]), which is a product of binomials for the
//!   independent-approval models and an n-fold convolution otherwise;
//! * [`expected_utility_bruteforce`] enumerates every ordered tuple of missing
//!   ballots with integer weights and is the reference oracle;
//! * [`expected_utility_mc`] samples completions and tie-breaks.
//!
//! All utilities are in cents.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::election::{
    expected_outcome_utility, outcome_value_scaled, sample_winning_set_with, tally,
    winner_distribution, Ballot, CandidateSet, ScoreVector, MAX_CANDIDATES,
};
use crate::error::{model, Error, Result};
use crate::money::{parse_rational, Rational};
use crate::scenario::Scenario;

/// Largest increment support the exact route will materialize.
pub const MAX_EXACT_SUPPORT: usize = 4_000_000;
/// Largest number of ordered missing-ballot tuples the oracle will enumerate.
pub const MAX_BRUTE_FORCE_TUPLES: u128 = 1 << 26;

/// Distribution of one missing voter's ballot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum CompletionModel {
    /// Uniform over all `2^m` ballots.
    #[default]
    UniformSubsets,
    /// Each candidate approved independently with this probability.
    IndependentApproval(Rational),
    /// Exactly one uniformly chosen candidate, or (optionally) an abstention with equal weight.
    SingleVote { allow_abstain: bool },
    /// Explicit ballot law; weights sum to one.
    Weighted(Vec<(Ballot, Rational)>),
}

impl CompletionModel {
    pub fn validate(&self, m: usize) -> Result<()> {
        if m == 0 || m > MAX_CANDIDATES {
            return Err(model(format!("candidate count {m} out of range")));
        }
        match self {
            CompletionModel::UniformSubsets | CompletionModel::SingleVote { .. } => Ok(()),
            CompletionModel::IndependentApproval(p) => {
                if p.is_negative() || *p > Rational::one() {
                    Err(model(format!("approval probability {p} outside [0,1]")))
                } else {
                    Ok(())
                }
            }
            CompletionModel::Weighted(law) => {
                if law.is_empty() {
                    return Err(model("weighted model has no ballots"));
                }
                let mut total = Rational::zero();
                for (i, (ballot, w)) in law.iter().enumerate() {
                    if w.is_negative() {
                        return Err(model(format!("negative weight {w}")));
                    }
                    if !ballot.fits(m) {
                        return Err(model(format!(
                            "weighted ballot {:#x} names candidates beyond {m}",
                            ballot.bits()
                        )));
                    }
                    if law[..i].iter().any(|(b, _)| b == ballot) {
                        return Err(model("weighted model lists a ballot twice"));
                    }
                    total += w;
                }
                if !total.is_one() {
                    return Err(model(format!("weights sum to {total}, expected 1")));
                }
                Ok(())
            }
        }
    }

    /// Finite-support law of a single missing ballot, zero-probability ballots dropped.
    pub fn single_voter_law(&self, m: usize) -> Result<Vec<(Ballot, Rational)>> {
        self.validate(m)?;
        let law = match self {
            CompletionModel::UniformSubsets => {
                let p = Rational::new(BigInt::one(), BigInt::one() << m);
                Ballot::all(m).map(|b| (b, p.clone())).collect()
            }
            CompletionModel::IndependentApproval(p) => {
                let q = Rational::one() - p;
                Ballot::all(m)
                    .map(|b| {
                        let j = b.len();
                        (b, num_traits::pow(p.clone(), j) * num_traits::pow(q.clone(), m - j))
                    })
                    .collect()
            }
            CompletionModel::SingleVote { allow_abstain } => {
                let outcomes = m + usize::from(*allow_abstain);
                let p = Rational::new(BigInt::one(), BigInt::from(outcomes));
                let mut law: Vec<_> = (0..m).map(|i| (Ballot::from_indices([i]), p.clone())).collect();
                if *allow_abstain {
                    law.push((Ballot::EMPTY, p));
                }
                law
            }
            CompletionModel::Weighted(law) => law.clone(),
        };
        Ok(law.into_iter().filter(|(_, p)| !p.is_zero()).collect())
    }

    /// The single-voter law scaled to integers: `P(b) = weight / denominator`.
    pub fn integer_weights(&self, m: usize) -> Result<(Vec<(Ballot, i128)>, i128)> {
        let law = self.single_voter_law(m)?;
        let denom = law.iter().fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
        let overflow = || Error::Resource("ballot weights exceed 128-bit integers".into());
        let weights = law
            .iter()
            .map(|(b, p)| {
                let w = p.numer() * (&denom / p.denom());
                w.to_i128().map(|w| (*b, w)).ok_or_else(overflow)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((weights, denom.to_i128().ok_or_else(overflow)?))
    }

    /// Parses a model spec: `uniform-subsets`, `independent:1/4`, `single-vote`,
    /// `single-vote-abstain`, or `weighted:ABE=1/2;E=1/4;=1/4` (ballots in `candidates` labels).
    pub fn parse_with(spec: &str, candidates: &CandidateSet) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (spec, None),
        };
        let bad = |why: &str| Error::Parse(format!("completion model {spec:?}: {why}"));
        match (name, arg) {
            ("uniform-subsets" | "uniform", None) => Ok(CompletionModel::UniformSubsets),
            ("independent" | "independent-approval", Some(p)) => {
                let p = parse_rational(p).ok_or_else(|| bad("probability is not a number"))?;
                Ok(CompletionModel::IndependentApproval(p))
            }
            ("single-vote", None) => Ok(CompletionModel::SingleVote { allow_abstain: false }),
            ("single-vote-abstain", None) => Ok(CompletionModel::SingleVote { allow_abstain: true }),
            ("weighted", Some(list)) => {
                let mut law = Vec::new();
                for item in list.split(';').filter(|s| !s.trim().is_empty()) {
                    let (ballot, w) = item.split_once('=').ok_or_else(|| bad("expected BALLOT=WEIGHT"))?;
                    let ballot = Ballot::parse(candidates, ballot)?;
                    let w = parse_rational(w).ok_or_else(|| bad("weight is not a number"))?;
                    law.push((ballot, w));
                }
                Ok(CompletionModel::Weighted(law))
            }
            _ => Err(bad("unknown model")),
        }
    }

    pub fn describe(&self, candidates: &CandidateSet) -> String {
        match self {
            CompletionModel::UniformSubsets => "uniform-subsets".into(),
            CompletionModel::IndependentApproval(p) => format!("independent:{p}"),
            CompletionModel::SingleVote { allow_abstain: false } => "single-vote".into(),
            CompletionModel::SingleVote { allow_abstain: true } => "single-vote-abstain".into(),
            CompletionModel::Weighted(law) => {
                let items: Vec<String> =
                    law.iter().map(|(b, w)| format!("{}={w}", b.render(candidates))).collect();
                format!("weighted:{}", items.join(";"))
            }
        }
    }

    pub fn sampler(&self, m: usize) -> Result<BallotSampler> {
        self.validate(m)?;
        let kind = match self {
            CompletionModel::UniformSubsets => SamplerKind::Uniform,
            CompletionModel::IndependentApproval(p) => match (p.numer().to_u64(), p.denom().to_u64()) {
                (Some(numer), Some(denom)) => SamplerKind::Independent { numer, denom },
                _ => return Err(model("approval probability too finely divided to sample")),
            },
            _ => {
                let (weights, denom) = self.integer_weights(m)?;
                let mut acc = 0u128;
                let cumulative = weights
                    .into_iter()
                    .map(|(b, w)| {
                        acc += w as u128;
                        (acc, b)
                    })
                    .collect();
                SamplerKind::Table { cumulative, total: denom as u128 }
            }
        };
        Ok(BallotSampler { m, kind })
    }
}

/// Spec strings with single-letter candidate labels.
impl FromStr for CompletionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CompletionModel::parse_with(s, &CandidateSet::lettered(MAX_CANDIDATES)?)
    }
}

impl fmt::Display for CompletionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = CandidateSet::lettered(MAX_CANDIDATES).expect("16 letters");
        f.write_str(&self.describe(&letters))
    }
}

/// Draws missing ballots for one completion model.
#[derive(Debug, Clone)]
pub struct BallotSampler {
    m: usize,
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Uniform,
    Independent { numer: u64, denom: u64 },
    Table { cumulative: Vec<(u128, Ballot)>, total: u128 },
}

impl BallotSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Ballot {
        match &self.kind {
            SamplerKind::Uniform => Ballot::from_bits(rng.random::<u16>() & Ballot::full(self.m).bits()),
            SamplerKind::Independent { numer, denom } => Ballot::from_indices(
                (0..self.m).filter(|_| rng.random_range(0..*denom) < *numer),
            ),
            SamplerKind::Table { cumulative, total } => {
                let draw = rng.random_range(0..*total);
                let at = cumulative.partition_point(|(upper, _)| *upper <= draw);
                cumulative[at].1
            }
        }
    }
}

/// Joint law of the approvals added by `n` missing voters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementDistribution {
    m: usize,
    n: u32,
    entries: BTreeMap<Vec<u32>, Rational>,
}

impl IncrementDistribution {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self, increment: &[u32]) -> Rational {
        self.entries.get(increment).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }
}

pub fn increment_distribution(model: &CompletionModel, m: usize, n: u32) -> Result<IncrementDistribution> {
    model.validate(m)?;
    let mut entries = BTreeMap::new();
    if n == 0 {
        entries.insert(vec![0; m], Rational::one());
        return Ok(IncrementDistribution { m, n, entries });
    }
    match model {
        CompletionModel::UniformSubsets => {
            binomial_product(&Rational::new(1.into(), 2.into()), m, n, &mut entries)?
        }
        CompletionModel::IndependentApproval(p) => binomial_product(p, m, n, &mut entries)?,
        _ => convolve(&model.single_voter_law(m)?, m, n, &mut entries)?,
    }
    Ok(IncrementDistribution { m, n, entries })
}

fn support_bound(m: usize, n: u32) -> Result<()> {
    let bound = (n as u128 + 1).checked_pow(m as u32);
    match bound {
        Some(b) if b <= MAX_EXACT_SUPPORT as u128 => Ok(()),
        _ => Err(Error::Resource(format!(
            "increment support ({n}+1)^{m} exceeds {MAX_EXACT_SUPPORT} entries"
        ))),
    }
}

/// Approvals of different candidates are independent, so the joint law is
/// the product of per-candidate Binomial(n, p) laws.
fn binomial_product(p: &Rational, m: usize, n: u32, out: &mut BTreeMap<Vec<u32>, Rational>) -> Result<()> {
    support_bound(m, n)?;
    let q = Rational::one() - p;
    let pmf: Vec<(u32, Rational)> = (0..=n)
        .map(|j| {
            let coeff = num_integer::binomial(BigInt::from(n), BigInt::from(j));
            let prob = Rational::from_integer(coeff)
                * num_traits::pow(p.clone(), j as usize)
                * num_traits::pow(q.clone(), (n - j) as usize);
            (j, prob)
        })
        .filter(|(_, prob)| !prob.is_zero())
        .collect();

    let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::with_capacity(m), Rational::one())];
    for _ in 0..m {
        partial = partial
            .into_iter()
            .flat_map(|(prefix, prob)| {
                pmf.iter().map(move |(j, pj)| {
                    let mut next = prefix.clone();
                    next.push(*j);
                    (next, &prob * pj)
                })
            })
            .collect();
    }
    out.extend(partial);
    Ok(())
}

fn convolve(
    law: &[(Ballot, Rational)],
    m: usize,
    n: u32,
    out: &mut BTreeMap<Vec<u32>, Rational>,
) -> Result<()> {
    let mut current: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    current.insert(vec![0; m], Rational::one());
    for _ in 0..n {
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (inc, p) in &current {
            for (ballot, q) in law {
                let mut v = inc.clone();
                for i in ballot.iter() {
                    v[i] += 1;
                }
                *next.entry(v).or_insert_with(Rational::zero) += p * q;
            }
        }
        if next.len() > MAX_EXACT_SUPPORT {
            return Err(Error::Resource(format!(
                "increment support exceeds {MAX_EXACT_SUPPORT} entries"
            )));
        }
        current = next;
    }
    out.extend(current);
    Ok(())
}

fn check_query(scenario: &Scenario, ballot: Ballot, k: usize) -> Result<()> {
    let m = scenario.m();
    if !ballot.fits(m) {
        return Err(model(format!("ballot names candidates beyond the {m} in the scenario")));
    }
    if k == 0 || k > m {
        return Err(model(format!("number of winners must be in 1..={m}, got {k}")));
    }
    Ok(())
}

/// Evaluates many ballots against one (scenario, k, model) with a shared increment law.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    k: usize,
    increments: IncrementDistribution,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, k: usize, model: &CompletionModel) -> Result<Self> {
        check_query(scenario, Ballot::EMPTY, k)?;
        let increments = increment_distribution(model, scenario.m(), scenario.missing_voters)?;
        Ok(Self { scenario, k, increments })
    }

    pub fn increments(&self) -> &IncrementDistribution {
        &self.increments
    }

    pub fn expected_utility(&self, ballot: Ballot) -> Result<Rational> {
        check_query(self.scenario, ballot, self.k)?;
        let own = tally(&self.scenario.base_scores, ballot)?;
        let mut total = Rational::zero();
        for (inc, p) in self.increments.iter() {
            let mut scores = own.clone();
            scores.add(inc);
            let dist = winner_distribution(&scores, self.k)?;
            total += p * expected_outcome_utility(&dist, &self.scenario.utilities)?;
        }
        Ok(total)
    }
}

/// Exact expected utility (cents) of `ballot`, with `scenario.missing_voters` voters still to come.
pub fn expected_utility_exact(
    scenario: &Scenario,
    ballot: Ballot,
    k: usize,
    model: &CompletionModel,
) -> Result<Rational> {
    check_query(scenario, ballot, k)?;
    Evaluator::new(scenario, k, model)?.expected_utility(ballot)
}

/// Reference value by enumerating every ordered tuple of missing ballots.
pub fn expected_utility_bruteforce(
    scenario: &Scenario,
    ballot: Ballot,
    k: usize,
    model: &CompletionModel,
) -> Result<Rational> {
    check_query(scenario, ballot, k)?;
    let m = scenario.m();
    let n = scenario.missing_voters;
    let (weights, denom) = model.integer_weights(m)?;
    let tuples = (weights.len() as u128).checked_pow(n);
    if !matches!(tuples, Some(t) if t <= MAX_BRUTE_FORCE_TUPLES) {
        return Err(Error::Resource(format!(
            "{}^{n} missing-ballot tuples exceed the enumeration limit {MAX_BRUTE_FORCE_TUPLES}",
            weights.len()
        )));
    }
    let overflow = || Error::Resource("brute-force accumulator overflowed 128 bits".into());
    // Every outcome value has a denominator dividing lcm(1..=m).
    let lcm = (1..=m as i128).fold(1i128, |acc, d| acc.lcm(&d));
    let own = tally(&scenario.base_scores, ballot)?;
    let utilities = scenario.utilities.as_slice();

    let walk = |first: Option<&(Ballot, i128)>| -> Result<i128> {
        let mut scores = own.0.clone();
        let mut weight = 1i128;
        if let Some((b, w)) = first {
            for i in b.iter() {
                scores[i] += 1;
            }
            weight = *w;
        }
        let depth = if first.is_some() { n - 1 } else { 0 };
        let mut acc = 0i128;
        enumerate(&weights, depth, &mut scores, weight, k, utilities, lcm, &mut acc).ok_or_else(overflow)?;
        Ok(acc)
    };

    let sum = if n == 0 {
        walk(None)?
    } else {
        let parts: Vec<i128> = weights.par_iter().map(|w| walk(Some(w))).collect::<Result<_>>()?;
        parts.into_iter().try_fold(0i128, |a, b| a.checked_add(b)).ok_or_else(overflow)?
    };
    let scale = denom.checked_pow(n).and_then(|d| d.checked_mul(lcm)).ok_or_else(overflow)?;
    Ok(Rational::new(BigInt::from(sum), BigInt::from(scale)))
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    weights: &[(Ballot, i128)],
    remaining: u32,
    scores: &mut [u32],
    weight: i128,
    k: usize,
    utilities: &[i64],
    lcm: i128,
    acc: &mut i128,
) -> Option<()> {
    if remaining == 0 {
        let (numer, tied) = outcome_value_scaled(scores, k, utilities).ok()?;
        let term = weight.checked_mul(numer)?.checked_mul(lcm / tied)?;
        *acc = acc.checked_add(term)?;
        return Some(());
    }
    for (ballot, w) in weights {
        for i in ballot.iter() {
            scores[i] += 1;
        }
        let result = weight
            .checked_mul(*w)
            .and_then(|next| enumerate(weights, remaining - 1, scores, next, k, utilities, lcm, acc));
        for i in ballot.iter() {
            scores[i] -= 1;
        }
        result?;
    }
    Some(())
}

/// Monte Carlo estimate in cents with the standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Samples `samples` completions and tie-breaks from one seeded ChaCha8 stream.
///
/// With a single sample the standard error is reported as infinite.
pub fn expected_utility_mc(
    scenario: &Scenario,
    ballot: Ballot,
    k: usize,
    model: &CompletionModel,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_query(scenario, ballot, k)?;
    if samples == 0 {
        return Err(Error::Model("sample count must be positive".into()));
    }
    let sampler = model.sampler(scenario.m())?;
    let own = tally(&scenario.base_scores, ballot)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut scores = ScoreVector::zeros(scenario.m());
    for i in 0..samples {
        scores.0.copy_from_slice(&own.0);
        for _ in 0..scenario.missing_voters {
            scores.add_ballot(sampler.sample(&mut rng));
        }
        let winners = sample_winning_set_with(&scores, k, &mut rng)?;
        let value = scenario.utilities.of_set(winners) as f64;
        let delta = value - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (value - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(McEstimate { estimate: mean, std_error, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money::{integer, rational};
    use crate::scenario::builtin;

    fn ballot(s: &Scenario, text: &str) -> Ballot {
        Ballot::parse(&s.candidates, text).unwrap()
    }

    #[test]
    fn no_missing_voters_is_a_point_mass() {
        for model in [
            CompletionModel::UniformSubsets,
            CompletionModel::SingleVote { allow_abstain: true },
        ] {
            let d = increment_distribution(&model, 5, 0).unwrap();
            assert_eq!(d.len(), 1);
            assert_eq!(d.probability(&[0; 5]), integer(1));
        }
    }

    #[test]
    fn one_candidate_two_voters_is_binomial() {
        let d = increment_distribution(&CompletionModel::UniformSubsets, 1, 2).unwrap();
        assert_eq!(d.probability(&[0]), rational(1, 4));
        assert_eq!(d.probability(&[1]), rational(1, 2));
        assert_eq!(d.probability(&[2]), rational(1, 4));
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn uniform_increments_match_tuple_enumeration() {
        // Oracle: count all 32^3 ordered ballot triples by their summed increment.
        let mut counts: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for a in 0u16..32 {
            for b in 0u16..32 {
                for c in 0u16..32 {
                    let v: Vec<u32> = (0..5)
                        .map(|i| [a, b, c].iter().map(|x| ((x >> i) & 1) as u32).sum())
                        .collect();
                    *counts.entry(v).or_default() += 1;
                }
            }
        }
        let d = increment_distribution(&CompletionModel::UniformSubsets, 5, 3).unwrap();
        assert_eq!(d.len(), counts.len());
        for (v, c) in counts {
            assert_eq!(d.probability(&v), rational(c, 32 * 32 * 32));
        }
        assert_eq!(d.total(), integer(1));
    }

    #[test]
    fn convolved_models_sum_to_one() {
        let law = vec![
            (Ballot::from_indices([0, 1]), rational(1, 2)),
            (Ballot::from_indices([4]), rational(1, 3)),
            (Ballot::EMPTY, rational(1, 6)),
        ];
        for model in [
            CompletionModel::SingleVote { allow_abstain: false },
            CompletionModel::SingleVote { allow_abstain: true },
            CompletionModel::Weighted(law),
            CompletionModel::IndependentApproval(rational(1, 4)),
        ] {
            let d = increment_distribution(&model, 5, 3).unwrap();
            assert_eq!(d.total(), integer(1), "{model}");
        }
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(CompletionModel::IndependentApproval(rational(3, 2)).validate(5).is_err());
        assert!(CompletionModel::IndependentApproval(rational(-1, 2)).validate(5).is_err());
        let short = CompletionModel::Weighted(vec![(Ballot::EMPTY, rational(1, 2))]);
        assert!(matches!(increment_distribution(&short, 5, 1), Err(Error::Model(_))));
        let wide = CompletionModel::Weighted(vec![(Ballot::from_indices([6]), integer(1))]);
        assert!(wide.validate(5).is_err());
        let negative = CompletionModel::Weighted(vec![
            (Ballot::EMPTY, rational(3, 2)),
            (Ballot::from_indices([0]), rational(-1, 2)),
        ]);
        assert!(negative.validate(5).is_err());
    }

    #[test]
    fn exact_examples() {
        let s1b = builtin("1b").unwrap();
        let d = ballot(&s1b, "D");
        assert_eq!(expected_utility_exact(&s1b, d, 1, &CompletionModel::default()).unwrap(), integer(13));

        let s3 = builtin("3").unwrap();
        let regret = ballot(&s3, "ABCE");
        assert_eq!(
            expected_utility_exact(&s3, regret, 3, &CompletionModel::default()).unwrap(),
            rational(-10, 3)
        );

        let s2a = builtin("2a").unwrap();
        for b in Ballot::all(5) {
            assert_eq!(expected_utility_exact(&s2a, b, 1, &CompletionModel::default()).unwrap(), integer(0));
        }
    }

    #[test]
    fn hand_enumerated_one_missing_voter() {
        let s3 = builtin("3").unwrap().with_missing(1);
        let model = CompletionModel::UniformSubsets;
        // 3.4675/32 dollars = 346.75/32 cents = 1387/128 cents.
        let truthful = ballot(&s3, "ABE");
        assert_eq!(expected_utility_exact(&s3, truthful, 1, &model).unwrap(), rational(1387, 128));
        assert_eq!(expected_utility_bruteforce(&s3, truthful, 1, &model).unwrap(), rational(1387, 128));
        // 3/32 dollars = 75/8 cents.
        let take1 = ballot(&s3, "E");
        assert_eq!(expected_utility_exact(&s3, take1, 1, &model).unwrap(), rational(75, 8));
        assert_eq!(expected_utility_bruteforce(&s3, take1, 1, &model).unwrap(), rational(75, 8));
    }

    #[test]
    fn bruteforce_degenerates_without_missing_voters() {
        let s = builtin("4").unwrap();
        for b in Ballot::all(5) {
            for k in 1..=3 {
                let direct = expected_outcome_utility(
                    &winner_distribution(&tally(&s.base_scores, b).unwrap(), k).unwrap(),
                    &s.utilities,
                )
                .unwrap();
                assert_eq!(expected_utility_bruteforce(&s, b, k, &CompletionModel::default()).unwrap(), direct);
            }
        }
    }

    #[test]
    fn bruteforce_refuses_infeasible_sizes() {
        let s = builtin("3").unwrap().with_missing(6);
        let err = expected_utility_bruteforce(&s, Ballot::EMPTY, 1, &CompletionModel::default());
        assert!(matches!(err, Err(Error::Resource(_))));
    }

    #[test]
    fn exact_refuses_huge_supports() {
        assert!(matches!(
            increment_distribution(&CompletionModel::UniformSubsets, 16, 20),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn independent_half_equals_uniform() {
        let half = CompletionModel::IndependentApproval(rational(1, 2));
        for n in 0..=2 {
            assert_eq!(
                increment_distribution(&half, 5, n).unwrap(),
                increment_distribution(&CompletionModel::UniformSubsets, 5, n).unwrap()
            );
        }
    }

    #[test]
    fn mc_is_deterministic_and_calibrated() {
        let s1b = builtin("1b").unwrap();
        let d = ballot(&s1b, "D");
        let a = expected_utility_mc(&s1b, d, 1, &CompletionModel::default(), 1_000, 11).unwrap();
        let b = expected_utility_mc(&s1b, d, 1, &CompletionModel::default(), 1_000, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - 13.0).abs() <= 4.0 * a.std_error, "{a:?}");
    }

    #[test]
    fn mc_zero_utilities_is_exactly_zero() {
        let mut s = builtin("3").unwrap().with_missing(2);
        s.utilities.0 = vec![0; 5];
        for seed in 0..5 {
            let e = expected_utility_mc(&s, Ballot::EMPTY, 2, &CompletionModel::default(), 100, seed).unwrap();
            assert_eq!(e.estimate, 0.0);
        }
        assert!(expected_utility_mc(&s, Ballot::EMPTY, 2, &CompletionModel::default(), 0, 1).is_err());
    }

    #[test]
    fn samplers_follow_their_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let single = CompletionModel::SingleVote { allow_abstain: false }.sampler(5).unwrap();
        for _ in 0..200 {
            assert_eq!(single.sample(&mut rng).len(), 1);
        }
        let law = CompletionModel::Weighted(vec![(Ballot::from_indices([1, 3]), integer(1))]);
        let weighted = law.sampler(5).unwrap();
        assert_eq!(weighted.sample(&mut rng), Ballot::from_indices([1, 3]));
        let never = CompletionModel::IndependentApproval(integer(0)).sampler(5).unwrap();
        assert_eq!(never.sample(&mut rng), Ballot::EMPTY);
    }

    #[test]
    fn model_specs_round_trip() {
        let c = CandidateSet::lettered(5).unwrap();
        for spec in ["uniform-subsets", "independent:1/4", "single-vote", "single-vote-abstain", "weighted:ABE=1/2;E=1/4;=1/4"] {
            let m = CompletionModel::parse_with(spec, &c).unwrap();
            assert_eq!(m.describe(&c), spec);
        }
        assert!(CompletionModel::parse_with("gaussian", &c).is_err());
        assert_eq!("independent:0.25".parse::<CompletionModel>().unwrap(), CompletionModel::IndependentApproval(rational(1, 4)));
    }
}
