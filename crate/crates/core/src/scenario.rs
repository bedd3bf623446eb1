//! Partial election profiles: candidates, the focal voter's utilities,
//! current approval counts and how many voters are still missing.

use serde::{Deserialize, Serialize};

use crate::election::{CandidateSet, ScoreVector, UtilityVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub id: String,
    pub candidates: CandidateSet,
    /// Cents.
    pub utilities: UtilityVector,
    pub base_scores: ScoreVector,
    pub missing_voters: u32,
    pub description: String,
    /// Data reconstructed rather than read off a published table.
    pub provisional: bool,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        candidates: CandidateSet,
        utilities: Vec<i64>,
        votes: Vec<u32>,
    ) -> Result<Self> {
        let s = Scenario {
            id: id.into(),
            candidates,
            utilities: UtilityVector(utilities),
            base_scores: ScoreVector(votes),
            missing_voters: 0,
            description: String::new(),
            provisional: false,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    /// Same profile with a different number of missing voters.
    pub fn with_missing(&self, n: u32) -> Self {
        Scenario { missing_voters: n, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m();
        if self.id.trim().is_empty() {
            return Err(Error::Validation("scenario id is empty".into()));
        }
        if self.utilities.len() != m {
            return Err(Error::Validation(format!(
                "utilities_cents has {} entries but there are {m} candidates",
                self.utilities.len()
            )));
        }
        if self.base_scores.len() != m {
            return Err(Error::Validation(format!(
                "votes has {} entries but there are {m} candidates",
                self.base_scores.len()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from(self)).expect("scenario serializes")
    }

    /// Parses and validates a scenario document.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        file.into_scenario()
    }
}

/// On-disk scenario document.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    id: String,
    candidates: Vec<String>,
    utilities_cents: Vec<i64>,
    votes: Vec<i64>,
    #[serde(default)]
    missing_voters: i64,
    #[serde(default)]
    description: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    provisional: bool,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            id: s.id.clone(),
            candidates: s.candidates.labels().to_vec(),
            utilities_cents: s.utilities.0.clone(),
            votes: s.base_scores.0.iter().map(|&v| v as i64).collect(),
            missing_voters: s.missing_voters as i64,
            description: s.description.clone(),
            provisional: s.provisional,
        }
    }
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario> {
        let candidates = CandidateSet::new(self.candidates)?;
        let votes = self
            .votes
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                u32::try_from(v)
                    .map_err(|_| Error::Validation(format!("votes[{i}] = {v} is not a nonnegative count")))
            })
            .collect::<Result<Vec<_>>>()?;
        let missing_voters = u32::try_from(self.missing_voters).map_err(|_| {
            Error::Validation(format!("missing_voters = {} is not a nonnegative count", self.missing_voters))
        })?;
        let s = Scenario {
            id: self.id,
            candidates,
            utilities: UtilityVector(self.utilities_cents),
            base_scores: ScoreVector(votes),
            missing_voters,
            description: self.description,
            provisional: self.provisional,
        };
        s.validate()?;
        Ok(s)
    }
}

fn make(id: &str, utilities: [i64; 5], votes: [u32; 5], description: &str, provisional: bool) -> Scenario {
    Scenario {
        id: id.to_owned(),
        candidates: CandidateSet::lettered(5).expect("five letters"),
        utilities: UtilityVector(utilities.to_vec()),
        base_scores: ScoreVector(votes.to_vec()),
        missing_voters: 0,
        description: description.to_owned(),
        provisional,
    }
}

/// The six scenarios of the study, in presentation order.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        make(
            "1a-reconstructed",
            [5, 10, 1, 0, 25],
            [3, 3, 3, 4, 3],
            "Candidate with trivial utility, not leading. Votes and utilities reconstructed from the \
             heuristic ballot lists (E>B>A>C, D neutral and leading); provisional.",
            true,
        ),
        make("1b", [5, 10, 1, 25, 0], [3, 3, 4, 3, 3], "Leader with trivial utility.", false),
        make(
            "2a",
            [5, 10, 0, 0, 25],
            [1, 1, 4, 4, 1],
            "Neutral candidates dominate the preferred ones for one and two winners.",
            false,
        ),
        make(
            "2b",
            [10, 0, 0, 0, 25],
            [1, 4, 4, 4, 1],
            "Neutral candidates dominate the preferred ones for three winners.",
            false,
        ),
        make("3", [5, 10, 0, -100, 25], [3, 3, 4, 4, 4], "Disliked candidate among the leaders.", false),
        make("4", [10, 0, 15, 20, 0], [3, 4, 3, 3, 3], "Neutral leader.", false),
    ]
}

/// Looks up a built-in scenario by id; `1a` is accepted for the reconstructed 1a.
pub fn builtin(id: &str) -> Result<Scenario> {
    let id = if id == "1a" { "1a-reconstructed" } else { id };
    builtin_scenarios()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Data(format!("unknown scenario {id:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_constants() {
        let table: Vec<(&str, [i64; 5], [u32; 5])> = vec![
            ("1a-reconstructed", [5, 10, 1, 0, 25], [3, 3, 3, 4, 3]),
            ("1b", [5, 10, 1, 25, 0], [3, 3, 4, 3, 3]),
            ("2a", [5, 10, 0, 0, 25], [1, 1, 4, 4, 1]),
            ("2b", [10, 0, 0, 0, 25], [1, 4, 4, 4, 1]),
            ("3", [5, 10, 0, -100, 25], [3, 3, 4, 4, 4]),
            ("4", [10, 0, 15, 20, 0], [3, 4, 3, 3, 3]),
        ];
        let all = builtin_scenarios();
        assert_eq!(all.len(), table.len());
        for (s, (id, u, v)) in all.iter().zip(table) {
            assert_eq!(s.id, id);
            assert_eq!(s.candidates.labels(), ["A", "B", "C", "D", "E"]);
            assert_eq!(s.utilities.0, u);
            assert_eq!(s.base_scores.0, v);
            assert_eq!(s.missing_voters, 0);
            assert_eq!(s.provisional, id == "1a-reconstructed");
        }
    }

    #[test]
    fn builtins_round_trip() {
        for s in builtin_scenarios() {
            assert_eq!(Scenario::parse(&s.to_json()).unwrap(), s);
            let s3 = s.with_missing(3);
            assert_eq!(Scenario::parse(&s3.to_json()).unwrap(), s3);
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let text = r#"{"id":"x","candidates":["A","B","C","D","E"],"utilities_cents":[1,2,3,4],"votes":[0,0,0,0,0]}"#;
        let err = Scenario::parse(text).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("utilities_cents")), "{err}");
    }

    #[test]
    fn missing_key_defaults_to_zero() {
        let text = r#"{"id":"x","candidates":["A","B"],"utilities_cents":[1,2],"votes":[0,3]}"#;
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.missing_voters, 0);
        assert_eq!(s.description, "");
    }

    #[test]
    fn rejects_bad_documents() {
        let negative = r#"{"id":"x","candidates":["A","B"],"utilities_cents":[1,2],"votes":[0,-3]}"#;
        assert!(matches!(Scenario::parse(negative), Err(Error::Validation(_))));
        let dup = r#"{"id":"x","candidates":["A","A"],"utilities_cents":[1,2],"votes":[0,3]}"#;
        assert!(matches!(Scenario::parse(dup), Err(Error::Validation(_))));
        let typo = r#"{"id":"x","candidates":["A","B"],"utilities_cents":[1,2],"vote":[0,3]}"#;
        assert!(matches!(Scenario::parse(typo), Err(Error::Parse(_))));
        let broken = "{\n  \"id\": \"x\",\n  oops\n}";
        let err = Scenario::parse(broken).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn lookup() {
        assert_eq!(builtin("1a").unwrap().id, "1a-reconstructed");
        assert!(matches!(builtin("9"), Err(Error::Data(_))));
    }
}
