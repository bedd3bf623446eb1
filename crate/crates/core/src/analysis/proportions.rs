//! Strategy proportions per (scenario, k, n) condition.
//!
//! Ballots matching several heuristics are counted once, under the first
//! matching category of Truthful > Regret > Take-X > Abstain > Other.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::analysis::chi_square::ContingencyTable;
use crate::analysis::BallotRecord;
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::strategy::{classify_ballot, Classification, HeuristicLabel};

pub fn category_precedence(label: HeuristicLabel) -> (u8, usize) {
    match label {
        HeuristicLabel::Truthful => (0, 0),
        HeuristicLabel::RegretMinimization => (1, 0),
        HeuristicLabel::TakeXBest(x) => (2, x),
        HeuristicLabel::Abstain => (3, 0),
        HeuristicLabel::Other => (4, 0),
    }
}

pub fn primary_category(c: &Classification) -> HeuristicLabel {
    c.labels
        .iter()
        .copied()
        .min_by_key(|&l| category_precedence(l))
        .unwrap_or(HeuristicLabel::Other)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionSummary {
    pub scenario_id: String,
    pub k: usize,
    pub n: u32,
    pub total: usize,
    pub counts: BTreeMap<HeuristicLabel, usize>,
}

impl ConditionSummary {
    pub fn count(&self, label: HeuristicLabel) -> usize {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    pub fn percent(&self, label: HeuristicLabel) -> f64 {
        100.0 * self.count(label) as f64 / self.total as f64
    }

    /// Categories in precedence order.
    pub fn categories(&self) -> Vec<HeuristicLabel> {
        let mut labels: Vec<_> = self.counts.keys().copied().collect();
        labels.sort_by_key(|&l| category_precedence(l));
        labels
    }
}

pub fn strategy_proportions(records: &[BallotRecord], scenarios: &[Scenario]) -> Result<Vec<ConditionSummary>> {
    let mut by_condition: BTreeMap<(String, usize, u32), BTreeMap<HeuristicLabel, usize>> = BTreeMap::new();
    for r in records {
        let scenario = scenarios
            .iter()
            .find(|s| s.id == r.scenario_id)
            .ok_or_else(|| Error::Data(format!("unknown scenario {:?}", r.scenario_id)))?;
        let category = primary_category(&classify_ballot(r.ballot, &scenario.utilities));
        *by_condition
            .entry((r.scenario_id.clone(), r.k, r.n))
            .or_default()
            .entry(category)
            .or_default() += 1;
    }
    Ok(by_condition
        .into_iter()
        .map(|((scenario_id, k, n), counts)| ConditionSummary {
            scenario_id,
            k,
            n,
            total: counts.values().sum(),
            counts,
        })
        .collect())
}

/// Rows are conditions, columns the categories observed in any of them.
pub fn contingency_from_summaries(summaries: &[ConditionSummary]) -> Result<ContingencyTable> {
    let mut columns: Vec<HeuristicLabel> = summaries.iter().flat_map(|s| s.counts.keys().copied()).collect();
    columns.sort_by_key(|&l| category_precedence(l));
    columns.dedup();
    let rows = summaries
        .iter()
        .map(|s| columns.iter().map(|&c| s.count(c) as u64).collect())
        .collect();
    ContingencyTable::new(rows)
}

pub fn render_proportions_table(summaries: &[ConditionSummary]) -> String {
    let mut out = String::from(
        "Strategy proportions (one category per ballot; precedence Truth > Regret > Take-X > Abstain > Other)\n",
    );
    for s in summaries {
        let parts: Vec<String> = s
            .categories()
            .into_iter()
            .map(|c| format!("{} {:.1}% ({})", c.short_name(), s.percent(c), s.count(c)))
            .collect();
        let _ = writeln!(out, "scenario {} k={} n={} [{} ballots]: {}", s.scenario_id, s.k, s.n, s.total, parts.join(", "));
    }
    out
}

pub fn render_proportions_csv(summaries: &[ConditionSummary]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario_id", "k", "n", "category", "count", "percent"]).expect("in-memory write");
    for s in summaries {
        for c in s.categories() {
            w.write_record([
                s.scenario_id.clone(),
                s.k.to_string(),
                s.n.to_string(),
                c.short_name(),
                s.count(c).to_string(),
                format!("{:.1}", s.percent(c)),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::Ballot;
    use crate::scenario::{builtin, builtin_scenarios};
    use crate::strategy::truthful_ballot;

    fn record(scenario: &str, k: usize, n: u32, ballot: &str) -> BallotRecord {
        let s = builtin(scenario).unwrap();
        BallotRecord {
            session_id: "s".into(),
            scenario_id: s.id.clone(),
            k,
            n,
            ballot: Ballot::parse(&s.candidates, ballot).unwrap(),
        }
    }

    #[test]
    fn all_truthful() {
        let s = builtin("1b").unwrap();
        let truthful = truthful_ballot(&s.utilities).render(&s.candidates);
        let records: Vec<_> = (0..3).map(|_| record("1b", 1, 0, &truthful)).collect();
        let out = strategy_proportions(&records, &builtin_scenarios()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].percent(HeuristicLabel::Truthful), 100.0);
    }

    #[test]
    fn mixed_disliked_candidate_condition() {
        let records = vec![record("3", 1, 0, "E"), record("3", 1, 0, "E"), record("3", 1, 0, "ABE"), record("3", 1, 0, "")];
        let out = strategy_proportions(&records, &builtin_scenarios()).unwrap();
        assert_eq!(out.len(), 1);
        let s = &out[0];
        assert_eq!(s.percent(HeuristicLabel::TakeXBest(1)), 50.0);
        assert_eq!(s.percent(HeuristicLabel::Truthful), 25.0);
        assert_eq!(s.percent(HeuristicLabel::Abstain), 25.0);
        let sum: f64 = s.categories().iter().map(|&c| s.percent(c)).sum();
        assert!((sum - 100.0).abs() < 1e-9);
    }

    #[test]
    fn overlapping_labels_collapse_by_precedence() {
        // Truthful and Take-3 coincide in scenario 4.
        let out = strategy_proportions(&[record("4", 3, 0, "ACD")], &builtin_scenarios()).unwrap();
        assert_eq!(out[0].categories(), vec![HeuristicLabel::Truthful]);
    }

    #[test]
    fn empty_and_unknown() {
        assert!(strategy_proportions(&[], &builtin_scenarios()).unwrap().is_empty());
        let mut r = record("3", 1, 0, "E");
        r.scenario_id = "nope".into();
        assert!(matches!(strategy_proportions(&[r], &builtin_scenarios()), Err(Error::Data(_))));
    }

    #[test]
    fn contingency_across_conditions() {
        let records = vec![
            record("3", 1, 0, "E"),
            record("3", 1, 0, "ABE"),
            record("3", 1, 3, "ABCE"),
            record("3", 1, 3, "E"),
        ];
        let out = strategy_proportions(&records, &builtin_scenarios()).unwrap();
        let table = contingency_from_summaries(&out).unwrap();
        assert_eq!(table.rows(), &[vec![1, 0, 1], vec![0, 1, 1]]);
    }
}
