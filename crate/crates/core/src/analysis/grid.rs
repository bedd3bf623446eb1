use std::fmt::Write as _;

use crate::election::Ballot;
use crate::error::Result;
use crate::money::{format_dollars, format_exact, Rational};
use crate::scenario::Scenario;
use crate::strategy::{all_ballot_values, best_of, heuristic_ballots, HeuristicLabel};
use crate::uncertainty::{CompletionModel, Evaluator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCell {
    pub n: u32,
    pub k: usize,
    /// Every defined heuristic ballot and its expected utility (cents).
    pub heuristics: Vec<(HeuristicLabel, Ballot, Rational)>,
    pub max_eu: Rational,
    pub maximizing_heuristics: Vec<HeuristicLabel>,
    /// Maximizers that are not any heuristic's ballot.
    pub other_maximizers: Vec<Ballot>,
    pub maximizer_count: usize,
}

impl GridCell {
    pub fn has_non_heuristic_maximizers(&self) -> bool {
        !self.other_maximizers.is_empty()
    }

    pub fn heuristic_eu(&self, label: HeuristicLabel) -> Option<&Rational> {
        self.heuristics.iter().find(|(l, _, _)| *l == label).map(|(_, _, v)| v)
    }

    /// Maximizer names: heuristic short names, then explicit `[C,E]` ballots.
    pub fn maximizer_names(&self, scenario: &Scenario) -> Vec<String> {
        self.maximizing_heuristics
            .iter()
            .map(|l| l.short_name())
            .chain(self.other_maximizers.iter().map(|b| b.display(&scenario.candidates)))
            .collect()
    }

    fn summary(&self, scenario: &Scenario) -> String {
        if self.maximizer_count == 1usize << scenario.m() {
            return "all ballots".into();
        }
        let mut names: Vec<String> = self.maximizing_heuristics.iter().map(|l| l.short_name()).collect();
        const SHOWN: usize = 3;
        names.extend(self.other_maximizers.iter().take(SHOWN).map(|b| b.display(&scenario.candidates)));
        if self.other_maximizers.len() > SHOWN {
            names.push(format!("+{} more", self.other_maximizers.len() - SHOWN));
        }
        names.join(", ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicGrid {
    pub scenario: Scenario,
    pub model: String,
    pub ks: Vec<usize>,
    pub ns: Vec<u32>,
    /// Row-major: for each n, for each k.
    pub cells: Vec<GridCell>,
}

impl HeuristicGrid {
    pub fn cell(&self, n: u32, k: usize) -> Option<&GridCell> {
        self.cells.iter().find(|c| c.n == n && c.k == k)
    }

    pub fn render_table(&self, exact: bool) -> String {
        let mut out = String::new();
        let s = &self.scenario;
        let _ = writeln!(out, "Scenario {} (model: {})", s.id, self.model);
        let header: Vec<String> = self.ks.iter().map(|k| format!("k={k}")).collect();
        let _ = writeln!(out, "n\\k | {}", header.join(" | "));
        for &n in &self.ns {
            let row: Vec<String> = self
                .ks
                .iter()
                .filter_map(|&k| self.cell(n, k))
                .map(|c| format!("{} {}", value(&c.max_eu, exact), c.summary(s)))
                .collect();
            let _ = writeln!(out, "{n} | {}", row.join(" | "));
        }
        out
    }

    /// One line per cell: `scenario,model,n,k,max_eu,maximizers,heuristic_eus`.
    pub fn render_csv(&self, exact: bool) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scenario", "model", "n", "k", "max_eu", "maximizers", "heuristic_eus"])
            .expect("in-memory write");
        for c in &self.cells {
            let heuristics: Vec<String> = c
                .heuristics
                .iter()
                .map(|(l, _, v)| format!("{}={}", l.short_name(), value(v, exact)))
                .collect();
            w.write_record([
                self.scenario.id.clone(),
                self.model.clone(),
                c.n.to_string(),
                c.k.to_string(),
                value(&c.max_eu, exact),
                c.maximizer_names(&self.scenario).join(";"),
                heuristics.join(";"),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn value(v: &Rational, exact: bool) -> String {
    if exact {
        format_exact(v)
    } else {
        format_dollars(v)
    }
}

pub fn heuristic_grid(
    scenario: &Scenario,
    ks: &[usize],
    ns: &[u32],
    model: &CompletionModel,
) -> Result<HeuristicGrid> {
    let heuristics = heuristic_ballots(&scenario.utilities);
    let mut cells = Vec::with_capacity(ks.len() * ns.len());
    for &n in ns {
        let profile = scenario.with_missing(n);
        for &k in ks {
            let evaluator = Evaluator::new(&profile, k, model)?;
            let values = all_ballot_values(&evaluator, profile.m())?;
            let best = best_of(&values);
            let eu = |b: Ballot| values[b.bits() as usize].1.clone();
            let scored: Vec<_> = heuristics.iter().map(|&(l, b)| (l, b, eu(b))).collect();
            let maximizing_heuristics =
                scored.iter().filter(|(_, _, v)| *v == best.max_eu).map(|(l, _, _)| *l).collect();
            let other_maximizers = best
                .maximizers
                .iter()
                .copied()
                .filter(|b| !heuristics.iter().any(|(_, h)| h == b))
                .collect();
            cells.push(GridCell {
                n,
                k,
                heuristics: scored,
                max_eu: best.max_eu,
                maximizing_heuristics,
                other_maximizers,
                maximizer_count: best.maximizers.len(),
            });
        }
    }
    Ok(HeuristicGrid {
        scenario: scenario.clone(),
        model: model.describe(&scenario.candidates),
        ks: ks.to_vec(),
        ns: ns.to_vec(),
        cells,
    })
}
