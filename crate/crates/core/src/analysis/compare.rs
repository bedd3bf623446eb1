//! Reconciles computed maximum expected utilities with the published
//! per-scenario tables.
//!
//! Only zero-missing-voter cells of non-provisional scenarios are meaningful
//! checks: the distribution of missing ballots behind the other cells was
//! never published, so those rows are informational.

use std::fmt::Write as _;

use crate::analysis::grid::heuristic_grid;
use crate::error::Result;
use crate::money::{format_dollars, format_exact, parse_rational, round_half_up_cents, Rational};
use crate::scenario::builtin;
use crate::uncertainty::CompletionModel;

/// One published cell: maximum expected utility (dollars) and the strategies reaching it.
/// `value: None` marks a "--" cell, published as "every ballot yields 0".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublishedCell {
    pub scenario_id: &'static str,
    pub n: u32,
    pub k: usize,
    pub value: Option<&'static str>,
    pub strategies: &'static [&'static str],
}

const fn cell(
    scenario_id: &'static str,
    n: u32,
    k: usize,
    value: &'static str,
    strategies: &'static [&'static str],
) -> PublishedCell {
    PublishedCell { scenario_id, n, k, value: Some(value), strategies }
}

const fn dash(scenario_id: &'static str, n: u32, k: usize) -> PublishedCell {
    PublishedCell { scenario_id, n, k, value: None, strategies: &[] }
}

const PUBLISHED: &[PublishedCell] = &[
    cell("1a-reconstructed", 0, 1, "0.12", &["Take 1"]),
    cell("1a-reconstructed", 0, 2, "0.22", &["Take 1"]),
    cell("1a-reconstructed", 0, 3, "0.31", &["Take 2"]),
    cell("1a-reconstructed", 1, 1, "0.11", &["Take 1"]),
    cell("1a-reconstructed", 1, 2, "0.21", &["Take 2"]),
    cell("1a-reconstructed", 1, 3, "0.30", &["Take 2"]),
    cell("1a-reconstructed", 3, 1, "0.11", &["Take 1"]),
    cell("1a-reconstructed", 3, 2, "0.20", &["Take 2"]),
    cell("1a-reconstructed", 3, 3, "0.29", &["Take 2"]),
    cell("1b", 0, 1, "0.13", &["Take 1"]),
    cell("1b", 0, 2, "0.26", &["Take 1"]),
    cell("1b", 0, 3, "0.36", &["Take 2"]),
    cell("1b", 1, 1, "0.12", &["Take 1"]),
    cell("1b", 1, 2, "0.22", &["Take 2"]),
    cell("1b", 1, 3, "0.31", &["Take 2"]),
    cell("1b", 3, 1, "0.11", &["Take 1"]),
    cell("1b", 3, 2, "0.21", &["Take 2"]),
    cell("1b", 3, 3, "0.29", &["Take 2"]),
    dash("2a", 0, 1),
    dash("2a", 0, 2),
    dash("2a", 1, 1),
    dash("2a", 1, 2),
    cell("2a", 3, 1, "0.01", &["Truth"]),
    cell("2a", 3, 2, "0.04", &["Truth"]),
    dash("2b", 0, 3),
    dash("2b", 1, 3),
    cell("2b", 3, 3, "0.05", &["Truth"]),
    cell("3", 0, 1, "0.25", &["Truth", "Take 1", "Take 2"]),
    cell("3", 0, 2, "0.25", &["Regret", "[C,E]"]),
    cell("3", 0, 3, "-0.03", &["Regret"]),
    cell("3", 1, 1, "0.10", &["Regret"]),
    cell("3", 1, 2, "0.06", &["Regret"]),
    cell("3", 1, 3, "-0.10", &["Regret"]),
    cell("3", 3, 1, "0.03", &["Regret"]),
    cell("3", 3, 2, "-0.03", &["Regret"]),
    cell("3", 3, 3, "-0.17", &["Regret"]),
    cell("4", 0, 1, "0.11", &["Truth"]),
    cell("4", 0, 2, "0.23", &["Truth"]),
    cell("4", 0, 3, "0.32", &["Take 2"]),
    cell("4", 1, 1, "0.11", &["Truth"]),
    cell("4", 1, 2, "0.22", &["Take 2"]),
    cell("4", 1, 3, "0.31", &["Truth"]),
    cell("4", 3, 1, "0.11", &["Take 2"]),
    cell("4", 3, 2, "0.21", &["Truth"]),
    cell("4", 3, 3, "0.31", &["Truth"]),
];

pub fn published_cells() -> &'static [PublishedCell] {
    PUBLISHED
}

/// Cells whose published value is known to disagree with direct computation
/// from the published profile itself.
const KNOWN_DISCREPANCIES: &[(&str, u32, usize, &str)] = &[
    ("4", 0, 1, "take-2 [C,D] reaches 35/3 cents, above the truthful 45/4 the published cell reports"),
    ("4", 0, 2, "take-2 [C,D] reaches 70/3 cents, above the truthful 45/2; both display as 0.23"),
    (
        "4",
        0,
        3,
        "published value disagrees with direct computation from the published votes and utilities",
    ),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub scenario_id: String,
    pub n: u32,
    pub k: usize,
    /// `--` for cells published without a number.
    pub published: String,
    pub published_strategies: Vec<String>,
    pub computed: Rational,
    pub computed_strategies: Vec<String>,
    pub value_match: bool,
    pub strategies_agree: bool,
    /// Zero missing voters and a non-provisional scenario.
    pub gated: bool,
    pub note: String,
}

impl ComparisonRow {
    pub fn status(&self) -> &'static str {
        if self.value_match {
            "MATCH"
        } else {
            "MISMATCH"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub model: String,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn row(&self, scenario_id: &str, n: u32, k: usize) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.scenario_id == scenario_id && r.n == n && r.k == k)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Published maximum expected utility vs. exact computation (model: {})", self.model);
        let _ = writeln!(
            out,
            "Values in dollars, rounded half-up to cents; exact value in cents in brackets. \
             Only n=0 cells of non-provisional scenarios are checks; other rows depend on the \
             missing-ballot distribution and are informational."
        );
        let _ = writeln!(out, "scenario | n | k | published | computed [exact] | status | published strategies | computed maximizers | agree | note");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{} | {} | {} | {} | {} [{}] | {} | {} | {} | {} | {}",
                r.scenario_id,
                r.n,
                r.k,
                r.published,
                format_dollars(&r.computed),
                format_exact(&r.computed),
                r.status(),
                r.published_strategies.join(", "),
                r.computed_strategies.join(", "),
                if r.strategies_agree { "yes" } else { "no" },
                r.note
            );
        }
        let gated: Vec<_> = self.rows.iter().filter(|r| r.gated).collect();
        let _ = writeln!(
            out,
            "gated cells: {} match, {} mismatch; informational cells: {} match, {} mismatch",
            gated.iter().filter(|r| r.value_match).count(),
            gated.iter().filter(|r| !r.value_match).count(),
            self.rows.iter().filter(|r| !r.gated && r.value_match).count(),
            self.rows.iter().filter(|r| !r.gated && !r.value_match).count(),
        );
        out
    }

    pub fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scenario", "n", "k", "published", "computed", "computed_exact_cents", "status",
            "published_strategies", "computed_maximizers", "strategies_agree", "gated", "note",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.scenario_id.clone(),
                r.n.to_string(),
                r.k.to_string(),
                r.published.clone(),
                format_dollars(&r.computed),
                format_exact(&r.computed),
                r.status().to_string(),
                r.published_strategies.join(";"),
                r.computed_strategies.join(";"),
                r.strategies_agree.to_string(),
                r.gated.to_string(),
                r.note.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn normalize_strategy(name: &str) -> String {
    let name = name.trim().trim_end_matches('.');
    match name.strip_prefix("Take ") {
        Some(x) => format!("Take-{x}"),
        None => name.to_owned(),
    }
}

pub fn comparison_report(model: &CompletionModel) -> Result<ComparisonReport> {
    let mut rows = Vec::with_capacity(PUBLISHED.len());
    for p in PUBLISHED {
        let scenario = builtin(p.scenario_id)?;
        let grid = heuristic_grid(&scenario, &[p.k], &[p.n], model)?;
        let c = grid.cells.into_iter().next().expect("one cell");
        let all_ballots = c.maximizer_count == 1usize << scenario.m();
        let computed_strategies = if all_ballots { vec!["all ballots".to_owned()] } else { c.maximizer_names(&scenario) };

        let (published, value_match, strategies_agree, published_strategies) = match p.value {
            Some(v) => {
                let cents = parse_rational(v).expect("published literal") * Rational::from_integer(100.into());
                let value_match = round_half_up_cents(&c.max_eu) == *cents.numer() && cents.is_integer();
                let names: Vec<String> = p.strategies.iter().map(|s| normalize_strategy(s)).collect();
                let ours = c.maximizer_names(&scenario);
                let agree = names.iter().all(|n| ours.contains(n));
                (v.to_owned(), value_match, agree, p.strategies.iter().map(|s| s.to_string()).collect())
            }
            None => {
                let zero = c.max_eu == Rational::from_integer(0.into());
                ("--".to_owned(), zero, zero && all_ballots, vec!["all ballots (0)".to_owned()])
            }
        };

        let gated = p.n == 0 && !scenario.provisional;
        let mut notes = Vec::new();
        if let Some((_, _, _, why)) =
            KNOWN_DISCREPANCIES.iter().find(|(id, n, k, _)| *id == p.scenario_id && *n == p.n && *k == p.k)
        {
            notes.push(format!("KNOWN DISCREPANCY: {why}"));
        }
        if scenario.provisional {
            notes.push("reconstructed profile (provisional)".to_owned());
        }
        if p.n > 0 {
            notes.push("missing-ballot distribution unpublished; informational".to_owned());
        }
        rows.push(ComparisonRow {
            scenario_id: scenario.id.clone(),
            n: p.n,
            k: p.k,
            published,
            published_strategies,
            computed: c.max_eu.clone(),
            computed_strategies,
            value_match,
            strategies_agree,
            gated,
            note: notes.join("; "),
        });
    }
    Ok(ComparisonReport { model: model.to_string(), rows })
}
