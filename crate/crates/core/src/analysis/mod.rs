//! Heuristic-performance grids, ballot-log classification, χ² tests and
//! the reconciliation report against published values.

mod ballot_log;
mod chi_square;
mod compare;
mod grid;
mod proportions;

pub use ballot_log::{parse_ballot_log, write_ballot_log, BallotLogRow, BallotRecord, BALLOT_LOG_HEADER};
pub use chi_square::{chi_square_test, ln_gamma, regularized_gamma_q, ChiSquare, ContingencyTable};
pub use compare::{comparison_report, published_cells, ComparisonReport, ComparisonRow, PublishedCell};
pub use grid::{heuristic_grid, GridCell, HeuristicGrid};
pub use proportions::{
    category_precedence, contingency_from_summaries, primary_category, render_proportions_csv,
    render_proportions_table, strategy_proportions, ConditionSummary,
};
