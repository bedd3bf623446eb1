use approval_core::analysis::{comparison_report, published_cells};
use approval_core::money::format_dollars;
use approval_core::CompletionModel;

#[test]
fn report_covers_all_cells_and_flags_scenario_four() {
    let report = comparison_report(&CompletionModel::UniformSubsets).unwrap();
    assert_eq!(report.rows.len(), published_cells().len());

    let row = report.row("4", 0, 3).unwrap();
    assert_eq!(row.published, "0.32");
    assert_eq!(format_dollars(&row.computed), "0.35");
    assert_eq!(row.status(), "MISMATCH");
    assert!(row.note.contains("KNOWN DISCREPANCY"));
    assert!(report.render_text().lines().any(|l| l.starts_with("4 | 0 | 3 |") && l.contains("MISMATCH")));

    for (k, v) in [(1, "0.13"), (2, "0.26"), (3, "0.36")] {
        let row = report.row("1b", 0, k).unwrap();
        assert_eq!(row.published, v);
        assert_eq!(row.status(), "MATCH");
        assert!(row.strategies_agree);
    }
    for k in 1..=3 {
        let row = report.row("3", 0, k).unwrap();
        assert_eq!(row.status(), "MATCH", "scenario 3 k={k}");
        assert!(row.strategies_agree, "scenario 3 k={k}");
    }
}

#[test]
fn only_known_discrepancies_fail_among_gated_cells() {
    let report = comparison_report(&CompletionModel::UniformSubsets).unwrap();
    let failing: Vec<_> = report.rows.iter().filter(|r| r.gated && !r.value_match).map(|r| (r.scenario_id.as_str(), r.n, r.k)).collect();
    assert_eq!(failing, vec![("4", 0, 1), ("4", 0, 3)]);
    let disagree: Vec<_> =
        report.rows.iter().filter(|r| r.gated && !r.strategies_agree).map(|r| (r.scenario_id.as_str(), r.n, r.k)).collect();
    assert_eq!(disagree, vec![("4", 0, 1), ("4", 0, 2)]);
    for k in 1..=3 {
        assert!(report.row("4", 0, k).unwrap().note.contains("KNOWN DISCREPANCY"));
    }
    let csv = report.render_csv();
    assert_eq!(csv.lines().count(), published_cells().len() + 1);
}
