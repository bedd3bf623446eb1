use std::fs::OpenOptions;
use std::io::Write;

use approval_service::{Experiment, ExportFilter, Group, ServiceConfig, LOG_FILE_NAME};

const BALLOTS: [&[&str]; 4] = [&["A", "B", "E"], &[], &["D"], &["B", "E"]];

#[test]
fn restart_mid_session_reconstructs_state() {
    let dir = tempfile::tempdir().unwrap();
    let (id, other, before) = {
        let exp = Experiment::open(dir.path(), ServiceConfig::default()).unwrap();
        let s = exp.create_session(Some(Group::TwoWinner), Some(2024)).unwrap();
        let t = exp.create_session(None, None).unwrap();
        for b in BALLOTS {
            exp.submit_ballot(&s.id, b, None).unwrap();
        }
        exp.submit_ballot(&t.id, &["C"], None).unwrap();
        (s.id, t.id, exp.sessions())
        // Dropped without any shutdown step, as a killed process would be.
    };

    let exp = Experiment::open(dir.path(), ServiceConfig::default()).unwrap();
    assert_eq!(exp.sessions(), before);
    assert_eq!(exp.session(&id).unwrap().results.len(), BALLOTS.len());
    assert_eq!(exp.session(&other).unwrap().results.len(), 1);

    // The session carries on exactly as an uninterrupted one would.
    let fresh = Experiment::in_memory(ServiceConfig::default());
    let s = fresh.create_session(Some(Group::TwoWinner), Some(2024)).unwrap();
    assert_eq!(s.id, id);
    for b in BALLOTS {
        fresh.submit_ballot(&s.id, b, None).unwrap();
    }
    let resumed = exp.submit_ballot(&id, &["E"], None).unwrap();
    let straight = fresh.submit_ballot(&id, &["E"], None).unwrap();
    assert_eq!(resumed, straight);
}

#[test]
fn torn_write_is_ignored_on_restart() {
    let dir = tempfile::tempdir().unwrap();
    let before = {
        let exp = Experiment::open(dir.path(), ServiceConfig::default()).unwrap();
        let s = exp.create_session(Some(Group::ThreeWinner), Some(8)).unwrap();
        exp.submit_ballot(&s.id, &["E"], None).unwrap();
        exp.sessions()
    };
    let mut f = OpenOptions::new().append(true).open(dir.path().join(LOG_FILE_NAME)).unwrap();
    f.write_all(b"{\"event\":\"ballot_submitted\",\"session_id\":").unwrap();
    drop(f);

    let exp = Experiment::open(dir.path(), ServiceConfig::default()).unwrap();
    assert_eq!(exp.sessions(), before);
    exp.submit_ballot(&before[0].id, &["A"], None).unwrap();
    drop(exp);
    let exp = Experiment::open(dir.path(), ServiceConfig::default()).unwrap();
    assert_eq!(exp.session(&before[0].id).unwrap().results.len(), 2);
}

#[test]
fn replayed_script_exports_identical_csv() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let exp = Experiment::open(dir.path(), ServiceConfig::default()).unwrap();
        for seed in [1u64, 2, 3] {
            let s = exp.create_session(None, Some(seed)).unwrap();
            for b in BALLOTS {
                exp.submit_ballot(&s.id, b, None).unwrap();
            }
        }
        let csv = exp.export_log(&ExportFilter::default()).unwrap();
        let log = std::fs::read(dir.path().join(LOG_FILE_NAME)).unwrap();
        (csv, log)
    };
    let (csv_a, log_a) = run();
    let (csv_b, log_b) = run();
    assert_eq!(csv_a, csv_b);
    assert_eq!(log_a, log_b);
    assert_eq!(csv_a.lines().count(), 1 + 3 * BALLOTS.len());
}

#[test]
fn log_recorded_model_survives_config_change() {
    use approval_core::CompletionModel;
    let dir = tempfile::tempdir().unwrap();
    let single = ServiceConfig { model: CompletionModel::SingleVote { allow_abstain: false }, ..Default::default() };
    let id = {
        let exp = Experiment::open(dir.path(), single).unwrap();
        exp.create_session(Some(Group::TwoWinner), Some(4)).unwrap().id
    };
    let exp = Experiment::open(dir.path(), ServiceConfig::default()).unwrap();
    assert_eq!(exp.session(&id).unwrap().model, CompletionModel::SingleVote { allow_abstain: false });
}
