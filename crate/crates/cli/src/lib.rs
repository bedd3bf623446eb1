//! The `approval` command. Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use approval_core::analysis::{
    chi_square_test, comparison_report, contingency_from_summaries, heuristic_grid, parse_ballot_log,
    render_proportions_csv, render_proportions_table, strategy_proportions, ConditionSummary,
};
use approval_core::money::{format_dollars, format_exact};
use approval_core::{
    best_response, builtin, builtin_scenarios, classify_ballot, expected_utility_exact, expected_utility_mc, Ballot,
    CompletionModel, Scenario,
};
use approval_service::{Experiment, PlaylistConfig, ServiceConfig};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "approval: usage error: {m}"),
            CliError::Data(m) => write!(f, "approval: {m}"),
        }
    }
}

impl From<approval_core::Error> for CliError {
    fn from(e: approval_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<approval_service::ServiceError> for CliError {
    fn from(e: approval_service::ServiceError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "approval", version, about = "Approval voting with missing votes: exact analysis and experiment server")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum expected utility and heuristic performance over a k x n grid.
    Analyze(AnalyzeArgs),
    /// Every ballot that maximizes expected utility.
    BestResponse(BestResponseArgs),
    /// Classify one ballot, or summarize a ballot log with chi-square tests.
    Classify(ClassifyArgs),
    /// Compare computed maxima with the published tables.
    Compare(CompareArgs),
    /// Monte Carlo estimate of one ballot's expected utility.
    Mc(McArgs),
    /// Run the experiment HTTP server.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Debug, Args)]
struct ModelArg {
    /// uniform-subsets, independent:P, single-vote, single-vote-abstain or weighted:ABE=1/2;=1/2
    #[arg(long, default_value = "uniform-subsets")]
    model: String,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Built-in scenario id or path to a scenario JSON file; all built-ins when omitted.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    k: Vec<usize>,
    /// Missing-voter counts [default: 0,1,3, or the file's missing_voters]
    #[arg(long, value_delimiter = ',')]
    n: Vec<u32>,
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Print exact rational cents instead of rounded dollars.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct BestResponseArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    k: usize,
    /// Missing voters [default: the scenario's own]
    #[arg(long)]
    n: Option<u32>,
    #[command(flatten)]
    model: ModelArg,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["log", "ballot"]))]
struct ClassifyArgs {
    /// Ballot log CSV (session_id,scenario_id,k,n,ballot).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Extra scenario files the log may refer to.
    #[arg(long = "scenario-file")]
    scenario_files: Vec<PathBuf>,
    /// Ballot such as ABE (empty string abstains); needs --scenario.
    #[arg(long, requires = "scenario", allow_hyphen_values = true)]
    ballot: Option<String>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    ballot: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    model: ModelArg,
    /// Also print the exact value.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "APPROVAL_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "APPROVAL_BIND", default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    /// Directory holding the event log.
    #[arg(long, env = "APPROVAL_DATA_DIR", default_value = "data")]
    data: PathBuf,
    #[arg(long, env = "APPROVAL_MODEL", default_value = "uniform-subsets")]
    model: String,
    /// JSON playlist file (single_winner, two_winner, three_winner).
    #[arg(long, env = "APPROVAL_PLAYLIST")]
    playlist: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::BestResponse(a) => best(a, out),
        Command::Classify(a) => classify(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Mc(a) => mc(a, out),
        Command::Serve(a) => serve(a),
    }
}

/// A built-in id, else a path to a scenario file.
pub fn load_scenario(selector: &str) -> Result<Scenario, approval_core::Error> {
    if let Ok(s) = builtin(selector) {
        return Ok(s);
    }
    let path = Path::new(selector);
    if !path.exists() {
        return Err(approval_core::Error::Data(format!(
            "{selector:?} is neither a built-in scenario nor a readable file"
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| approval_core::Error::Data(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text).map_err(|e| approval_core::Error::Data(format!("{}: {e}", path.display())))
}

fn parse_model(spec: &str, scenario: &Scenario) -> CliResult<CompletionModel> {
    let model = CompletionModel::parse_with(spec, &scenario.candidates)
        .map_err(|e| CliError::Usage(format!("--model {spec:?}: {e}")))?;
    model.validate(scenario.m()).map_err(|e| CliError::Usage(format!("--model {spec:?}: {e}")))?;
    Ok(model)
}

fn check_k(k: usize, scenario: &Scenario) -> CliResult {
    if k == 0 || k > scenario.m() {
        return Err(CliError::Usage(format!("k={k} must be between 1 and {} for scenario {}", scenario.m(), scenario.id)));
    }
    Ok(())
}

fn parse_ballot(text: &str, scenario: &Scenario) -> CliResult<Ballot> {
    Ballot::parse(&scenario.candidates, text).map_err(|e| CliError::Usage(format!("--ballot {text:?}: {e}")))
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn analyze(a: AnalyzeArgs, out: &mut dyn Write) -> CliResult {
    let scenarios = match &a.scenario {
        Some(sel) => vec![load_scenario(sel)?],
        None => builtin_scenarios(),
    };
    let mut csv_header_done = false;
    for (i, scenario) in scenarios.iter().enumerate() {
        let model = parse_model(&a.model.model, scenario)?;
        for &k in &a.k {
            check_k(k, scenario)?;
        }
        let ns = if !a.n.is_empty() {
            a.n.clone()
        } else if a.scenario.as_deref().is_some_and(|s| builtin(s).is_err()) {
            vec![scenario.missing_voters]
        } else {
            vec![0, 1, 3]
        };
        let grid = heuristic_grid(scenario, &a.k, &ns, &model)?;
        match a.format {
            Format::Table => {
                if i > 0 {
                    emit(out, "\n")?;
                }
                emit(out, &grid.render_table(a.exact))?;
            }
            Format::Csv => {
                let csv = grid.render_csv(a.exact);
                let body = if csv_header_done { csv.split_once('\n').map_or("", |(_, b)| b) } else { &csv };
                emit(out, body)?;
                csv_header_done = true;
            }
        }
    }
    Ok(())
}

fn best(a: BestResponseArgs, out: &mut dyn Write) -> CliResult {
    let mut scenario = load_scenario(&a.scenario)?;
    if let Some(n) = a.n {
        scenario = scenario.with_missing(n);
    }
    check_k(a.k, &scenario)?;
    let model = parse_model(&a.model.model, &scenario)?;
    let br = best_response(&scenario, a.k, &model)?;
    writeln!(
        out,
        "scenario {} k={} n={} model={}",
        scenario.id,
        a.k,
        scenario.missing_voters,
        model.describe(&scenario.candidates)
    )?;
    writeln!(out, "max expected utility: {} [{} cents]", format_dollars(&br.max_eu), format_exact(&br.max_eu))?;
    writeln!(out, "maximizers ({} of {}):", br.maximizers.len(), 1usize << scenario.m())?;
    for b in &br.maximizers {
        let c = classify_ballot(*b, &scenario.utilities);
        let labels: Vec<String> = c.labels.iter().map(|l| l.short_name()).collect();
        writeln!(
            out,
            "  {} {}{}",
            b.display(&scenario.candidates),
            labels.join("/"),
            if c.sincere { "" } else { " (insincere)" }
        )?;
    }
    Ok(())
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> CliResult {
    if let Some(text) = &a.ballot {
        let scenario = load_scenario(a.scenario.as_deref().expect("clap requires --scenario"))?;
        let ballot = parse_ballot(text, &scenario)?;
        let c = classify_ballot(ballot, &scenario.utilities);
        let labels: Vec<String> = c.labels.iter().map(|l| l.short_name()).collect();
        writeln!(out, "ballot {} in scenario {}", ballot.display(&scenario.candidates), scenario.id)?;
        writeln!(out, "labels: {}", labels.join(", "))?;
        writeln!(out, "sincere: {}", if c.sincere { "yes" } else { "no" })?;
        return Ok(());
    }
    let path = a.log.as_ref().expect("clap requires --log or --ballot");
    let mut scenarios = builtin_scenarios();
    for f in &a.scenario_files {
        scenarios.push(load_scenario(&f.to_string_lossy())?);
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let records =
        parse_ballot_log(&text, &scenarios).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let summaries = strategy_proportions(&records, &scenarios)?;
    match a.format {
        Format::Csv => emit(out, &render_proportions_csv(&summaries)),
        Format::Table => {
            emit(out, &render_proportions_table(&summaries))?;
            writeln!(out, "{}", chi_square_line("all conditions", &summaries))?;
            let mut groups: Vec<(String, usize)> = summaries.iter().map(|s| (s.scenario_id.clone(), s.k)).collect();
            groups.dedup();
            for (id, k) in groups {
                let group: Vec<ConditionSummary> =
                    summaries.iter().filter(|s| s.scenario_id == id && s.k == k).cloned().collect();
                if group.len() > 1 {
                    writeln!(out, "{}", chi_square_line(&format!("scenario {id} k={k} across n"), &group))?;
                }
            }
            Ok(())
        }
    }
}

fn chi_square_line(what: &str, summaries: &[ConditionSummary]) -> String {
    match contingency_from_summaries(summaries).and_then(|t| chi_square_test(&t)) {
        Ok(r) => format!("chi-square ({what}): statistic {:.4}, df {}, p {:.6}", r.statistic, r.df, r.p_value),
        Err(e) => format!("chi-square ({what}): not applicable ({e})"),
    }
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> CliResult {
    let model = a
        .model
        .model
        .parse::<CompletionModel>()
        .map_err(|e| CliError::Usage(format!("--model {:?}: {e}", a.model.model)))?;
    let report = comparison_report(&model)?;
    match a.format {
        Format::Table => emit(out, &report.render_text()),
        Format::Csv => emit(out, &report.render_csv()),
    }
}

fn mc(a: McArgs, out: &mut dyn Write) -> CliResult {
    let mut scenario = load_scenario(&a.scenario)?;
    if let Some(n) = a.n {
        scenario = scenario.with_missing(n);
    }
    check_k(a.k, &scenario)?;
    let model = parse_model(&a.model.model, &scenario)?;
    let ballot = parse_ballot(&a.ballot, &scenario)?;
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let est = expected_utility_mc(&scenario, ballot, a.k, &model, a.samples, a.seed)?;
    writeln!(
        out,
        "scenario {} ballot {} k={} n={} samples={} seed={}",
        scenario.id,
        ballot.display(&scenario.candidates),
        a.k,
        scenario.missing_voters,
        a.samples,
        a.seed
    )?;
    writeln!(out, "estimate: {:.6} cents (std error {:.6})", est.estimate, est.std_error)?;
    if a.exact {
        let exact = expected_utility_exact(&scenario, ballot, a.k, &model)?;
        writeln!(out, "exact: {} cents ({})", format_exact(&exact), format_dollars(&exact))?;
    }
    Ok(())
}

fn serve(a: ServeArgs) -> CliResult {
    let model = a
        .model
        .parse::<CompletionModel>()
        .map_err(|e| CliError::Usage(format!("--model {:?}: {e}", a.model)))?;
    model.validate(5).map_err(|e| CliError::Usage(format!("--model {:?}: {e}", a.model)))?;
    let playlists = match &a.playlist {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            PlaylistConfig::from_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?
        }
        None => PlaylistConfig::default(),
    };
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .try_init();
    let experiment = Arc::new(Experiment::open(&a.data, ServiceConfig { model, playlists })?);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(approval_service::serve(experiment, SocketAddr::new(a.bind, a.port)))?;
    Ok(())
}
