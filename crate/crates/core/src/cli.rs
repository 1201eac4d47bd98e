//! `ledgergraph` command line: fetch → build → analyze → compare, plus a
//! text summary of finished reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 fetch failure, 3 data or parse
//! failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{DateTime, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::graph::{ComponentKind, DirectedGraph};
use crate::ingest::{
    build_graph, read_dump, write_dump, BackoffPolicy, Endpoint, FetchJob, Fetcher, IngestionStats, Interval, Ledger,
    Source, ThreadSleeper, UreqTransport,
};
use crate::metrics::{analyze_timed, AnalysisConfig, ClusteringMode, DegreeHistogram, MetricsReport, SamplePlan};
use crate::nullmodel::{small_world_compare, SmallWorldReport};
use crate::pajek::{read_pajek, write_pajek};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FETCH: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ledgergraph", version, about = "Transaction graphs and small-world metrics for distributed ledgers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Download the transactions of a time window into a record dump.
    Fetch(FetchArgs),
    /// Turn a record dump into a Pajek graph and ingestion statistics.
    Build(BuildArgs),
    /// Compute degree, clustering, component, path and load metrics.
    Analyze(AnalyzeArgs),
    /// Compare a graph against a size-matched random graph.
    Compare(CompareArgs),
    /// Summarize analyze/compare reports as a text table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct FetchArgs {
    #[arg(long, value_parser = parse_ledger)]
    ledger: Ledger,
    /// Window start, `YYYY-MM-DD` (UTC midnight) or RFC 3339.
    #[arg(long, value_parser = parse_time)]
    from: i64,
    /// Window end, exclusive.
    #[arg(long, value_parser = parse_time)]
    to: i64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Read from a local record dump instead of the network.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// TOML file with endpoint and retry settings.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write vertex labels (addresses) into the Pajek file.
    #[arg(long)]
    labels: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ComponentArg {
    Weak,
    Strong,
}

impl From<ComponentArg> for ComponentKind {
    fn from(c: ComponentArg) -> Self {
        match c {
            ComponentArg::Weak => ComponentKind::Weak,
            ComponentArg::Strong => ComponentKind::Strong,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClusteringArg {
    Undirected,
    Directed,
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Pajek graph.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Fraction of main-component nodes used for shortest paths.
    #[arg(long, default_value_t = crate::metrics::DEFAULT_SAMPLE_FRACTION)]
    sample: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ComponentArg::Weak)]
    component: ComponentArg,
    /// Ignore arc direction for shortest paths and load centrality.
    #[arg(long)]
    undirected: bool,
    #[arg(long, value_enum, default_value_t = ClusteringArg::Undirected)]
    clustering: ClusteringArg,
    /// Highest-degree nodes to compute load centrality for.
    #[arg(long, default_value_t = crate::metrics::DEFAULT_HUBS)]
    hubs: usize,
}

impl MetricArgs {
    fn config(&self) -> Result<AnalysisConfig, CliError> {
        let plan = SamplePlan {
            fraction: self.sample,
            seed: self.seed,
            component: self.component.into(),
            treat_as_undirected: self.undirected,
        };
        plan.validate().map_err(|e| CliError::Usage(format!("--sample: {e}")))?;
        if self.workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        Ok(AnalysisConfig {
            plan,
            workers: self.workers,
            hubs: self.hubs,
            clustering: match self.clustering {
                ClusteringArg::Undirected => ClusteringMode::Undirected,
                ClusteringArg::Directed => ClusteringMode::Directed,
            },
        })
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    metrics: MetricArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    metrics: MetricArgs,
    /// Seed of the random graph; defaults to --seed.
    #[arg(long)]
    random_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// analyze or compare JSON reports, one column each.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Ingestion statistics, matched to the inputs by position.
    #[arg(long, num_args = 1..)]
    stats: Vec<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Fetch(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Fetch(_) => EXIT_FETCH,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Fetch(m) | CliError::Data(m) => m,
        }
    }
}

fn data_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

fn parse_ledger(s: &str) -> Result<Ledger, String> {
    s.parse()
}

/// `YYYY-MM-DD` as UTC midnight, or a full RFC 3339 timestamp.
fn parse_time(s: &str) -> Result<i64, String> {
    if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(date.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp());
    }
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.timestamp())
        .map_err(|_| format!("expected YYYY-MM-DD or RFC 3339, got {s:?}"))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .try_init();

    let result = match cli.command {
        Command::Fetch(a) => cmd_fetch(&a),
        Command::Build(a) => cmd_build(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Report(a) => cmd_report(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

/// Endpoint and retry settings read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    endpoints: BTreeMap<String, EndpointConfig>,
    fetch: FetchConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EndpointConfig {
    url: Option<String>,
    key: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FetchConfig {
    max_retries: u32,
    initial_backoff_secs: f64,
    max_backoff_secs: f64,
    timeout_secs: f64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        let policy = BackoffPolicy::default();
        Self {
            max_retries: policy.max_retries,
            initial_backoff_secs: policy.initial.as_secs_f64(),
            max_backoff_secs: policy.max.as_secs_f64(),
            timeout_secs: 60.0,
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn seconds(value: f64, name: &str) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(value).map_err(|_| CliError::Usage(format!("{name} must be a non-negative number of seconds")))
}

/// Environment beats the config file, which beats the built-in default.
fn endpoint_for(ledger: Ledger, config: &FileConfig) -> Endpoint {
    let var = |suffix: &str| std::env::var(format!("LEDGERGRAPH_{}_{suffix}", ledger.as_str().to_ascii_uppercase())).ok();
    let file = config.endpoints.get(ledger.as_str());
    let mut endpoint = match var("URL").or_else(|| file.and_then(|f| f.url.clone())) {
        Some(url) => Endpoint::new(url),
        None => Endpoint::default_for(ledger),
    };
    endpoint.api_key = var("KEY").or_else(|| file.and_then(|f| f.key.clone()));
    endpoint
}

fn cmd_fetch(args: &FetchArgs) -> Result<(), CliError> {
    let interval = Interval::new(args.from, args.to).map_err(|e| CliError::Usage(format!("--from/--to: {e}")))?;
    let config = load_config(args.config.as_deref())?;
    let source = match &args.input {
        Some(path) => Source::File(path.clone()),
        None => Source::Http(endpoint_for(args.ledger, &config)),
    };
    let job = FetchJob::new(args.ledger, interval, args.workers, source).map_err(|e| CliError::Usage(e.to_string()))?;
    let policy = BackoffPolicy {
        initial: seconds(config.fetch.initial_backoff_secs, "initial_backoff_secs")?,
        max: seconds(config.fetch.max_backoff_secs, "max_backoff_secs")?,
        max_retries: config.fetch.max_retries,
    };
    let transport = UreqTransport::new(seconds(config.fetch.timeout_secs, "timeout_secs")?);
    let fetcher = Fetcher::new(Arc::new(transport), Arc::new(ThreadSleeper), policy);

    let started = Instant::now();
    let outcome = fetcher.fetch(&job).map_err(|e| match e {
        crate::ingest::FetchError::Io(e) => CliError::Data(e.to_string()),
        crate::ingest::FetchError::Config(m) => CliError::Usage(m),
        other => CliError::Fetch(other.to_string()),
    })?;
    log::info!("fetch: {:.3}s", started.elapsed().as_secs_f64());

    let file = File::create(&args.out).map_err(data_err(&args.out))?;
    let count = write_dump(&outcome.records, file).map_err(data_err(&args.out))?;
    if outcome.duplicates > 0 || outcome.malformed > 0 {
        log::warn!("dropped {} duplicate and {} malformed transactions", outcome.duplicates, outcome.malformed);
    }
    println!("{count}");

    let failed_path = sidecar(&args.out, "failed.json");
    if outcome.is_complete() {
        let _ = fs::remove_file(&failed_path);
        return Ok(());
    }
    write_json(&failed_path, &outcome.failed)?;
    let mut msg = format!("{} of the window's ranges could not be fetched:", outcome.failed.len());
    for f in &outcome.failed {
        let _ = write!(msg, "\n  {}: {}", f.unit, f.error);
    }
    let _ = write!(msg, "\nfailed ranges saved to {}", failed_path.display());
    Err(CliError::Fetch(msg))
}

fn cmd_build(args: &BuildArgs) -> Result<(), CliError> {
    let file = File::open(&args.input).map_err(data_err(&args.input))?;
    let dump = read_dump(BufReader::new(file)).map_err(data_err(&args.input))?;
    for bad in &dump.malformed {
        log::warn!("{}:{}: skipped: {}", args.input.display(), bad.line, bad.reason);
    }
    if !dump.invalid.is_empty() {
        let mut msg = format!("{} record(s) violate the record schema:", dump.invalid.len());
        for bad in &dump.invalid {
            let _ = write!(msg, "\n  line {}: {}", bad.line, bad.reason);
        }
        return Err(CliError::Data(msg));
    }

    let (graph, mut stats) = build_graph(&dump.records);
    stats.skipped_records = dump.malformed.len() as u64;
    let out = File::create(&args.out).map_err(data_err(&args.out))?;
    write_pajek(&graph, args.labels, BufWriter::new(out)).map_err(|e| CliError::Data(e.to_string()))?;
    write_json(&sidecar(&args.out, "stats.json"), &stats)?;
    log::info!(
        "{} transactions, {} nodes, {} arcs, {} skipped lines",
        stats.transactions,
        stats.nodes,
        stats.unique_arcs,
        stats.skipped_records
    );
    Ok(())
}

fn load_graph(path: &Path) -> Result<DirectedGraph, CliError> {
    let file = File::open(path).map_err(data_err(path))?;
    let graph = read_pajek(BufReader::new(file)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if graph.is_empty() {
        return Err(CliError::Data(format!("{}: graph has no nodes, so its main component is empty", path.display())));
    }
    Ok(graph)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let a = &args.metrics;
    let config = a.config()?;
    let graph = load_graph(&a.input)?;
    let (report, timings) = analyze_timed(&graph, &config).map_err(|e| CliError::Data(e.to_string()))?;
    write_json(&a.out, &report)?;
    write_degree_files(&a.out, &report.degree_histogram)?;
    write_json(&sidecar(&a.out, "timings.json"), &timings)?;
    require_aspl(&report, "graph")
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let a = &args.metrics;
    let config = a.config()?;
    let graph = load_graph(&a.input)?;
    let cmp = small_world_compare(&graph, &config, args.random_seed.unwrap_or(a.seed)).map_err(|e| CliError::Data(e.to_string()))?;
    write_json(&a.out, &cmp.report)?;
    write_json(&sidecar(&a.out, "timings.json"), &cmp.timings)?;
    for note in &cmp.report.undefined {
        log::warn!("undefined {note}");
    }
    require_aspl(&cmp.report.real, "graph")
}

/// The report is still written, but a main component without a measurable
/// pair is a data failure.
fn require_aspl(report: &MetricsReport, what: &str) -> Result<(), CliError> {
    match report.main_component_aspl {
        Some(_) => Ok(()),
        None => Err(CliError::Data(format!(
            "{what} has no main-component shortest-path average: {}",
            report.warnings.join("; ")
        ))),
    }
}

/// `out.json` → `out.<suffix>`.
fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(data_err(path))
}

fn write_degree_files(out: &Path, hist: &DegreeHistogram) -> Result<(), CliError> {
    for (name, map) in [("in", &hist.in_degree), ("out", &hist.out_degree), ("total", &hist.total_degree)] {
        let path = sidecar(out, &format!("{name}.dat"));
        fs::write(&path, DegreeHistogram::to_columns(map)).map_err(data_err(&path))?;
    }
    Ok(())
}

enum Loaded {
    Analysis(Box<MetricsReport>),
    Comparison(Box<SmallWorldReport>),
}

fn load_report(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(data_err(path))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let parsed = if value.get("random").is_some() {
        serde_json::from_value(value).map(|r| Loaded::Comparison(Box::new(r)))
    } else {
        serde_json::from_value(value).map(|r| Loaded::Analysis(Box::new(r)))
    };
    parsed.map_err(|e| CliError::Data(format!("{}: not an analyze or compare report: {e}", path.display())))
}

fn fmt_opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.digits$}"))
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    if args.stats.len() > args.inputs.len() {
        return Err(CliError::Usage("more --stats files than --in reports".into()));
    }
    let mut columns: Vec<(String, Vec<(&str, String)>)> = Vec::new();
    for (i, path) in args.inputs.iter().enumerate() {
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        let mut rows = Vec::new();
        if let Some(stats_path) = args.stats.get(i) {
            let text = fs::read_to_string(stats_path).map_err(data_err(stats_path))?;
            let stats: IngestionStats =
                serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", stats_path.display())))?;
            rows.push(("transactions", stats.transactions.to_string()));
            rows.push(("transactions per address", format!("{:.4}", stats.transactions_per_address)));
        }
        let (real, cmp) = match load_report(path)? {
            Loaded::Analysis(r) => (*r, None),
            Loaded::Comparison(c) => {
                let c = *c;
                (c.real.clone(), Some(c))
            }
        };
        let cs = &real.component_sizes;
        rows.push(("nodes", cs.nodes.to_string()));
        rows.push(("arcs", cs.arcs.to_string()));
        rows.push(("edge reuse", format!("{:.4}", real.edge_reuse_ratio)));
        rows.push(("weak main component", format!("{} ({:.2}%)", cs.weak_main, 100.0 * cs.weak_main_fraction)));
        rows.push(("strong main component", format!("{} ({:.2}%)", cs.strong_main, 100.0 * cs.strong_main_fraction)));
        rows.push(("ACC", format!("{:.6}", real.graph_acc)));
        rows.push(("ACC main component", format!("{:.6}", real.main_component_acc)));
        rows.push(("ASPL main component", fmt_opt(real.main_component_aspl, 4)));
        if let Some(c) = &cmp {
            rows.push(("random ACC", format!("{:.6}", c.random.graph_acc)));
            rows.push(("random ASPL", fmt_opt(c.random.main_component_aspl, 4)));
            rows.push(("ACC ratio", fmt_opt(c.acc_ratio, 2)));
            rows.push(("ASPL ratio", fmt_opt(c.aspl_ratio, 4)));
            rows.push(("sigma", fmt_opt(c.sigma, 2)));
        }
        if let Some(top) = real.hub_load.first() {
            rows.push(("top hub degree", top.degree.to_string()));
            rows.push(("top hub load", format!("{:.6}", top.load)));
        }
        columns.push((name, rows));
    }

    let mut labels: Vec<&str> = Vec::new();
    for (_, rows) in &columns {
        for (label, _) in rows {
            if !labels.contains(label) {
                labels.push(label);
            }
        }
    }
    let label_width = labels.iter().map(|l| l.len()).max().unwrap_or(0).max("metric".len());
    let widths: Vec<usize> = columns
        .iter()
        .map(|(name, rows)| rows.iter().map(|(_, v)| v.len()).chain([name.len()]).max().unwrap_or(0))
        .collect();

    let mut table = format!("{:<label_width$}", "metric");
    for ((name, _), w) in columns.iter().zip(&widths) {
        let _ = write!(table, "  {name:>w$}");
    }
    table.push('\n');
    for label in labels {
        let _ = write!(table, "{label:<label_width$}");
        for ((_, rows), w) in columns.iter().zip(&widths) {
            let cell = rows.iter().find(|(l, _)| *l == label).map_or("", |(_, v)| v.as_str());
            let _ = write!(table, "  {cell:>w$}");
        }
        table.push('\n');
    }

    match &args.out {
        Some(path) => fs::write(path, table).map_err(data_err(path)),
        None => io::stdout().write_all(table.as_bytes()).map_err(|e| CliError::Data(e.to_string())),
    }
}
