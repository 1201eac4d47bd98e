//! Transaction retrieval and graph construction.

pub mod adapters;
pub mod http;
pub mod mapping;
pub mod pagination;
pub mod record;

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

pub use adapters::{adapter_for, Endpoint, LedgerAdapter, WorkUnit};
pub use http::{ApiClient, BackoffPolicy, RecordingSleeper, Sleeper, ThreadSleeper, Transport, UreqTransport};
pub use mapping::{build_graph, map_to_edges, IngestionStats};
pub use pagination::{paginate_ripple, PageInfo, PageRequest};
pub use record::{read_dump, write_dump, Interval, Ledger, RecordError, TransactionRecord};

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("{url} unreachable after {attempts} attempts: {message}")]
    Unreachable { url: String, attempts: u32, message: String },
    #[error("{url} still rate limited after {attempts} attempts")]
    RateLimited { url: String, attempts: u32 },
    #[error("{url} answered HTTP {status}")]
    Http { url: String, status: u16 },
    #[error("unexpected payload from {url}: {message}")]
    Payload { url: String, message: String },
    #[error("invalid fetch configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Http(Endpoint),
    /// Newline-delimited record dump.
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct FetchJob {
    pub ledger: Ledger,
    pub interval: Interval,
    pub workers: usize,
    pub source: Source,
}

impl FetchJob {
    pub fn new(ledger: Ledger, interval: Interval, workers: usize, source: Source) -> Result<Self, FetchError> {
        if interval.start >= interval.end {
            return Err(FetchError::Config(format!("empty interval {interval}")));
        }
        if workers == 0 {
            return Err(FetchError::Config("workers must be at least 1".into()));
        }
        Ok(Self {
            ledger,
            interval,
            workers,
            source,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FailedRange {
    pub unit: WorkUnit,
    pub error: String,
}

#[derive(Debug, Default)]
pub struct FetchOutcome {
    /// Every transaction of the window once, in unit order.
    pub records: Vec<TransactionRecord>,
    /// Units that could not be fetched; re-run them to resume.
    pub failed: Vec<FailedRange>,
    pub malformed: u64,
    pub duplicates: u64,
    pub backoff_pauses: u64,
}

impl FetchOutcome {
    pub fn is_complete(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Units per worker; finer units make failures cheaper to resume.
const UNITS_PER_WORKER: usize = 4;

pub struct Fetcher {
    transport: Arc<dyn Transport>,
    sleeper: Arc<dyn Sleeper>,
    policy: BackoffPolicy,
}

impl Default for Fetcher {
    fn default() -> Self {
        Self::new(Arc::new(UreqTransport::default()), Arc::new(ThreadSleeper), BackoffPolicy::default())
    }
}

impl Fetcher {
    pub fn new(transport: Arc<dyn Transport>, sleeper: Arc<dyn Sleeper>, policy: BackoffPolicy) -> Self {
        Self {
            transport,
            sleeper,
            policy,
        }
    }

    pub fn fetch(&self, job: &FetchJob) -> Result<FetchOutcome, FetchError> {
        match &job.source {
            Source::File(path) => fetch_from_file(job, path),
            Source::Http(endpoint) => {
                let adapter = adapter_for(job.ledger, endpoint.clone());
                self.fetch_with(adapter.as_ref(), job)
            }
        }
    }

    /// Runs `adapter` with a pool of `job.workers` threads.
    pub fn fetch_with(&self, adapter: &dyn LedgerAdapter, job: &FetchJob) -> Result<FetchOutcome, FetchError> {
        let client = ApiClient::new(self.transport.clone(), self.sleeper.clone(), self.policy);
        let units = adapter.plan(&client, job.interval, job.workers * UNITS_PER_WORKER)?;
        log::info!("fetching {} {} in {} units with {} workers", job.ledger, job.interval, units.len(), job.workers);

        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<Result<adapters::UnitOutput, FetchError>>>> =
            Mutex::new((0..units.len()).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..job.workers.min(units.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(unit) = units.get(i) else { break };
                    let result = adapter.fetch_unit(&client, unit, job.interval);
                    if let Err(e) = &result {
                        log::error!("{unit} failed: {e}");
                    }
                    results.lock().unwrap()[i] = Some(result);
                });
            }
        });

        let mut outcome = FetchOutcome {
            backoff_pauses: client.backoff_pauses(),
            ..Default::default()
        };
        let mut batches = Vec::new();
        for (unit, result) in units.into_iter().zip(results.into_inner().unwrap()) {
            match result.expect("every unit is processed") {
                Ok(out) => {
                    outcome.malformed += out.malformed;
                    batches.push(out.records);
                }
                Err(e) => outcome.failed.push(FailedRange {
                    unit,
                    error: e.to_string(),
                }),
            }
        }
        let (records, duplicates) = dedup(batches.into_iter().flatten());
        outcome.records = records;
        outcome.duplicates = duplicates;
        Ok(outcome)
    }
}

/// Fetches with the default HTTP transport and real sleeps.
pub fn fetch_transactions(job: &FetchJob) -> Result<FetchOutcome, FetchError> {
    Fetcher::default().fetch(job)
}

fn dedup(records: impl Iterator<Item = TransactionRecord>) -> (Vec<TransactionRecord>, u64) {
    let mut seen = HashSet::new();
    let mut dupes = 0;
    let kept = records
        .filter(|r| {
            let fresh = seen.insert(r.dedup_key());
            dupes += u64::from(!fresh);
            fresh
        })
        .collect();
    (kept, dupes)
}

fn fetch_from_file(job: &FetchJob, path: &PathBuf) -> Result<FetchOutcome, FetchError> {
    let dump = read_dump(BufReader::new(File::open(path)?))?;
    let matching = dump
        .records
        .into_iter()
        .filter(|r| r.ledger == job.ledger && job.interval.contains(r.timestamp));
    let (records, duplicates) = dedup(matching);
    Ok(FetchOutcome {
        records,
        failed: Vec::new(),
        malformed: (dump.malformed.len() + dump.invalid.len()) as u64,
        duplicates,
        backoff_pauses: 0,
    })
}
