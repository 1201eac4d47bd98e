use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ledger {
    Bitcoin,
    Dogecoin,
    Ethereum,
    EthereumInternal,
    Ripple,
}

impl Ledger {
    pub const ALL: [Ledger; 5] = [
        Ledger::Bitcoin,
        Ledger::Dogecoin,
        Ledger::Ethereum,
        Ledger::EthereumInternal,
        Ledger::Ripple,
    ];

    /// Multi-input/multi-output ledgers.
    pub fn is_utxo(self) -> bool {
        matches!(self, Ledger::Bitcoin | Ledger::Dogecoin)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ledger::Bitcoin => "bitcoin",
            Ledger::Dogecoin => "dogecoin",
            Ledger::Ethereum => "ethereum",
            Ledger::EthereumInternal => "ethereum_internal",
            Ledger::Ripple => "ripple",
        }
    }
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ledger {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Ledger::ALL
            .into_iter()
            .find(|l| l.as_str() == norm)
            .ok_or_else(|| format!("unknown ledger {s:?}"))
    }
}

/// Half-open time window `[start, end)` in seconds since the epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: i64,
    pub end: i64,
}

impl Interval {
    pub fn new(start: i64, end: i64) -> Result<Self, RecordError> {
        if start >= end {
            return Err(RecordError::EmptyInterval { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, t: i64) -> bool {
        self.start <= t && t < self.end
    }

    /// Splits into at most `parts` contiguous, gap-free sub-intervals.
    pub fn split(&self, parts: usize) -> Vec<Interval> {
        let len = (self.end - self.start) as u128;
        let parts = (parts.max(1) as u128).min(len) as i64;
        (0..parts)
            .map(|i| {
                let lo = self.start + ((len * i as u128) / parts as u128) as i64;
                let hi = self.start + ((len * (i as u128 + 1)) / parts as u128) as i64;
                Interval { start: lo, end: hi }
            })
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("record has no senders")]
    NoSenders,
    #[error("record has no recipients")]
    NoRecipients,
    #[error("record contains an empty address")]
    EmptyAddress,
    #[error("{ledger} records carry exactly one sender and one recipient")]
    NotSingleParty { ledger: Ledger },
    #[error("interval start {start} is not before end {end}")]
    EmptyInterval { start: i64, end: i64 },
}

/// One ledger transaction reduced to who paid whom and when.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransactionRecord {
    pub ledger: Ledger,
    pub senders: Vec<String>,
    pub recipients: Vec<String>,
    /// Seconds since the epoch, UTC.
    pub timestamp: i64,
    #[serde(default)]
    pub tx_kind: String,
    /// Ledger-native transaction hash, when the source provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hash: Option<String>,
}

/// Identity used to drop the same transaction seen twice (e.g. at page
/// boundaries).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DedupKey {
    Hash(Ledger, String),
    Content(Ledger, i64, Vec<String>, Vec<String>, String),
}

impl TransactionRecord {
    pub fn validate(&self) -> Result<(), RecordError> {
        if self.senders.is_empty() {
            return Err(RecordError::NoSenders);
        }
        if self.recipients.is_empty() {
            return Err(RecordError::NoRecipients);
        }
        if self.senders.iter().chain(&self.recipients).any(|a| a.is_empty()) {
            return Err(RecordError::EmptyAddress);
        }
        if !self.ledger.is_utxo() && (self.senders.len() != 1 || self.recipients.len() != 1) {
            return Err(RecordError::NotSingleParty { ledger: self.ledger });
        }
        Ok(())
    }

    pub fn dedup_key(&self) -> DedupKey {
        match &self.hash {
            Some(h) => DedupKey::Hash(self.ledger, h.clone()),
            None => DedupKey::Content(
                self.ledger,
                self.timestamp,
                self.senders.clone(),
                self.recipients.clone(),
                self.tx_kind.clone(),
            ),
        }
    }
}

/// A dump line that could not be used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct DumpContents {
    pub records: Vec<TransactionRecord>,
    /// Lines that are not a well-formed record object.
    pub malformed: Vec<RejectedLine>,
    /// Well-formed records that violate record invariants.
    pub invalid: Vec<RejectedLine>,
}

/// Reads newline-delimited records. Blank lines are ignored.
pub fn read_dump<R: BufRead>(input: R) -> io::Result<DumpContents> {
    let mut out = DumpContents::default();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<TransactionRecord>(&line) {
            Ok(rec) => match rec.validate() {
                Ok(()) => out.records.push(rec),
                Err(e) => out.invalid.push(RejectedLine {
                    line: i + 1,
                    reason: e.to_string(),
                }),
            },
            Err(e) => out.malformed.push(RejectedLine {
                line: i + 1,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

pub fn write_dump<'a, W, I>(records: I, out: W) -> io::Result<usize>
where
    W: Write,
    I: IntoIterator<Item = &'a TransactionRecord>,
{
    let mut out = io::BufWriter::new(out);
    let mut n = 0;
    for rec in records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
        n += 1;
    }
    out.flush()?;
    Ok(n)
}
