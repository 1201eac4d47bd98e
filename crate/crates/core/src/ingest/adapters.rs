//! Explorer adapters: each turns one explorer's JSON into
//! [`TransactionRecord`]s.
//!
//! Time-windowed explorers (Ripple) are paginated directly. Block-oriented
//! explorers first locate the block range covering the window by binary
//! search over block timestamps, then fetch blocks one at a time.

use serde::Serialize;
use serde_json::Value;

use super::http::ApiClient;
use super::pagination::{paginate_ripple, PageInfo, RIPPLE_MAX_PAGE};
use super::record::{Interval, Ledger, TransactionRecord};
use super::FetchError;

/// A slice of a fetch that one worker handles and that can be retried alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkUnit {
    Time(Interval),
    /// Blocks `[first, end)`.
    Blocks { first: u64, end: u64 },
}

impl std::fmt::Display for WorkUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WorkUnit::Time(iv) => write!(f, "time {iv}"),
            WorkUnit::Blocks { first, end } => write!(f, "blocks [{first}, {end})"),
        }
    }
}

#[derive(Debug, Default)]
pub struct UnitOutput {
    pub records: Vec<TransactionRecord>,
    /// Transactions in the payload that could not be parsed.
    pub malformed: u64,
}

pub trait LedgerAdapter: Send + Sync {
    fn ledger(&self) -> Ledger;

    /// Splits the window into independently fetchable units.
    fn plan(&self, client: &ApiClient, interval: Interval, units: usize) -> Result<Vec<WorkUnit>, FetchError>;

    /// Fetches one unit, keeping only transactions inside `interval`.
    fn fetch_unit(&self, client: &ApiClient, unit: &WorkUnit, interval: Interval) -> Result<UnitOutput, FetchError>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub base_url: String,
    pub api_key: Option<String>,
}

impl Endpoint {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            api_key: None,
        }
    }

    pub fn default_for(ledger: Ledger) -> Self {
        Self::new(match ledger {
            Ledger::Ripple => "https://data.ripple.com",
            Ledger::Ethereum | Ledger::EthereumInternal => "https://api.etherscan.io/api",
            Ledger::Bitcoin => "https://blockchain.info",
            Ledger::Dogecoin => "https://sochain.com",
        })
    }
}

pub fn adapter_for(ledger: Ledger, endpoint: Endpoint) -> Box<dyn LedgerAdapter> {
    match ledger {
        Ledger::Ripple => Box::new(RippleDataApi { endpoint }),
        Ledger::Ethereum => Box::new(BlockAdapter(Etherscan { endpoint })),
        Ledger::EthereumInternal => Box::new(EtherscanInternal {
            blocks: Etherscan { endpoint },
        }),
        Ledger::Bitcoin => Box::new(BlockAdapter(BlockchainInfo { endpoint })),
        Ledger::Dogecoin => Box::new(BlockAdapter(SoChain { endpoint })),
    }
}

fn payload_err(url: &str, message: impl Into<String>) -> FetchError {
    FetchError::Payload {
        url: url.to_owned(),
        message: message.into(),
    }
}

fn rfc3339(ts: i64) -> String {
    chrono::DateTime::from_timestamp(ts, 0)
        .map(|d| d.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_default()
}

fn str_field<'a>(v: &'a Value, key: &str) -> Option<&'a str> {
    v.get(key).and_then(Value::as_str).filter(|s| !s.is_empty())
}

fn hex_u64(s: &str) -> Option<u64> {
    u64::from_str_radix(s.trim_start_matches("0x"), 16).ok()
}

/// Integer given either as JSON number or decimal string.
fn int_field(v: &Value, key: &str) -> Option<i64> {
    match v.get(key)? {
        Value::Number(n) => n.as_i64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Ripple data API v2

pub struct RippleDataApi {
    pub endpoint: Endpoint,
}

/// Parses one entry of a `/v2/transactions` response. `Ok(None)` for
/// transaction types without a counterparty.
pub fn parse_ripple_tx(v: &Value) -> Result<Option<TransactionRecord>, String> {
    let date = str_field(v, "date").ok_or("missing date")?;
    let timestamp = chrono::DateTime::parse_from_rfc3339(date)
        .map_err(|e| format!("bad date {date:?}: {e}"))?
        .timestamp();
    let tx = v.get("tx").ok_or("missing tx")?;
    let kind = str_field(tx, "TransactionType").ok_or("missing TransactionType")?;
    let account = str_field(tx, "Account").ok_or("missing Account")?;
    let Some(destination) = str_field(tx, "Destination") else {
        return Ok(None);
    };
    Ok(Some(TransactionRecord {
        ledger: Ledger::Ripple,
        senders: vec![account.to_owned()],
        recipients: vec![destination.to_owned()],
        timestamp,
        tx_kind: kind.to_owned(),
        hash: str_field(v, "hash").map(str::to_owned),
    }))
}

impl LedgerAdapter for RippleDataApi {
    fn ledger(&self) -> Ledger {
        Ledger::Ripple
    }

    fn plan(&self, _client: &ApiClient, interval: Interval, units: usize) -> Result<Vec<WorkUnit>, FetchError> {
        Ok(interval.split(units).into_iter().map(WorkUnit::Time).collect())
    }

    fn fetch_unit(&self, client: &ApiClient, unit: &WorkUnit, interval: Interval) -> Result<UnitOutput, FetchError> {
        let WorkUnit::Time(window) = unit else {
            return Err(FetchError::Config(format!("ripple cannot fetch {unit}")));
        };
        let mut malformed = 0u64;
        let (records, _) = paginate_ripple(*window, RIPPLE_MAX_PAGE, |req| {
            let mut url = format!(
                "{}/v2/transactions?start={}&end={}&limit={}&descending=false",
                self.endpoint.base_url,
                rfc3339(req.interval.start),
                rfc3339(req.interval.end),
                req.limit
            );
            if let Some(m) = &req.marker {
                url.push_str("&marker=");
                url.push_str(m);
            }
            let body = client.get_json(&url)?;
            let txs = body
                .get("transactions")
                .and_then(Value::as_array)
                .ok_or_else(|| payload_err(&url, "missing transactions array"))?;
            let mut page = Vec::new();
            let mut last_timestamp = None;
            for tx in txs {
                match parse_ripple_tx(tx) {
                    Ok(Some(rec)) => {
                        last_timestamp = Some(rec.timestamp);
                        if window.contains(rec.timestamp) && interval.contains(rec.timestamp) {
                            page.push(rec);
                        }
                    }
                    Ok(None) => {}
                    Err(e) => {
                        log::debug!("skipping ripple transaction: {e}");
                        malformed += 1;
                    }
                }
            }
            let info = PageInfo {
                len: txs.len(),
                marker: str_field(&body, "marker").map(str::to_owned),
                last_timestamp,
            };
            Ok((page, info))
        })?;
        Ok(UnitOutput { records, malformed })
    }
}

// ---------------------------------------------------------------------------
// Block-oriented explorers

pub trait BlockExplorer: Send + Sync {
    fn ledger(&self) -> Ledger;
    /// Height of the newest block.
    fn tip(&self, client: &ApiClient) -> Result<u64, FetchError>;
    fn block_time(&self, client: &ApiClient, height: u64) -> Result<i64, FetchError>;
    fn block_records(&self, client: &ApiClient, height: u64) -> Result<UnitOutput, FetchError>;
}

/// First height in `[lo, hi)` whose timestamp is `>= t`, or `hi`.
fn lower_bound<E: BlockExplorer + ?Sized>(
    explorer: &E,
    client: &ApiClient,
    mut lo: u64,
    mut hi: u64,
    t: i64,
) -> Result<u64, FetchError> {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if explorer.block_time(client, mid)? < t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Blocks `[first, end)` whose timestamps fall in the window, assuming
/// timestamps are non-decreasing in height.
pub fn locate_blocks<E: BlockExplorer + ?Sized>(
    explorer: &E,
    client: &ApiClient,
    interval: Interval,
) -> Result<(u64, u64), FetchError> {
    let top = explorer.tip(client)? + 1;
    let first = lower_bound(explorer, client, 0, top, interval.start)?;
    let end = lower_bound(explorer, client, first, top, interval.end)?;
    Ok((first, end))
}

fn split_blocks(first: u64, end: u64, units: usize) -> Vec<WorkUnit> {
    if first >= end {
        return Vec::new();
    }
    let count = end - first;
    let chunk = count.div_ceil(units.max(1) as u64).max(1);
    (first..end)
        .step_by(chunk as usize)
        .map(|lo| WorkUnit::Blocks {
            first: lo,
            end: (lo + chunk).min(end),
        })
        .collect()
}

pub struct BlockAdapter<E>(pub E);

impl<E: BlockExplorer> LedgerAdapter for BlockAdapter<E> {
    fn ledger(&self) -> Ledger {
        self.0.ledger()
    }

    fn plan(&self, client: &ApiClient, interval: Interval, units: usize) -> Result<Vec<WorkUnit>, FetchError> {
        let (first, end) = locate_blocks(&self.0, client, interval)?;
        Ok(split_blocks(first, end, units))
    }

    fn fetch_unit(&self, client: &ApiClient, unit: &WorkUnit, interval: Interval) -> Result<UnitOutput, FetchError> {
        let WorkUnit::Blocks { first, end } = *unit else {
            return Err(FetchError::Config(format!("{} cannot fetch {unit}", self.ledger())));
        };
        let mut out = UnitOutput::default();
        for h in first..end {
            let block = self.0.block_records(client, h)?;
            out.malformed += block.malformed;
            out.records
                .extend(block.records.into_iter().filter(|r| interval.contains(r.timestamp)));
        }
        Ok(out)
    }
}

/// Etherscan proxy module (`eth_blockNumber`, `eth_getBlockByNumber`).
pub struct Etherscan {
    pub endpoint: Endpoint,
}

impl Etherscan {
    fn url(&self, query: &str) -> String {
        let mut url = format!("{}?{}", self.endpoint.base_url, query);
        if let Some(key) = &self.endpoint.api_key {
            url.push_str("&apikey=");
            url.push_str(key);
        }
        url
    }

    fn block(&self, client: &ApiClient, height: u64, full: bool) -> Result<(String, Value), FetchError> {
        let url = self.url(&format!(
            "module=proxy&action=eth_getBlockByNumber&tag=0x{height:x}&boolean={full}"
        ));
        let body = client.get_json(&url)?;
        let block = body
            .get("result")
            .filter(|r| r.is_object())
            .cloned()
            .ok_or_else(|| payload_err(&url, "missing block object"))?;
        Ok((url, block))
    }
}

/// Parses one transaction object of an `eth_getBlockByNumber` result.
/// Contract creations (no `to`) yield `Ok(None)`.
pub fn parse_ethereum_tx(v: &Value, timestamp: i64) -> Result<Option<TransactionRecord>, String> {
    let from = str_field(v, "from").ok_or("missing from")?;
    let Some(to) = str_field(v, "to") else {
        return Ok(None);
    };
    Ok(Some(TransactionRecord {
        ledger: Ledger::Ethereum,
        senders: vec![from.to_ascii_lowercase()],
        recipients: vec![to.to_ascii_lowercase()],
        timestamp,
        tx_kind: "transaction".into(),
        hash: str_field(v, "hash").map(str::to_owned),
    }))
}

impl BlockExplorer for Etherscan {
    fn ledger(&self) -> Ledger {
        Ledger::Ethereum
    }

    fn tip(&self, client: &ApiClient) -> Result<u64, FetchError> {
        let url = self.url("module=proxy&action=eth_blockNumber");
        let body = client.get_json(&url)?;
        str_field(&body, "result")
            .and_then(hex_u64)
            .ok_or_else(|| payload_err(&url, "missing block number"))
    }

    fn block_time(&self, client: &ApiClient, height: u64) -> Result<i64, FetchError> {
        let (url, block) = self.block(client, height, false)?;
        str_field(&block, "timestamp")
            .and_then(hex_u64)
            .map(|t| t as i64)
            .ok_or_else(|| payload_err(&url, "missing timestamp"))
    }

    fn block_records(&self, client: &ApiClient, height: u64) -> Result<UnitOutput, FetchError> {
        let (url, block) = self.block(client, height, true)?;
        let timestamp = str_field(&block, "timestamp")
            .and_then(hex_u64)
            .ok_or_else(|| payload_err(&url, "missing timestamp"))? as i64;
        let mut out = UnitOutput::default();
        for tx in block.get("transactions").and_then(Value::as_array).into_iter().flatten() {
            match parse_ethereum_tx(tx, timestamp) {
                Ok(Some(r)) => out.records.push(r),
                Ok(None) => {}
                Err(_) => out.malformed += 1,
            }
        }
        Ok(out)
    }
}

/// Etherscan `txlistinternal` over block ranges.
pub struct EtherscanInternal {
    pub blocks: Etherscan,
}

const ETHERSCAN_PAGE: usize = 1000;

/// Parses one `txlistinternal` item. Failed calls yield `Ok(None)`.
pub fn parse_internal_tx(v: &Value) -> Result<Option<TransactionRecord>, String> {
    if str_field(v, "isError") == Some("1") {
        return Ok(None);
    }
    let from = str_field(v, "from").ok_or("missing from")?;
    let timestamp = int_field(v, "timeStamp").ok_or("missing timeStamp")?;
    let Some(to) = str_field(v, "to") else {
        return Ok(None);
    };
    // several internal transactions share the parent hash; the trace id
    // tells them apart
    let hash = match (str_field(v, "hash"), str_field(v, "traceId")) {
        (Some(h), Some(t)) => Some(format!("{h}:{t}")),
        _ => None,
    };
    Ok(Some(TransactionRecord {
        ledger: Ledger::EthereumInternal,
        senders: vec![from.to_ascii_lowercase()],
        recipients: vec![to.to_ascii_lowercase()],
        timestamp,
        tx_kind: str_field(v, "type").unwrap_or("call").to_owned(),
        hash,
    }))
}

impl LedgerAdapter for EtherscanInternal {
    fn ledger(&self) -> Ledger {
        Ledger::EthereumInternal
    }

    fn plan(&self, client: &ApiClient, interval: Interval, units: usize) -> Result<Vec<WorkUnit>, FetchError> {
        let (first, end) = locate_blocks(&self.blocks, client, interval)?;
        Ok(split_blocks(first, end, units))
    }

    fn fetch_unit(&self, client: &ApiClient, unit: &WorkUnit, interval: Interval) -> Result<UnitOutput, FetchError> {
        let WorkUnit::Blocks { first, end } = *unit else {
            return Err(FetchError::Config(format!("ethereum_internal cannot fetch {unit}")));
        };
        let mut out = UnitOutput::default();
        for page in 1.. {
            let url = self.blocks.url(&format!(
                "module=account&action=txlistinternal&startblock={first}&endblock={}&page={page}&offset={ETHERSCAN_PAGE}&sort=asc",
                end - 1
            ));
            let body = client.get_json(&url)?;
            let items = match body.get("result") {
                Some(Value::Array(items)) => items,
                _ => return Err(payload_err(&url, "missing result array")),
            };
            for item in items {
                match parse_internal_tx(item) {
                    Ok(Some(r)) if interval.contains(r.timestamp) => out.records.push(r),
                    Ok(_) => {}
                    Err(_) => out.malformed += 1,
                }
            }
            if items.len() < ETHERSCAN_PAGE {
                break;
            }
        }
        Ok(out)
    }
}

/// blockchain.info JSON API.
pub struct BlockchainInfo {
    pub endpoint: Endpoint,
}

impl BlockchainInfo {
    fn block(&self, client: &ApiClient, height: u64) -> Result<(String, Value), FetchError> {
        let url = format!("{}/block-height/{height}?format=json", self.endpoint.base_url);
        let body = client.get_json(&url)?;
        let blocks = body
            .get("blocks")
            .and_then(Value::as_array)
            .ok_or_else(|| payload_err(&url, "missing blocks array"))?;
        let block = blocks
            .iter()
            .find(|b| b.get("main_chain").and_then(Value::as_bool) == Some(true))
            .or_else(|| blocks.first())
            .cloned()
            .ok_or_else(|| payload_err(&url, "no block at height"))?;
        Ok((url, block))
    }
}

/// Parses one transaction of a blockchain.info block. Coinbase transactions
/// (no spending addresses) yield `Ok(None)`.
pub fn parse_bitcoin_tx(v: &Value, timestamp: i64) -> Result<Option<TransactionRecord>, String> {
    let inputs = v.get("inputs").and_then(Value::as_array).ok_or("missing inputs")?;
    let outputs = v.get("out").and_then(Value::as_array).ok_or("missing out")?;
    let senders: Vec<String> = inputs
        .iter()
        .filter_map(|i| i.get("prev_out").and_then(|p| str_field(p, "addr")))
        .map(str::to_owned)
        .collect();
    let recipients: Vec<String> = outputs.iter().filter_map(|o| str_field(o, "addr")).map(str::to_owned).collect();
    if senders.is_empty() || recipients.is_empty() {
        return Ok(None);
    }
    Ok(Some(TransactionRecord {
        ledger: Ledger::Bitcoin,
        senders,
        recipients,
        timestamp,
        tx_kind: "transaction".into(),
        hash: str_field(v, "hash").map(str::to_owned),
    }))
}

impl BlockExplorer for BlockchainInfo {
    fn ledger(&self) -> Ledger {
        Ledger::Bitcoin
    }

    fn tip(&self, client: &ApiClient) -> Result<u64, FetchError> {
        let url = format!("{}/latestblock", self.endpoint.base_url);
        let body = client.get_json(&url)?;
        body.get("height")
            .and_then(Value::as_u64)
            .ok_or_else(|| payload_err(&url, "missing height"))
    }

    fn block_time(&self, client: &ApiClient, height: u64) -> Result<i64, FetchError> {
        let (url, block) = self.block(client, height)?;
        int_field(&block, "time").ok_or_else(|| payload_err(&url, "missing time"))
    }

    fn block_records(&self, client: &ApiClient, height: u64) -> Result<UnitOutput, FetchError> {
        let (url, block) = self.block(client, height)?;
        let timestamp = int_field(&block, "time").ok_or_else(|| payload_err(&url, "missing time"))?;
        let mut out = UnitOutput::default();
        for tx in block.get("tx").and_then(Value::as_array).into_iter().flatten() {
            match parse_bitcoin_tx(tx, timestamp) {
                Ok(Some(r)) => out.records.push(r),
                Ok(None) => {}
                Err(_) => out.malformed += 1,
            }
        }
        Ok(out)
    }
}

/// SoChain v2 API for Dogecoin.
pub struct SoChain {
    pub endpoint: Endpoint,
}

impl SoChain {
    fn data(&self, client: &ApiClient, path: &str) -> Result<(String, Value), FetchError> {
        let url = format!("{}/api/v2/{path}", self.endpoint.base_url);
        let body = client.get_json(&url)?;
        if str_field(&body, "status") != Some("success") {
            return Err(payload_err(&url, "status is not success"));
        }
        let data = body.get("data").cloned().ok_or_else(|| payload_err(&url, "missing data"))?;
        Ok((url, data))
    }
}

/// Parses a SoChain `get_tx` data object.
pub fn parse_dogecoin_tx(v: &Value, fallback_time: i64) -> Result<Option<TransactionRecord>, String> {
    let inputs = v.get("inputs").and_then(Value::as_array).ok_or("missing inputs")?;
    let outputs = v.get("outputs").and_then(Value::as_array).ok_or("missing outputs")?;
    let addrs = |items: &Vec<Value>| -> Vec<String> {
        items
            .iter()
            .filter_map(|i| str_field(i, "address"))
            .filter(|a| *a != "coinbase" && *a != "nonstandard")
            .map(str::to_owned)
            .collect()
    };
    let (senders, recipients) = (addrs(inputs), addrs(outputs));
    if senders.is_empty() || recipients.is_empty() {
        return Ok(None);
    }
    Ok(Some(TransactionRecord {
        ledger: Ledger::Dogecoin,
        senders,
        recipients,
        timestamp: int_field(v, "time").unwrap_or(fallback_time),
        tx_kind: "transaction".into(),
        hash: str_field(v, "txid").map(str::to_owned),
    }))
}

impl BlockExplorer for SoChain {
    fn ledger(&self) -> Ledger {
        Ledger::Dogecoin
    }

    fn tip(&self, client: &ApiClient) -> Result<u64, FetchError> {
        let (url, data) = self.data(client, "get_info/DOGE")?;
        data.get("blocks")
            .and_then(Value::as_u64)
            .ok_or_else(|| payload_err(&url, "missing blocks"))
    }

    fn block_time(&self, client: &ApiClient, height: u64) -> Result<i64, FetchError> {
        let (url, data) = self.data(client, &format!("get_block/DOGE/{height}"))?;
        int_field(&data, "time").ok_or_else(|| payload_err(&url, "missing time"))
    }

    fn block_records(&self, client: &ApiClient, height: u64) -> Result<UnitOutput, FetchError> {
        let (url, data) = self.data(client, &format!("get_block/DOGE/{height}"))?;
        let time = int_field(&data, "time").ok_or_else(|| payload_err(&url, "missing time"))?;
        let mut out = UnitOutput::default();
        for txid in data.get("txs").and_then(Value::as_array).into_iter().flatten() {
            let Some(txid) = txid.as_str() else {
                out.malformed += 1;
                continue;
            };
            let (_, tx) = self.data(client, &format!("get_tx/DOGE/{txid}"))?;
            match parse_dogecoin_tx(&tx, time) {
                Ok(Some(r)) => out.records.push(r),
                Ok(None) => {}
                Err(_) => out.malformed += 1,
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn ripple_payment_and_account_set() {
        let pay = json!({
            "hash": "ABC",
            "date": "2020-09-01T00:00:10+00:00",
            "tx": {"TransactionType": "Payment", "Account": "rA", "Destination": "rB"}
        });
        let r = parse_ripple_tx(&pay).unwrap().unwrap();
        assert_eq!(r.timestamp, 1_598_918_410);
        assert_eq!((r.senders[0].as_str(), r.recipients[0].as_str()), ("rA", "rB"));
        assert_eq!(r.tx_kind, "Payment");
        assert_eq!(r.hash.as_deref(), Some("ABC"));

        let set = json!({"date": "2020-09-01T00:00:10Z", "tx": {"TransactionType": "AccountSet", "Account": "rA"}});
        assert_eq!(parse_ripple_tx(&set).unwrap(), None);
        assert!(parse_ripple_tx(&json!({"tx": {}})).is_err());
    }

    #[test]
    fn ethereum_tx_parsing() {
        let tx = json!({"hash": "0x1", "from": "0xAB", "to": "0xCD"});
        let r = parse_ethereum_tx(&tx, 7).unwrap().unwrap();
        assert_eq!((r.senders[0].as_str(), r.recipients[0].as_str(), r.timestamp), ("0xab", "0xcd", 7));
        assert_eq!(parse_ethereum_tx(&json!({"from": "0xab", "to": null}), 7).unwrap(), None);
    }

    #[test]
    fn internal_tx_parsing() {
        let ok = json!({"hash": "0xh", "traceId": "0_1", "from": "0xa", "to": "0xb", "timeStamp": "1598918400", "type": "call", "isError": "0"});
        let r = parse_internal_tx(&ok).unwrap().unwrap();
        assert_eq!(r.hash.as_deref(), Some("0xh:0_1"));
        assert_eq!(r.timestamp, 1_598_918_400);
        let failed = json!({"from": "0xa", "to": "0xb", "timeStamp": "1", "isError": "1"});
        assert_eq!(parse_internal_tx(&failed).unwrap(), None);
    }

    #[test]
    fn bitcoin_tx_parsing() {
        let tx = json!({
            "hash": "h",
            "inputs": [{"prev_out": {"addr": "a"}}, {"prev_out": {"addr": "b"}}],
            "out": [{"addr": "c"}, {"script": "6a"}, {"addr": "d"}]
        });
        let r = parse_bitcoin_tx(&tx, 1).unwrap().unwrap();
        assert_eq!(r.senders, vec!["a", "b"]);
        assert_eq!(r.recipients, vec!["c", "d"]);
        let coinbase = json!({"inputs": [{"sequence": 0}], "out": [{"addr": "m"}]});
        assert_eq!(parse_bitcoin_tx(&coinbase, 1).unwrap(), None);
    }

    #[test]
    fn dogecoin_tx_parsing() {
        let tx = json!({"txid": "t", "time": 5, "inputs": [{"address": "D1"}], "outputs": [{"address": "D2"}, {"address": "D3"}]});
        let r = parse_dogecoin_tx(&tx, 0).unwrap().unwrap();
        assert_eq!(r.recipients.len(), 2);
        assert_eq!(r.timestamp, 5);
    }

    #[test]
    fn block_split_covers_range() {
        let units = split_blocks(10, 21, 3);
        assert_eq!(
            units,
            vec![
                WorkUnit::Blocks { first: 10, end: 14 },
                WorkUnit::Blocks { first: 14, end: 18 },
                WorkUnit::Blocks { first: 18, end: 21 },
            ]
        );
        assert!(split_blocks(5, 5, 4).is_empty());
    }
}
