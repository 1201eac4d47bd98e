//! Per-ledger rules turning transactions into sender→recipient connections.

use serde::{Deserialize, Serialize};

use super::record::{Ledger, TransactionRecord};
use crate::graph::DirectedGraph;

/// Ripple transaction type that moves funds between two accounts.
pub const RIPPLE_PAYMENT: &str = "Payment";

fn distinct(addrs: &[String]) -> Vec<&str> {
    let mut seen = std::collections::HashSet::with_capacity(addrs.len());
    addrs.iter().map(String::as_str).filter(|a| seen.insert(*a)).collect()
}

/// Sender→recipient pairs a transaction contributes to the graph.
///
/// UTXO ledgers link every distinct input address to every distinct output
/// address. Account ledgers yield their single pair; on Ripple only payments
/// count.
pub fn map_to_edges(record: &TransactionRecord) -> Vec<(&str, &str)> {
    match record.ledger {
        Ledger::Bitcoin | Ledger::Dogecoin => {
            let senders = distinct(&record.senders);
            let recipients = distinct(&record.recipients);
            let mut pairs = Vec::with_capacity(senders.len() * recipients.len());
            for &s in &senders {
                for &r in &recipients {
                    pairs.push((s, r));
                }
            }
            pairs
        }
        Ledger::Ethereum | Ledger::EthereumInternal => single_pair(record),
        Ledger::Ripple if record.tx_kind == RIPPLE_PAYMENT => single_pair(record),
        Ledger::Ripple => Vec::new(),
    }
}

fn single_pair(record: &TransactionRecord) -> Vec<(&str, &str)> {
    match (record.senders.first(), record.recipients.first()) {
        (Some(s), Some(r)) => vec![(s.as_str(), r.as_str())],
        _ => Vec::new(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestionStats {
    pub transactions: u64,
    /// Records that produced no connection (e.g. non-payment Ripple types).
    pub filtered_transactions: u64,
    /// Connections before de-duplication, self-transactions included.
    pub binary_connections: u64,
    pub unique_arcs: u64,
    pub self_loops: u64,
    pub nodes: u64,
    pub edge_reuse_ratio: f64,
    /// Transactions per distinct address.
    pub transactions_per_address: f64,
    #[serde(default)]
    pub skipped_records: u64,
}

pub fn build_graph<'a, I>(records: I) -> (DirectedGraph, IngestionStats)
where
    I: IntoIterator<Item = &'a TransactionRecord>,
{
    let mut graph = DirectedGraph::new();
    let mut stats = IngestionStats::default();
    for record in records {
        stats.transactions += 1;
        let pairs = map_to_edges(record);
        if pairs.is_empty() {
            stats.filtered_transactions += 1;
        }
        for (s, r) in pairs {
            stats.binary_connections += 1;
            // only fails for records that skipped validation
            if let Err(e) = graph.add_connection(s, r) {
                log::warn!("dropping connection {s:?} -> {r:?}: {e}");
            }
        }
    }
    stats.unique_arcs = graph.arc_count() as u64;
    stats.self_loops = graph.self_loop_count();
    stats.nodes = graph.node_count() as u64;
    stats.edge_reuse_ratio = graph.edge_reuse_ratio();
    stats.transactions_per_address = if stats.nodes == 0 {
        0.0
    } else {
        stats.transactions as f64 / stats.nodes as f64
    };
    (graph, stats)
}
