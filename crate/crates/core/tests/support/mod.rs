//! Helpers shared by the integration suites: small graph builders,
//! brute-force oracles and a scripted HTTP server.

#![allow(dead_code)]

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;

use ledgergraph::graph::weak_labels;
use ledgergraph::nullmodel::{erdos_renyi, EdgeTarget, RandomGraphSpec};
use ledgergraph::{DirectedGraph, NodeId};

pub fn graph(n: usize, arcs: &[(u32, u32)]) -> DirectedGraph {
    let mut g = DirectedGraph::with_nodes(n);
    for &(s, d) in arcs {
        g.add_arc(NodeId(s), NodeId(d)).unwrap();
    }
    g
}

pub fn gnm(n: usize, m: u64, seed: u64) -> DirectedGraph {
    erdos_renyi(&RandomGraphSpec {
        node_count: n,
        target: EdgeTarget::Count(m),
        directed: true,
        seed,
    })
    .unwrap()
}

/// Dense boolean adjacency matrix, optionally symmetrized.
pub fn matrix(g: &DirectedGraph, undirected: bool) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (s, d) in g.arcs() {
        a[s.index()][d.index()] = true;
        if undirected {
            a[d.index()][s.index()] = true;
        }
    }
    a
}

/// Hop distance between every ordered pair by BFS over the dense matrix.
pub fn all_pairs(g: &DirectedGraph, undirected: bool) -> Vec<Vec<Option<u32>>> {
    let a = matrix(g, undirected);
    let n = a.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in 0..n {
                    if a[v][w] && dist[w].is_none() {
                        dist[w] = Some(dist[v].unwrap() + 1);
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect()
}

/// Mean distance over reachable ordered pairs of `members`, as an exact
/// fraction (sum, pairs).
pub fn aspl_oracle(g: &DirectedGraph, members: &[NodeId], undirected: bool) -> (u64, u64) {
    let mut keep = vec![false; g.node_count()];
    for v in members {
        keep[v.index()] = true;
    }
    let mut induced = DirectedGraph::with_nodes(g.node_count());
    for (s, d) in g.arcs() {
        if keep[s.index()] && keep[d.index()] {
            induced.add_arc(s, d).unwrap();
        }
    }
    let dist = all_pairs(&induced, undirected);
    let (mut sum, mut pairs) = (0, 0);
    for &s in members {
        for &t in members {
            if s != t {
                if let Some(d) = dist[s.index()][t.index()] {
                    sum += d as u64;
                    pairs += 1;
                }
            }
        }
    }
    (sum, pairs)
}

/// Average of (triangles through v) / (neighbor pairs of v) on the
/// undirected projection, counted over all vertex triples.
pub fn clustering_oracle(g: &DirectedGraph) -> f64 {
    let a = matrix(g, true);
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for v in 0..n {
        let k = (0..n).filter(|&u| u != v && a[v][u]).count();
        if k < 2 {
            continue;
        }
        let mut triangles = 0u64;
        for u in 0..n {
            for w in u + 1..n {
                if u != v && w != v && a[v][u] && a[v][w] && a[u][w] {
                    triangles += 1;
                }
            }
        }
        total += triangles as f64 / (k * (k - 1) / 2) as f64;
    }
    total / n as f64
}

/// Load centrality by listing every shortest path explicitly. Each path of
/// a pair with `p` shortest paths adds 1/p to its interior nodes; totals
/// are normalized by (n−1)(n−2) of the weak component.
pub fn load_oracle(g: &DirectedGraph, undirected: bool) -> Vec<f64> {
    let n = g.node_count();
    let a = matrix(g, undirected);
    let dist = all_pairs(g, undirected);
    let labels = weak_labels(g);
    let mut load = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            let Some(d) = dist[s][t] else { continue };
            if s == t || d < 2 {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let v = *path.last().unwrap();
                if v == t {
                    paths.push(path);
                    continue;
                }
                let here = dist[s][v].unwrap();
                for w in 0..n {
                    // w lies on a shortest s→t path iff it extends the prefix
                    // and still reaches t in time
                    if a[v][w] && dist[s][w] == Some(here + 1) && dist[w][t].is_some_and(|r| here + 1 + r == d) {
                        let mut next = path.clone();
                        next.push(w);
                        stack.push(next);
                    }
                }
            }
            let share = 1.0 / paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    load[v] += share;
                }
            }
        }
    }
    for v in 0..n {
        let size = labels.iter().filter(|&&l| l == labels[v]).count();
        load[v] = if size < 3 { 0.0 } else { load[v] / ((size - 1) * (size - 2)) as f64 };
    }
    load
}

/// One scripted reply.
pub struct Reply {
    pub status: u16,
    pub body: String,
}

impl Reply {
    pub fn ok(body: impl Into<String>) -> Self {
        Self {
            status: 200,
            body: body.into(),
        }
    }

    pub fn status(status: u16) -> Self {
        Self {
            status,
            body: String::new(),
        }
    }
}

type Handler = dyn Fn(&str) -> Reply + Send + Sync;

/// Minimal HTTP/1.1 server on a loopback port. Every connection carries one
/// request and is closed after the reply.
pub struct FixtureServer {
    pub base_url: String,
    requests: Arc<Mutex<Vec<String>>>,
}

impl FixtureServer {
    pub fn start(handler: impl Fn(&str) -> Reply + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base_url = format!("http://{}", listener.local_addr().unwrap());
        let requests = Arc::new(Mutex::new(Vec::new()));
        let log = requests.clone();
        let handler: Arc<Handler> = Arc::new(handler);
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let handler = handler.clone();
                let log = log.clone();
                thread::spawn(move || serve(stream, &*handler, &log));
            }
        });
        Self { base_url, requests }
    }

    /// Request targets (path and query) in arrival order.
    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().unwrap().clone()
    }
}

fn serve(stream: TcpStream, handler: &Handler, log: &Mutex<Vec<String>>) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    loop {
        let mut header = String::new();
        match reader.read_line(&mut header) {
            Ok(0) | Err(_) => break,
            Ok(_) if header == "\r\n" || header == "\n" => break,
            Ok(_) => {}
        }
    }
    let target = request_line.split_whitespace().nth(1).unwrap_or("/").to_owned();
    log.lock().unwrap().push(target.clone());
    let reply = handler(&target);
    let head = format!(
        "HTTP/1.1 {} Fixture\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        reply.status,
        reply.body.len()
    );
    let mut stream = stream;
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(reply.body.as_bytes());
    let _ = stream.flush();
}

/// Value of `key` in a request target's query string.
pub fn query_param<'a>(target: &'a str, key: &str) -> Option<&'a str> {
    target
        .split_once('?')?
        .1
        .split('&')
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v)
}

/// A synthetic Ripple payment.
#[derive(Clone, Debug)]
pub struct RipplePayment {
    pub hash: String,
    pub timestamp: i64,
    pub from: String,
    pub to: String,
}

/// `n` payments spread one every `step` seconds from `start`, between
/// accounts drawn from a pool of `accounts`.
pub fn ripple_payments(n: usize, start: i64, step: i64, accounts: usize) -> Vec<RipplePayment> {
    (0..n)
        .map(|i| RipplePayment {
            hash: format!("{i:064X}"),
            timestamp: start + i as i64 * step,
            from: format!("r{}", i % accounts),
            to: format!("r{}", (i * 7 + 3) % accounts),
        })
        .collect()
}

fn rfc3339(ts: i64) -> String {
    chrono::DateTime::from_timestamp(ts, 0).unwrap().format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

fn parse_rfc3339(s: &str) -> i64 {
    chrono::DateTime::parse_from_rfc3339(s).unwrap().timestamp()
}

/// Serves `/v2/transactions` over `payments` with the real API's paging:
/// at most `limit` (≤ 100) entries per page and a `marker` whenever more
/// remain. The first `throttled` requests are answered with 429.
pub fn ripple_server(payments: Vec<RipplePayment>, throttled: usize) -> FixtureServer {
    let remaining = Mutex::new(throttled);
    FixtureServer::start(move |target| {
        {
            let mut left = remaining.lock().unwrap();
            if *left > 0 {
                *left -= 1;
                return Reply::status(429);
            }
        }
        if !target.starts_with("/v2/transactions") {
            return Reply::status(404);
        }
        let start = parse_rfc3339(query_param(target, "start").unwrap());
        let end = parse_rfc3339(query_param(target, "end").unwrap());
        let limit: usize = query_param(target, "limit").unwrap().parse::<usize>().unwrap().min(100);
        let offset: usize = query_param(target, "marker").map_or(0, |m| m.parse().unwrap());
        let window: Vec<&RipplePayment> = payments.iter().filter(|p| p.timestamp >= start && p.timestamp <= end).collect();
        let page = &window[offset.min(window.len())..(offset + limit).min(window.len())];
        let txs: Vec<serde_json::Value> = page
            .iter()
            .map(|p| {
                serde_json::json!({
                    "hash": p.hash,
                    "date": rfc3339(p.timestamp),
                    "tx": {"TransactionType": "Payment", "Account": p.from, "Destination": p.to},
                })
            })
            .collect();
        let mut body = serde_json::json!({"result": "success", "count": txs.len(), "transactions": txs});
        if offset + limit < window.len() {
            body["marker"] = serde_json::json!((offset + limit).to_string());
        }
        Reply::ok(body.to_string())
    })
}

/// Ledger-shaped account transactions over `n` addresses: each new address
/// pays one or two earlier ones, picked mostly by how often they have been
/// paid so far, and the busiest early addresses pay out to random ones.
/// Hub-dominated and mostly acyclic, like a day of real account-ledger
/// traffic.
pub fn ledger_like_records(n: usize, seed: u64) -> Vec<ledgergraph::ingest::TransactionRecord> {
    use ledgergraph::ingest::{Ledger, TransactionRecord};
    use rand::seq::IndexedRandom;
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let address = |i: usize| format!("0x{i:040x}");
    let record = |s: usize, r: usize, t: usize| TransactionRecord {
        ledger: Ledger::Ethereum,
        senders: vec![address(s)],
        recipients: vec![address(r)],
        timestamp: t as i64,
        tx_kind: "transaction".into(),
        hash: None,
    };
    let mut paid: Vec<usize> = vec![0, 1];
    let mut records = Vec::new();
    for v in 2..n {
        for _ in 0..*[1, 1, 2].choose(&mut rng).unwrap() {
            let to = if rng.random::<f64>() < 0.8 {
                *paid.choose(&mut rng).unwrap()
            } else {
                rng.random_range(0..v)
            };
            records.push(record(v, to, records.len()));
            paid.push(to);
        }
        paid.push(v);
    }
    let payers: Vec<usize> = (0..50.min(n)).collect();
    for _ in 0..n / 10 {
        let from = *payers.choose(&mut rng).unwrap();
        let to = rng.random_range(0..n);
        records.push(record(from, to, records.len()));
    }
    records
}
