//! Erdős–Rényi null model and the small-world coefficient
//! σ = (C / C_r) / (L / L_r).

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedGraph, NodeId};
use crate::metrics::{analyze_timed, AnalysisConfig, MetricsError, MetricsReport, PhaseTiming};

#[derive(Debug, Error, PartialEq)]
pub enum NullModelError {
    #[error("{edges} edges do not fit in {pairs} node pairs")]
    TooManyEdges { edges: u64, pairs: u64 },
    #[error("edge probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("graph exceeds {} nodes", u32::MAX)]
    TooManyNodes,
    #[error("Watts–Strogatz needs an even k with 0 < k < n and β in [0, 1]")]
    InvalidLattice,
    #[error("real graph is empty")]
    EmptyGraph,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTarget {
    /// G(n, m): exactly m distinct arcs.
    Count(u64),
    /// G(n, p): every pair independently with probability p.
    Probability(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    pub node_count: usize,
    pub target: EdgeTarget,
    /// Undirected graphs are stored with both arc directions; `Count` then
    /// counts unordered edges.
    pub directed: bool,
    pub seed: u64,
}

fn pair_count(n: u64, directed: bool) -> u64 {
    let ordered = n * n.saturating_sub(1);
    if directed {
        ordered
    } else {
        ordered / 2
    }
}

/// Ordered pair with index `idx` in [0, n(n−1)), skipping the diagonal.
fn ordered_pair(idx: u64, n: u64) -> (u32, u32) {
    let src = idx / (n - 1);
    let mut dst = idx % (n - 1);
    if dst >= src {
        dst += 1;
    }
    (src as u32, dst as u32)
}

/// Unordered pair {a < b} with index `idx` in [0, n(n−1)/2), row by row.
fn unordered_pair(idx: u64, n: u64) -> (u32, u32) {
    // row a holds n−1−a pairs; find a by walking back from the closed form
    let total = n * (n - 1) / 2;
    let rest = total - 1 - idx;
    let mut k = ((((8 * rest + 1) as f64).sqrt() - 1.0) / 2.0) as u64;
    while (k + 1) * (k + 2) / 2 <= rest {
        k += 1;
    }
    while k * (k + 1) / 2 > rest {
        k -= 1;
    }
    let a = n - 2 - k;
    let offset = rest - k * (k + 1) / 2;
    let b = n - 1 - offset;
    (a as u32, b as u32)
}

fn pair_at(idx: u64, n: u64, directed: bool) -> (u32, u32) {
    if directed {
        ordered_pair(idx, n)
    } else {
        unordered_pair(idx, n)
    }
}

fn insert(g: &mut DirectedGraph, (a, b): (u32, u32), directed: bool) {
    g.add_arc(NodeId(a), NodeId(b)).expect("generated ids are in range");
    if !directed {
        g.add_arc(NodeId(b), NodeId(a)).expect("generated ids are in range");
    }
}

pub fn erdos_renyi(spec: &RandomGraphSpec) -> Result<DirectedGraph, NullModelError> {
    if spec.node_count > u32::MAX as usize {
        return Err(NullModelError::TooManyNodes);
    }
    let n = spec.node_count as u64;
    let pairs = pair_count(n, spec.directed);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut g = DirectedGraph::with_nodes(spec.node_count);

    match spec.target {
        EdgeTarget::Count(m) => {
            if m > pairs {
                return Err(NullModelError::TooManyEdges { edges: m, pairs });
            }
            if m <= pairs / 2 {
                // collision retry; expected draws stay below 2m
                let mut chosen = HashSet::with_capacity(m as usize);
                while (chosen.len() as u64) < m {
                    let idx = rng.random_range(0..pairs);
                    if chosen.insert(idx) {
                        insert(&mut g, pair_at(idx, n, spec.directed), spec.directed);
                    }
                }
            } else {
                // dense: draw the pairs to leave out instead
                let mut excluded = HashSet::with_capacity((pairs - m) as usize);
                while (excluded.len() as u64) < pairs - m {
                    excluded.insert(rng.random_range(0..pairs));
                }
                for idx in (0..pairs).filter(|i| !excluded.contains(i)) {
                    insert(&mut g, pair_at(idx, n, spec.directed), spec.directed);
                }
            }
        }
        EdgeTarget::Probability(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(NullModelError::InvalidProbability(p));
            }
            if p == 0.0 || pairs == 0 {
                return Ok(g);
            }
            if p == 1.0 {
                for idx in 0..pairs {
                    insert(&mut g, pair_at(idx, n, spec.directed), spec.directed);
                }
                return Ok(g);
            }
            // geometric skips between successive included pairs
            let log_q = (1.0 - p).ln();
            let mut idx: i128 = -1;
            loop {
                let u: f64 = rng.random::<f64>();
                let skip = ((1.0 - u).ln() / log_q).floor() as i128;
                idx += skip + 1;
                if idx >= pairs as i128 {
                    break;
                }
                insert(&mut g, pair_at(idx as u64, n, spec.directed), spec.directed);
            }
        }
    }
    Ok(g)
}

/// Ring lattice of `n` nodes, each joined to its `k` nearest neighbors, with
/// every lattice edge rewired with probability `beta`. Edges are stored as
/// arc pairs.
pub fn watts_strogatz(n: usize, k: usize, beta: f64, seed: u64) -> Result<DirectedGraph, NullModelError> {
    if !k.is_multiple_of(2) || k == 0 || k >= n || !(0.0..=1.0).contains(&beta) {
        return Err(NullModelError::InvalidLattice);
    }
    if n > u32::MAX as usize {
        return Err(NullModelError::TooManyNodes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    let link = |adj: &mut Vec<HashSet<u32>>, a: usize, b: usize| {
        adj[a].insert(b as u32);
        adj[b].insert(a as u32);
    };
    for j in 1..=k / 2 {
        for u in 0..n {
            link(&mut adj, u, (u + j) % n);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() >= beta || adj[u].len() >= n - 1 || !adj[u].contains(&(v as u32)) {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&(w as u32)) {
                    break w;
                }
            };
            adj[u].remove(&(v as u32));
            adj[v].remove(&(u as u32));
            link(&mut adj, u, w);
        }
    }
    let mut g = DirectedGraph::with_nodes(n);
    for (u, nbrs) in adj.iter().enumerate() {
        let mut sorted: Vec<u32> = nbrs.iter().copied().collect();
        sorted.sort_unstable();
        for v in sorted {
            g.add_arc(NodeId(u as u32), NodeId(v)).expect("lattice ids are in range");
        }
    }
    Ok(g)
}

/// C/C_r, L/L_r and σ; each `None` when an input is zero or missing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallWorldRatios {
    pub acc_ratio: Option<f64>,
    pub aspl_ratio: Option<f64>,
    pub sigma: Option<f64>,
}

fn ratio(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => Some(a / b),
        _ => None,
    }
}

pub fn small_world_ratios(c: f64, c_r: f64, l: Option<f64>, l_r: Option<f64>) -> SmallWorldRatios {
    let acc_ratio = ratio(Some(c), Some(c_r));
    let aspl_ratio = ratio(l, l_r);
    let sigma = match (acc_ratio, aspl_ratio) {
        (Some(a), Some(b)) if a != 0.0 => ratio(Some(a), Some(b)),
        _ => None,
    };
    SmallWorldRatios {
        acc_ratio,
        aspl_ratio,
        sigma,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphInfo {
    pub nodes: usize,
    pub arcs: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallWorldReport {
    pub real: MetricsReport,
    pub random: MetricsReport,
    pub random_graph: RandomGraphInfo,
    pub acc_ratio: Option<f64>,
    pub aspl_ratio: Option<f64>,
    pub sigma: Option<f64>,
    /// Main-component ACC ratio, for reference.
    pub main_component_acc_ratio: Option<f64>,
    /// Why a ratio above is undefined.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub report: SmallWorldReport,
    pub timings: Vec<PhaseTiming>,
}

/// Analyzes `real`, draws G(n, m) with the same node and arc counts, analyzes
/// it with the same settings and combines the two. Load centrality is only
/// computed for the real graph.
pub fn small_world_compare(real: &DirectedGraph, config: &AnalysisConfig, seed: u64) -> Result<Comparison, NullModelError> {
    if real.is_empty() {
        return Err(NullModelError::EmptyGraph);
    }
    let mut timings = Vec::new();
    let (real_report, t) = analyze_timed(real, config)?;
    timings.extend(prefixed("real", t));

    let started = Instant::now();
    let spec = RandomGraphSpec {
        node_count: real.node_count(),
        target: EdgeTarget::Count(real.arc_count() as u64),
        directed: true,
        seed,
    };
    let random = erdos_renyi(&spec)?;
    timings.push(PhaseTiming {
        phase: "random: generation".into(),
        seconds: started.elapsed().as_secs_f64(),
    });

    let random_config = AnalysisConfig { hubs: 0, ..*config };
    let (random_report, t) = analyze_timed(&random, &random_config)?;
    timings.extend(prefixed("random", t));

    let ratios = small_world_ratios(
        real_report.graph_acc,
        random_report.graph_acc,
        real_report.main_component_aspl,
        random_report.main_component_aspl,
    );
    let mut undefined = Vec::new();
    if ratios.acc_ratio.is_none() {
        undefined.push("acc_ratio: random graph ACC is zero".to_owned());
    }
    if ratios.aspl_ratio.is_none() {
        let side = if real_report.main_component_aspl.is_none() { "real" } else { "random" };
        undefined.push(format!("aspl_ratio: {side} graph main-component ASPL is undefined"));
    }
    if ratios.sigma.is_none() {
        undefined.push("sigma: needs both ratios defined and a nonzero ACC ratio".to_owned());
    }

    let report = SmallWorldReport {
        random_graph: RandomGraphInfo {
            nodes: random.node_count(),
            arcs: random.arc_count(),
            seed,
        },
        main_component_acc_ratio: ratio(Some(real_report.main_component_acc), Some(random_report.main_component_acc)),
        real: real_report,
        random: random_report,
        acc_ratio: ratios.acc_ratio,
        aspl_ratio: ratios.aspl_ratio,
        sigma: ratios.sigma,
        undefined,
    };
    Ok(Comparison { report, timings })
}

fn prefixed(prefix: &str, timings: Vec<PhaseTiming>) -> impl Iterator<Item = PhaseTiming> + '_ {
    timings.into_iter().map(move |t| PhaseTiming {
        phase: format!("{prefix}: {}", t.phase),
        seconds: t.seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, target: EdgeTarget, seed: u64) -> RandomGraphSpec {
        RandomGraphSpec {
            node_count: n,
            target,
            directed: true,
            seed,
        }
    }

    #[test]
    fn saturated_three_nodes() {
        let g = erdos_renyi(&spec(3, EdgeTarget::Count(6), 1)).unwrap();
        assert_eq!(g.arc_count(), 6);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(g.contains_arc(NodeId(a), NodeId(b)), a != b);
            }
        }
    }

    #[test]
    fn zero_edges() {
        let g = erdos_renyi(&spec(100, EdgeTarget::Count(0), 1)).unwrap();
        assert_eq!((g.node_count(), g.arc_count()), (100, 0));
    }

    #[test]
    fn too_many_edges() {
        assert_eq!(
            erdos_renyi(&spec(3, EdgeTarget::Count(7), 1)).unwrap_err(),
            NullModelError::TooManyEdges { edges: 7, pairs: 6 }
        );
        assert!(erdos_renyi(&spec(3, EdgeTarget::Probability(1.5), 1)).is_err());
    }

    #[test]
    fn pair_indexing_is_a_bijection() {
        for n in 2..9u64 {
            let ordered: HashSet<_> = (0..n * (n - 1)).map(|i| ordered_pair(i, n)).collect();
            assert_eq!(ordered.len() as u64, n * (n - 1));
            assert!(ordered.iter().all(|&(a, b)| a != b && (a as u64) < n && (b as u64) < n));
            let unordered: HashSet<_> = (0..n * (n - 1) / 2).map(|i| unordered_pair(i, n)).collect();
            assert_eq!(unordered.len() as u64, n * (n - 1) / 2);
            assert!(unordered.iter().all(|&(a, b)| a < b && (b as u64) < n));
        }
    }

    #[test]
    fn undirected_counts_edges() {
        let g = erdos_renyi(&RandomGraphSpec {
            node_count: 50,
            target: EdgeTarget::Count(100),
            directed: false,
            seed: 3,
        })
        .unwrap();
        assert_eq!(g.arc_count(), 200);
        assert!(g.arcs().all(|(a, b)| g.contains_arc(b, a)));
    }

    #[test]
    fn dense_count_uses_exclusion() {
        let g = erdos_renyi(&spec(20, EdgeTarget::Count(350), 5)).unwrap();
        assert_eq!(g.arc_count(), 350);
    }

    #[test]
    fn probability_extremes() {
        assert_eq!(erdos_renyi(&spec(10, EdgeTarget::Probability(0.0), 1)).unwrap().arc_count(), 0);
        assert_eq!(erdos_renyi(&spec(10, EdgeTarget::Probability(1.0), 1)).unwrap().arc_count(), 90);
    }

    #[test]
    fn generation_is_seeded() {
        let a = erdos_renyi(&spec(200, EdgeTarget::Count(800), 42)).unwrap();
        let b = erdos_renyi(&spec(200, EdgeTarget::Count(800), 42)).unwrap();
        let c = erdos_renyi(&spec(200, EdgeTarget::Count(800), 43)).unwrap();
        assert_eq!(a.sorted_arcs(), b.sorted_arcs());
        assert_ne!(a.sorted_arcs(), c.sorted_arcs());
    }

    #[test]
    fn lattice_without_rewiring() {
        let g = watts_strogatz(10, 4, 0.0, 1).unwrap();
        assert_eq!(g.arc_count(), 40);
        assert!(g.contains_arc(NodeId(0), NodeId(9)) && g.contains_arc(NodeId(0), NodeId(8)));
        assert!(watts_strogatz(10, 3, 0.1, 1).is_err());
        let r = watts_strogatz(100, 6, 0.5, 2).unwrap();
        assert_eq!(r.arc_count(), 600);
    }

    #[test]
    fn ratio_arithmetic() {
        let r = small_world_ratios(0.5, 0.05, Some(3.0), Some(2.0));
        assert!((r.acc_ratio.unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(r.aspl_ratio, Some(1.5));
        assert!((r.sigma.unwrap() - 10.0 / 1.5).abs() < 1e-12);

        let flat = small_world_ratios(0.5, 0.0, Some(3.0), Some(2.0));
        assert_eq!((flat.acc_ratio, flat.sigma), (None, None));
        assert_eq!(small_world_ratios(0.5, 0.1, None, Some(2.0)).aspl_ratio, None);
    }

    #[test]
    fn triangle_free_random_graph_flags_undefined_ratios() {
        // a single arc: no G(n, m) twin can hold a triangle
        let mut g = DirectedGraph::with_nodes(2);
        g.add_arc(NodeId(0), NodeId(1)).unwrap();
        let cfg = AnalysisConfig {
            plan: crate::metrics::SamplePlan::exact(crate::graph::ComponentKind::Weak),
            ..Default::default()
        };
        let cmp = small_world_compare(&g, &cfg, 1).unwrap();
        assert_eq!((cmp.report.random_graph.nodes, cmp.report.random_graph.arcs), (2, 1));
        assert_eq!(cmp.report.aspl_ratio, Some(1.0));
        assert_eq!((cmp.report.acc_ratio, cmp.report.sigma), (None, None));
        assert!(cmp.report.undefined.iter().any(|u| u.starts_with("acc_ratio")));
    }
}
