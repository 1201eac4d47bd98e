use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct NodeDegrees {
    pub in_degree: usize,
    pub out_degree: usize,
    /// Distinct neighbors regardless of direction.
    pub total: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hub {
    pub node: NodeId,
    pub degree: usize,
}

/// Degree value → number of nodes with that degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub in_degree: BTreeMap<usize, usize>,
    pub out_degree: BTreeMap<usize, usize>,
    pub total_degree: BTreeMap<usize, usize>,
    /// Highest total degree first, ties by lowest id.
    pub max_hubs: Vec<Hub>,
}

pub fn node_degrees(graph: &DirectedGraph) -> Vec<NodeDegrees> {
    let mut stamp = vec![u32::MAX; graph.node_count()];
    graph
        .nodes()
        .map(|v| {
            let succ = graph.successors(v);
            let pred = graph.predecessors(v);
            for u in succ {
                stamp[u.index()] = v.0;
            }
            let only_pred = pred.iter().filter(|u| stamp[u.index()] != v.0).count();
            NodeDegrees {
                in_degree: pred.len(),
                out_degree: succ.len(),
                total: succ.len() + only_pred,
            }
        })
        .collect()
}

pub fn degree_distribution(graph: &DirectedGraph, hubs: usize) -> DegreeHistogram {
    let degrees = node_degrees(graph);
    let mut hist = DegreeHistogram::default();
    for d in &degrees {
        *hist.in_degree.entry(d.in_degree).or_default() += 1;
        *hist.out_degree.entry(d.out_degree).or_default() += 1;
        *hist.total_degree.entry(d.total).or_default() += 1;
    }
    let mut ranked: Vec<Hub> = degrees
        .iter()
        .enumerate()
        .map(|(i, d)| Hub {
            node: NodeId(i as u32),
            degree: d.total,
        })
        .collect();
    let k = hubs.min(ranked.len());
    if k > 0 {
        let by_rank = |a: &Hub, b: &Hub| b.degree.cmp(&a.degree).then(a.node.cmp(&b.node));
        ranked.select_nth_unstable_by(k - 1, by_rank);
        ranked.truncate(k);
        ranked.sort_unstable_by(by_rank);
        hist.max_hubs = ranked;
    }
    hist
}

impl DegreeHistogram {
    /// Two-column `degree count` text for log-log plotting.
    pub fn to_columns(map: &BTreeMap<usize, usize>) -> String {
        let mut out = String::from("# degree count\n");
        for (d, c) in map {
            let _ = writeln!(out, "{d} {c}");
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.total_degree.values().sum()
    }
}
