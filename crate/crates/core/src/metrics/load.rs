//! Load centrality: the share of shortest paths between other ordered pairs
//! that pass through a node. When a pair has several shortest paths, each
//! carries weight 1/(number of shortest paths).
//!
//! Paths are counted inside the node's weak component and the share is
//! normalized by (n−1)(n−2), n being that component's size. Dependencies
//! are accumulated per source (Brandes) and summed in source order.

use rayon::prelude::*;

use super::{thread_pool, Csr, MetricsError};
use crate::graph::{weak_labels, DirectedGraph, NodeId};

const UNSEEN: u32 = u32::MAX;

/// Per-node search state, kept together so one cache line serves all three.
#[derive(Clone, Copy)]
struct Cell {
    dist: u32,
    paths: f64,
    delta: f64,
}

const BLANK: Cell = Cell {
    dist: UNSEEN,
    paths: 0.0,
    delta: 0.0,
};

struct Scratch {
    cells: Vec<Cell>,
    order: Vec<u32>,
}

/// Dependency of `source` on each node of `queried`.
fn source_dependency(adj: &Csr, source: u32, queried: &[u32], s: &mut Scratch) -> Vec<f64> {
    let Scratch { cells, order } = s;
    cells[source as usize] = Cell {
        dist: 0,
        paths: 1.0,
        delta: 0.0,
    };
    order.push(source);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        let Cell { dist, paths, .. } = cells[v as usize];
        for &w in adj.neighbors(v) {
            let cw = &mut cells[w as usize];
            if cw.dist == UNSEEN {
                cw.dist = dist + 1;
                order.push(w);
            }
            if cw.dist == dist + 1 {
                cw.paths += paths;
            }
        }
    }
    for &v in order.iter().rev() {
        let Cell { dist, paths, .. } = cells[v as usize];
        let mut acc = 0.0;
        for &w in adj.neighbors(v) {
            let cw = &cells[w as usize];
            if cw.dist == dist + 1 {
                acc += paths / cw.paths * (1.0 + cw.delta);
            }
        }
        cells[v as usize].delta = acc;
    }
    let out = queried
        .iter()
        .map(|&q| {
            let c = &cells[q as usize];
            if q == source || c.dist == UNSEEN {
                0.0
            } else {
                c.delta
            }
        })
        .collect();
    for &v in order.iter() {
        cells[v as usize] = BLANK;
    }
    order.clear();
    out
}

/// Nodes of `mask` with a path to some node of `targets`, ascending. Only
/// these sources have a nonzero dependency on a target.
fn ancestors(graph: &DirectedGraph, undirected: bool, mask: &[bool], targets: &[u32]) -> Vec<u32> {
    let mut seen = vec![false; graph.node_count()];
    let mut stack = Vec::new();
    for &t in targets {
        if !seen[t as usize] {
            seen[t as usize] = true;
            stack.push(t);
        }
    }
    while let Some(v) = stack.pop() {
        let v = NodeId(v);
        let extra = if undirected { graph.successors(v) } else { &[] };
        for &u in graph.predecessors(v).iter().chain(extra) {
            if mask[u.index()] && !seen[u.index()] {
                seen[u.index()] = true;
                stack.push(u.0);
            }
        }
    }
    (0..graph.node_count() as u32).filter(|&v| seen[v as usize]).collect()
}

/// Raw path shares through each queried node (not normalized).
pub fn unnormalized_load(
    graph: &DirectedGraph,
    nodes: &[NodeId],
    undirected: bool,
    workers: usize,
) -> Result<Vec<f64>, MetricsError> {
    Ok(load_with_sizes(graph, nodes, undirected, workers)?.into_iter().map(|(raw, _)| raw).collect())
}

pub fn load_centrality(
    graph: &DirectedGraph,
    nodes: &[NodeId],
    undirected: bool,
    workers: usize,
) -> Result<Vec<f64>, MetricsError> {
    Ok(load_with_sizes(graph, nodes, undirected, workers)?
        .into_iter()
        .map(|(raw, n)| if n < 3 { 0.0 } else { raw / ((n - 1) * (n - 2)) as f64 })
        .collect())
}

fn load_with_sizes(
    graph: &DirectedGraph,
    nodes: &[NodeId],
    undirected: bool,
    workers: usize,
) -> Result<Vec<(f64, usize)>, MetricsError> {
    let n = graph.node_count();
    if let Some(bad) = nodes.iter().find(|v| v.index() >= n) {
        return Err(MetricsError::NodeOutOfRange(bad.0));
    }
    let pool = thread_pool(workers)?;
    let labels = weak_labels(graph);
    let mut result = vec![(0.0, 0usize); nodes.len()];

    let mut roots: Vec<u32> = nodes.iter().map(|v| labels[v.index()]).collect();
    roots.sort_unstable();
    roots.dedup();
    for root in roots {
        let mask: Vec<bool> = labels.iter().map(|&l| l == root).collect();
        let size = mask.iter().filter(|&&m| m).count();
        let slots: Vec<usize> = (0..nodes.len()).filter(|&i| labels[nodes[i].index()] == root).collect();
        let queried: Vec<u32> = slots.iter().map(|&i| nodes[i].0).collect();
        if size < 3 {
            for &i in &slots {
                result[i] = (0.0, size);
            }
            continue;
        }
        let adj = Csr::build(graph, undirected, Some(&mask));
        let sources = ancestors(graph, undirected, &mask, &queried);
        let per_source: Vec<Vec<f64>> = pool.install(|| {
            sources
                .par_iter()
                .map_init(
                    || Scratch {
                        cells: vec![BLANK; n],
                        order: Vec::with_capacity(n),
                    },
                    |scratch, &s| source_dependency(&adj, s, &queried, scratch),
                )
                .collect()
        });
        let mut totals = vec![0.0f64; queried.len()];
        for deps in &per_source {
            for (t, d) in totals.iter_mut().zip(deps) {
                *t += d;
            }
        }
        for (&i, t) in slots.iter().zip(totals) {
            result[i] = (t, size);
        }
    }
    Ok(result)
}
