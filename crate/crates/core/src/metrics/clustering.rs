use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, NodeId};

/// `Undirected` works on the projection: 2·links / (k·(k−1)) over the k
/// distinct neighbors. `Directed` counts oriented triangles:
/// (A+Aᵀ)³ᵥᵥ / (2·(d(d−1) − 2·d↔)), with d = in + out and d↔ the number of
/// reciprocated neighbors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringMode {
    #[default]
    Undirected,
    Directed,
}

/// Coefficient of every node, restricted to the subgraph induced by `mask`
/// when given (masked-out nodes get 0).
pub fn clustering_coefficients(graph: &DirectedGraph, mode: ClusteringMode, mask: Option<&[bool]>) -> Vec<f64> {
    match mode {
        ClusteringMode::Undirected => undirected(graph, mask),
        ClusteringMode::Directed => directed(graph, mask),
    }
}

fn undirected(graph: &DirectedGraph, mask: Option<&[bool]>) -> Vec<f64> {
    let keep = |v: usize| mask.is_none_or(|m| m[v]);
    let mut adj = graph.symmetric_adjacency();
    if mask.is_some() {
        for (v, nbrs) in adj.iter_mut().enumerate() {
            if keep(v) {
                nbrs.retain(|u| keep(u.index()));
            } else {
                nbrs.clear();
            }
        }
    }
    let mut stamp = vec![u32::MAX; adj.len()];
    (0..adj.len())
        .map(|v| {
            let nbrs = &adj[v];
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            for u in nbrs {
                stamp[u.index()] = v as u32;
            }
            // each link among neighbors is seen from both of its ends
            let twice_links: usize = nbrs
                .iter()
                .map(|u| adj[u.index()].iter().filter(|w| stamp[w.index()] == v as u32).count())
                .sum();
            twice_links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

fn directed(graph: &DirectedGraph, mask: Option<&[bool]>) -> Vec<f64> {
    let keep = |v: NodeId| mask.is_none_or(|m| m[v.index()]);
    let n = graph.node_count();
    // weight[x] = a(v,x) + a(x,v) for the current v
    let mut weight = vec![0u32; n];
    graph
        .nodes()
        .map(|v| {
            if !keep(v) {
                return 0.0;
            }
            let succ: Vec<NodeId> = graph.successors(v).iter().copied().filter(|&u| keep(u)).collect();
            let pred: Vec<NodeId> = graph.predecessors(v).iter().copied().filter(|&u| keep(u)).collect();
            for &u in succ.iter().chain(&pred) {
                weight[u.index()] += 1;
            }
            let total = succ.len() + pred.len();
            let reciprocal = succ.iter().filter(|u| weight[u.index()] == 2).count();

            let mut cube = 0u64;
            let mut visit = |u: NodeId| {
                let w_vu = weight[u.index()] as u64;
                let through: u64 = graph
                    .successors(u)
                    .iter()
                    .chain(graph.predecessors(u))
                    .filter(|&&x| keep(x))
                    .map(|x| weight[x.index()] as u64)
                    .sum();
                cube += w_vu * through;
            };
            // distinct neighbors once each
            for &u in &succ {
                visit(u);
            }
            for &u in &pred {
                if weight[u.index()] == 1 {
                    visit(u);
                }
            }
            for &u in succ.iter().chain(&pred) {
                weight[u.index()] = 0;
            }

            let denom = 2 * (total * total.saturating_sub(1)).saturating_sub(2 * reciprocal);
            if denom == 0 {
                0.0
            } else {
                cube as f64 / denom as f64
            }
        })
        .collect()
}

pub fn clustering_coefficient(graph: &DirectedGraph, node: NodeId, mode: ClusteringMode) -> f64 {
    // local computation only needs the node's two-hop neighborhood, but the
    // full pass keeps a single code path
    clustering_coefficients(graph, mode, None)[node.index()]
}

/// Mean over all nodes; 0 for the empty graph.
pub fn average_clustering(graph: &DirectedGraph, mode: ClusteringMode) -> f64 {
    mean(&clustering_coefficients(graph, mode, None))
}

/// Mean over `members`, computed on the subgraph they induce.
pub fn average_clustering_of(graph: &DirectedGraph, members: &[NodeId], mode: ClusteringMode) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    let mut mask = vec![false; graph.node_count()];
    for v in members {
        mask[v.index()] = true;
    }
    let coeffs = clustering_coefficients(graph, mode, Some(&mask));
    members.iter().map(|v| coeffs[v.index()]).sum::<f64>() / members.len() as f64
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, arcs: &[(u32, u32)]) -> DirectedGraph {
        let mut g = DirectedGraph::with_nodes(n);
        for &(s, d) in arcs {
            g.add_arc(NodeId(s), NodeId(d)).unwrap();
        }
        g
    }

    /// (A+Aᵀ)³ diagonal straight from the adjacency matrix.
    fn directed_oracle(g: &DirectedGraph) -> Vec<f64> {
        let n = g.node_count();
        let a = |i: usize, j: usize| g.contains_arc(NodeId(i as u32), NodeId(j as u32)) as u64;
        let s = |i: usize, j: usize| a(i, j) + a(j, i);
        (0..n)
            .map(|v| {
                let mut cube = 0;
                for u in 0..n {
                    for w in 0..n {
                        cube += s(v, u) * s(u, w) * s(w, v);
                    }
                }
                let total: u64 = (0..n).map(|u| a(v, u) + a(u, v)).sum();
                let recip: u64 = (0..n).map(|u| a(v, u) * a(u, v)).sum();
                let denom = 2 * (total * total.saturating_sub(1) - 2 * recip);
                if denom == 0 {
                    0.0
                } else {
                    cube as f64 / denom as f64
                }
            })
            .collect()
    }

    #[test]
    fn triangle() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        for v in 0..3 {
            assert_eq!(clustering_coefficient(&g, NodeId(v), ClusteringMode::Undirected), 1.0);
        }
        assert_eq!(average_clustering(&g, ClusteringMode::Undirected), 1.0);
    }

    #[test]
    fn path_has_no_clustering() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(clustering_coefficient(&g, NodeId(1), ClusteringMode::Undirected), 0.0);
        assert_eq!(average_clustering(&g, ClusteringMode::Undirected), 0.0);
    }

    #[test]
    fn four_clique_minus_an_edge() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        let c = clustering_coefficients(&g, ClusteringMode::Undirected, None);
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((c[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!((c[2], c[3]), (1.0, 1.0));
        assert!((average_clustering(&g, ClusteringMode::Undirected) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn induced_subgraph_average() {
        // triangle 0-1-2 plus pendant 3 attached to 0
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (3, 0)]);
        let all = average_clustering(&g, ClusteringMode::Undirected);
        assert!((all - (1.0 / 3.0 + 1.0 + 1.0) / 4.0).abs() < 1e-15);
        let tri = average_clustering_of(&g, &[NodeId(0), NodeId(1), NodeId(2)], ClusteringMode::Undirected);
        assert_eq!(tri, 1.0);
    }

    #[test]
    fn directed_mode_matches_matrix_oracle() {
        let cases: Vec<(usize, Vec<(u32, u32)>)> = vec![
            (3, vec![(0, 1), (1, 2), (2, 0)]),
            (3, vec![(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]),
            (4, vec![(0, 1), (0, 2), (1, 2), (2, 3), (3, 0), (1, 0)]),
            (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (2, 4), (3, 1), (1, 3)]),
        ];
        for (n, arcs) in cases {
            let g = graph(n, &arcs);
            let got = clustering_coefficients(&g, ClusteringMode::Directed, None);
            let want = directed_oracle(&g);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{got:?} vs {want:?}");
            }
        }
        // a directed 3-cycle closes one of the two possible directed triangles per node
        let c = clustering_coefficients(&graph(3, &[(0, 1), (1, 2), (2, 0)]), ClusteringMode::Directed, None);
        assert!((c[0] - 0.5).abs() < 1e-15);
    }
}
