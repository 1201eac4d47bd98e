mod support;

use std::collections::{BTreeMap, BTreeSet};

use ledgergraph::graph::{strongly_connected_components, weakly_connected_components};
use ledgergraph::ingest::{build_graph, Ledger, TransactionRecord};
use ledgergraph::metrics::{aspl, average_clustering, degree_distribution, load_centrality, ClusteringMode, SamplePlan};
use ledgergraph::pajek::{read_pajek, to_pajek_string};
use ledgergraph::{ComponentKind, DirectedGraph, NodeId};
use proptest::prelude::*;
use support::{all_pairs, aspl_oracle, clustering_oracle, graph, load_oracle};

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = DirectedGraph> {
    (0..=max_nodes).prop_flat_map(|n| {
        let arcs = if n == 0 {
            Just(Vec::new()).boxed()
        } else {
            prop::collection::vec((0..n as u32, 0..n as u32), 0..n * 3).boxed()
        };
        arcs.prop_map(move |arcs| graph(n, &arcs))
    })
}

fn arb_records() -> impl Strategy<Value = Vec<TransactionRecord>> {
    let address = (0u8..12).prop_map(|a| format!("addr{a}"));
    let utxo = (prop::collection::vec(address.clone(), 1..4), prop::collection::vec(address.clone(), 1..4))
        .prop_map(|(senders, recipients)| TransactionRecord {
            ledger: Ledger::Bitcoin,
            senders,
            recipients,
            timestamp: 0,
            tx_kind: "transaction".into(),
            hash: None,
        });
    prop::collection::vec(utxo, 0..40)
}

fn same_graph(a: &DirectedGraph, b: &DirectedGraph) -> bool {
    a.node_count() == b.node_count()
        && a.sorted_arcs() == b.sorted_arcs()
        && a.nodes().all(|v| a.address(v) == b.address(v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pajek_roundtrip_unlabeled(g in arb_graph(30)) {
        let text = to_pajek_string(&g, false).unwrap();
        let back = read_pajek(text.as_bytes()).unwrap();
        prop_assert!(same_graph(&g, &back));
        prop_assert_eq!(to_pajek_string(&back, false).unwrap(), text);
    }

    #[test]
    fn pajek_roundtrip_labeled(records in arb_records()) {
        let (g, _) = build_graph(&records);
        let text = to_pajek_string(&g, true).unwrap();
        let back = read_pajek(text.as_bytes()).unwrap();
        prop_assert!(same_graph(&g, &back));
    }

    #[test]
    fn record_order_does_not_matter(records in arb_records(), seed in any::<u64>()) {
        let mut shuffled = records.clone();
        // deterministic Fisher–Yates driven by the seed
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let by_address = |g: &DirectedGraph| -> BTreeSet<(String, String)> {
            g.arcs().map(|(s, d)| (g.address(s).unwrap().to_owned(), g.address(d).unwrap().to_owned())).collect()
        };
        let (a, sa) = build_graph(&records);
        let (b, sb) = build_graph(&shuffled);
        prop_assert_eq!(by_address(&a), by_address(&b));
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn degree_sums_equal_arc_count(g in arb_graph(40)) {
        let h = degree_distribution(&g, 5);
        let weighted = |m: &BTreeMap<usize, usize>| m.iter().map(|(d, c)| d * c).sum::<usize>();
        prop_assert_eq!(weighted(&h.in_degree), g.arc_count());
        prop_assert_eq!(weighted(&h.out_degree), g.arc_count());
        prop_assert_eq!(h.node_count(), g.node_count());
        prop_assert!(h.max_hubs.windows(2).all(|w| w[0].degree >= w[1].degree));
    }

    #[test]
    fn components_partition_and_respect_reachability(g in arb_graph(25)) {
        let dist = all_pairs(&g, false);
        let undirected = all_pairs(&g, true);
        for (comps, reach) in [(strongly_connected_components(&g), &dist), (weakly_connected_components(&g), &undirected)] {
            let mut seen: Vec<NodeId> = comps.iter().flat_map(|c| c.members.clone()).collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, g.nodes().collect::<Vec<_>>());
            prop_assert!(comps.iter().filter(|c| c.is_main).count() <= 1);
            for c in &comps {
                for &u in &c.members {
                    for &v in &c.members {
                        prop_assert!(reach[u.index()][v.index()].is_some());
                    }
                }
            }
            // nodes in different components are not mutually reachable
            for a in &comps {
                for b in &comps {
                    if a.members[0] != b.members[0] {
                        let (u, v) = (a.members[0].index(), b.members[0].index());
                        prop_assert!(reach[u][v].is_none() || reach[v][u].is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn exact_aspl_matches_brute_force(g in arb_graph(30), undirected in any::<bool>(), strong in any::<bool>()) {
        let kind = if strong { ComponentKind::Strong } else { ComponentKind::Weak };
        let plan = SamplePlan { treat_as_undirected: undirected, ..SamplePlan::exact(kind) };
        let Some(main) = ledgergraph::graph::main_component(&g, kind) else { return Ok(()) };
        let (sum, pairs) = aspl_oracle(&g, &main.members, undirected);
        match aspl(&g, &plan, 2) {
            Ok(r) => {
                prop_assert_eq!(r.pairs_used, pairs);
                prop_assert_eq!(r.aspl, sum as f64 / pairs as f64);
            }
            Err(_) => prop_assert!(main.len() < 2 || pairs == 0),
        }
    }

    #[test]
    fn clustering_matches_triangle_count(g in arb_graph(30)) {
        let got = average_clustering(&g, ClusteringMode::Undirected);
        let want = clustering_oracle(&g);
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }

    #[test]
    fn load_matches_path_enumeration(g in arb_graph(14), undirected in any::<bool>()) {
        let nodes: Vec<NodeId> = g.nodes().collect();
        let got = load_centrality(&g, &nodes, undirected, 2).unwrap();
        let want = load_oracle(&g, undirected);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", got, want);
        }
    }

    #[test]
    fn sampled_aspl_ignores_worker_count(g in arb_graph(40), seed in any::<u64>()) {
        let plan = SamplePlan { fraction: 0.5, seed, ..SamplePlan::default() };
        prop_assert_eq!(aspl(&g, &plan, 1), aspl(&g, &plan, 3));
    }
}
