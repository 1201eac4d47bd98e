//! Average shortest path length over the main component, exact or sampled.
//!
//! A sample S of ⌈fraction·|main|⌉ nodes is drawn uniformly without
//! replacement; one BFS runs from every s ∈ S and only distances to other
//! members of S are kept, so a 1/n sample touches 1/n² of the pairs.
//! Unreachable ordered pairs are left out of the average.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{thread_pool, Csr, MetricsError, SamplePlan};
use crate::graph::{main_component, Component, DirectedGraph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsplResult {
    pub aspl: f64,
    /// Ordered reachable pairs averaged over.
    pub pairs_used: u64,
    pub sample_size: usize,
    pub component_size: usize,
}

/// Sorted sample of the component's members for `plan`.
pub fn select_sample(component: &Component, plan: &SamplePlan) -> Result<Vec<NodeId>, MetricsError> {
    plan.validate()?;
    let n = component.len();
    let k = plan.sample_size(n);
    if k < 2 {
        return Err(MetricsError::SampleTooSmall { sample: k, component: n });
    }
    if k == n {
        return Ok(component.members.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut picked: Vec<NodeId> = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|i| component.members[i])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

struct BfsScratch {
    dist: Vec<u32>,
    queue: Vec<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl BfsScratch {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![UNSEEN; n],
            queue: Vec::with_capacity(n),
        }
    }

    /// Resets only the entries the last search touched.
    fn clear(&mut self) {
        for &v in &self.queue {
            self.dist[v as usize] = UNSEEN;
        }
        self.queue.clear();
    }
}

/// BFS from `source`; returns (Σ distance, count) over reached targets.
fn distances_to_targets(adj: &Csr, source: u32, is_target: &[bool], targets: usize, scratch: &mut BfsScratch) -> (u64, u64) {
    scratch.clear();
    scratch.dist[source as usize] = 0;
    scratch.queue.push(source);
    let mut head = 0;
    let mut sum = 0u64;
    let mut found = 0u64;
    let wanted = (targets - usize::from(is_target[source as usize])) as u64;
    while head < scratch.queue.len() && found < wanted {
        let v = scratch.queue[head];
        head += 1;
        let next = scratch.dist[v as usize] + 1;
        for &w in adj.neighbors(v) {
            if scratch.dist[w as usize] == UNSEEN {
                scratch.dist[w as usize] = next;
                scratch.queue.push(w);
                if is_target[w as usize] {
                    sum += next as u64;
                    found += 1;
                }
            }
        }
    }
    (sum, found)
}

/// ASPL of the plan's main component, spreading sources over `workers`
/// threads.
pub fn aspl(graph: &DirectedGraph, plan: &SamplePlan, workers: usize) -> Result<AsplResult, MetricsError> {
    plan.validate()?;
    let main = main_component(graph, plan.component).ok_or(MetricsError::EmptyGraph)?;
    aspl_on_component(graph, &main, plan, workers)
}

pub(crate) fn aspl_on_component(
    graph: &DirectedGraph,
    main: &Component,
    plan: &SamplePlan,
    workers: usize,
) -> Result<AsplResult, MetricsError> {
    let sample = select_sample(main, plan)?;
    let n = graph.node_count();
    let mut in_component = vec![false; n];
    for v in &main.members {
        in_component[v.index()] = true;
    }
    let adj = Csr::build(graph, plan.treat_as_undirected, Some(&in_component));
    let mut is_target = vec![false; n];
    for v in &sample {
        is_target[v.index()] = true;
    }

    let pool = thread_pool(workers)?;
    let per_source: Vec<(u64, u64)> = pool.install(|| {
        sample
            .par_iter()
            .map_init(
                || BfsScratch::new(n),
                |scratch, s| distances_to_targets(&adj, s.0, &is_target, sample.len(), scratch),
            )
            .collect()
    });
    let (sum, pairs) = per_source
        .iter()
        .fold((0u64, 0u64), |(a, b), &(s, c)| (a + s, b + c));
    if pairs == 0 {
        return Err(MetricsError::NoConnectedPairs);
    }
    Ok(AsplResult {
        aspl: sum as f64 / pairs as f64,
        pairs_used: pairs,
        sample_size: sample.len(),
        component_size: main.len(),
    })
}
