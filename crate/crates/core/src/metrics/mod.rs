//! Network metrics: degree distributions, clustering, main-component
//! shortest paths and load centrality.
//!
//! Every computation takes the graph by shared reference. Breadth-first
//! searches are spread over a pool of `workers` threads and reduced in
//! source order, so results do not depend on the worker count.

mod adjacency;
pub mod clustering;
pub mod degree;
pub mod load;
pub mod paths;
pub mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ComponentKind;

pub use adjacency::Csr;
pub use clustering::{average_clustering, average_clustering_of, clustering_coefficient, clustering_coefficients, ClusteringMode};
pub use degree::{degree_distribution, node_degrees, DegreeHistogram, Hub, NodeDegrees};
pub use load::{load_centrality, unnormalized_load};
pub use paths::{aspl, select_sample, AsplResult};
pub use report::{analyze, analyze_timed, AnalysisConfig, ComponentSizes, HubLoad, MetricsReport, PhaseTiming, SampleSummary};

pub const DEFAULT_HUBS: usize = 10;
pub const DEFAULT_SAMPLE_FRACTION: f64 = 0.10;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("sample fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("sample of {sample} nodes from a component of {component} is too small (need at least 2)")]
    SampleTooSmall { sample: usize, component: usize },
    #[error("graph has no main component")]
    EmptyGraph,
    #[error("no connected pair among the sampled nodes")]
    NoConnectedPairs,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("node {0} out of range")]
    NodeOutOfRange(u32),
}

/// Which nodes the shortest-path average is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub fraction: f64,
    pub seed: u64,
    pub component: ComponentKind,
    pub treat_as_undirected: bool,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            fraction: DEFAULT_SAMPLE_FRACTION,
            seed: 0,
            component: ComponentKind::Weak,
            treat_as_undirected: false,
        }
    }
}

impl SamplePlan {
    pub fn exact(component: ComponentKind) -> Self {
        Self {
            fraction: 1.0,
            component,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(MetricsError::InvalidFraction(self.fraction));
        }
        Ok(())
    }

    /// ⌈fraction · n⌉, ignoring floating-point noise in the product.
    pub fn sample_size(&self, n: usize) -> usize {
        let raw = self.fraction * n as f64;
        ((raw - 1e-9).ceil().max(0.0) as usize).min(n)
    }
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, MetricsError> {
    if workers == 0 {
        return Err(MetricsError::NoWorkers);
    }
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to start worker threads"))
}
