use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::clustering::{clustering_coefficients, ClusteringMode};
use super::degree::{degree_distribution, DegreeHistogram};
use super::load::load_centrality;
use super::paths::aspl_on_component;
use super::{MetricsError, SamplePlan, DEFAULT_HUBS};
use crate::graph::{strongly_connected_components, weakly_connected_components, Component, ComponentKind, DirectedGraph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub plan: SamplePlan,
    pub workers: usize,
    /// How many top-degree nodes get a load centrality; 0 skips it.
    pub hubs: usize,
    pub clustering: ClusteringMode,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            plan: SamplePlan::default(),
            workers: 1,
            hubs: DEFAULT_HUBS,
            clustering: ClusteringMode::Undirected,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSizes {
    pub nodes: usize,
    pub arcs: usize,
    pub weak_components: usize,
    pub weak_main: usize,
    pub weak_main_fraction: f64,
    pub strong_components: usize,
    pub strong_main: usize,
    pub strong_main_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubLoad {
    pub node: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub address: Option<String>,
    pub degree: usize,
    pub load: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    #[serde(flatten)]
    pub plan: SamplePlan,
    pub sample_size: usize,
    pub component_size: usize,
    pub pairs_used: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub graph_acc: f64,
    pub main_component_acc: f64,
    /// `None` when the main component has no measurable pair.
    pub main_component_aspl: Option<f64>,
    pub sample: SampleSummary,
    pub clustering: ClusteringMode,
    pub component_sizes: ComponentSizes,
    pub hub_load: Vec<HubLoad>,
    pub edge_reuse_ratio: f64,
    pub degree_histogram: DegreeHistogram,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub phase: String,
    pub seconds: f64,
}

struct Timer(Vec<PhaseTiming>, Instant);

impl Timer {
    fn new() -> Self {
        Self(Vec::new(), Instant::now())
    }

    fn lap(&mut self, phase: &str) {
        let seconds = self.1.elapsed().as_secs_f64();
        log::info!("{phase}: {seconds:.3}s");
        self.0.push(PhaseTiming {
            phase: phase.to_owned(),
            seconds,
        });
        self.1 = Instant::now();
    }
}

fn main_of(components: &[Component]) -> Option<&Component> {
    components.iter().find(|c| c.is_main)
}

fn fraction(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

pub fn analyze(graph: &DirectedGraph, config: &AnalysisConfig) -> Result<MetricsReport, MetricsError> {
    analyze_timed(graph, config).map(|(report, _)| report)
}

/// Full analysis plus wall-clock time per phase.
pub fn analyze_timed(graph: &DirectedGraph, config: &AnalysisConfig) -> Result<(MetricsReport, Vec<PhaseTiming>), MetricsError> {
    config.plan.validate()?;
    if config.workers == 0 {
        return Err(MetricsError::NoWorkers);
    }
    let mut timer = Timer::new();
    let mut warnings = Vec::new();

    let degree_histogram = degree_distribution(graph, config.hubs);
    timer.lap("degree distribution");

    let weak = weakly_connected_components(graph);
    let strong = strongly_connected_components(graph);
    let n = graph.node_count();
    let component_sizes = ComponentSizes {
        nodes: n,
        arcs: graph.arc_count(),
        weak_components: weak.len(),
        weak_main: main_of(&weak).map_or(0, Component::len),
        weak_main_fraction: fraction(main_of(&weak).map_or(0, Component::len), n),
        strong_components: strong.len(),
        strong_main: main_of(&strong).map_or(0, Component::len),
        strong_main_fraction: fraction(main_of(&strong).map_or(0, Component::len), n),
    };
    timer.lap("components");

    let coeffs = clustering_coefficients(graph, config.clustering, None);
    let graph_acc = if n == 0 { 0.0 } else { coeffs.iter().sum::<f64>() / n as f64 };
    let main = match config.plan.component {
        ComponentKind::Weak => main_of(&weak),
        ComponentKind::Strong => main_of(&strong),
    };
    let main_component_acc = match main {
        Some(c) if c.len() == n => graph_acc,
        Some(c) => super::average_clustering_of(graph, &c.members, config.clustering),
        None => 0.0,
    };
    timer.lap("clustering");

    let mut sample = SampleSummary {
        plan: config.plan,
        sample_size: 0,
        component_size: main.map_or(0, Component::len),
        pairs_used: 0,
    };
    let main_component_aspl = match main {
        None => {
            warnings.push("graph is empty".to_owned());
            None
        }
        Some(c) if c.len() < 2 => {
            warnings.push(format!("main {:?} component has a single node", config.plan.component).to_lowercase());
            None
        }
        Some(c) => match aspl_on_component(graph, c, &config.plan, config.workers) {
            Ok(r) => {
                sample.sample_size = r.sample_size;
                sample.pairs_used = r.pairs_used;
                Some(r.aspl)
            }
            Err(e @ (MetricsError::SampleTooSmall { .. } | MetricsError::NoConnectedPairs)) => {
                warnings.push(format!("shortest paths: {e}"));
                None
            }
            Err(e) => return Err(e),
        },
    };
    timer.lap("shortest paths");

    let hubs: Vec<NodeId> = degree_histogram.max_hubs.iter().map(|h| h.node).collect();
    let loads = load_centrality(graph, &hubs, config.plan.treat_as_undirected, config.workers)?;
    let hub_load = degree_histogram
        .max_hubs
        .iter()
        .zip(loads)
        .map(|(h, load)| HubLoad {
            node: h.node,
            address: graph.address(h.node).map(str::to_owned),
            degree: h.degree,
            load,
        })
        .collect();
    timer.lap("load centrality");

    let report = MetricsReport {
        graph_acc,
        main_component_acc,
        main_component_aspl,
        sample,
        clustering: config.clustering,
        component_sizes,
        hub_load,
        edge_reuse_ratio: graph.edge_reuse_ratio(),
        degree_histogram,
        warnings,
    };
    Ok((report, timer.0))
}
