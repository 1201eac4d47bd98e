//! Directed simple graph over dense integer node ids.
//!
//! Addresses are interned in first-seen order, so `NodeId(k)` is the k-th
//! distinct address the builder encountered. Repeated arcs collapse into one
//! arc with a multiplicity counter; self-transactions are dropped but counted.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node id {id} out of range (node count {node_count})")]
    NodeOutOfRange { id: u32, node_count: usize },
    #[error("empty address")]
    EmptyAddress,
    #[error("address {0:?} is already assigned to another node")]
    DuplicateAddress(String),
    #[error("graph exceeds {} nodes", u32::MAX)]
    TooManyNodes,
}

/// Result of submitting one sender→recipient connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcInsert {
    Inserted,
    Duplicated,
    SelfLoopDiscarded,
}

#[derive(Clone, Debug, Default)]
pub struct DirectedGraph {
    successors: Vec<Vec<NodeId>>,
    predecessors: Vec<Vec<NodeId>>,
    multiplicity: HashMap<(NodeId, NodeId), u64>,
    addresses: Vec<Option<String>>,
    address_index: HashMap<String, NodeId>,
    self_loops: u64,
}

impl DirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph with `n` unlabeled nodes and no arcs.
    pub fn with_nodes(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.push_node(None);
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.successors.len()
    }

    pub fn arc_count(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    fn push_node(&mut self, address: Option<String>) -> NodeId {
        let id = NodeId(self.successors.len() as u32);
        self.successors.push(Vec::new());
        self.predecessors.push(Vec::new());
        self.addresses.push(address);
        id
    }

    /// Appends an unlabeled node.
    pub fn add_node(&mut self) -> Result<NodeId, GraphError> {
        if self.node_count() >= u32::MAX as usize {
            return Err(GraphError::TooManyNodes);
        }
        Ok(self.push_node(None))
    }

    /// Returns the id of `address`, assigning the next free id on first sight.
    pub fn intern_address(&mut self, address: &str) -> Result<NodeId, GraphError> {
        if address.is_empty() {
            return Err(GraphError::EmptyAddress);
        }
        if let Some(&id) = self.address_index.get(address) {
            return Ok(id);
        }
        if self.node_count() >= u32::MAX as usize {
            return Err(GraphError::TooManyNodes);
        }
        let id = self.push_node(Some(address.to_owned()));
        self.address_index.insert(address.to_owned(), id);
        Ok(id)
    }

    /// Attaches an address to a node that does not carry one yet.
    pub fn set_address(&mut self, node: NodeId, address: &str) -> Result<(), GraphError> {
        self.check(node)?;
        if address.is_empty() {
            return Err(GraphError::EmptyAddress);
        }
        match self.address_index.get(address) {
            Some(&owner) if owner == node => return Ok(()),
            Some(_) => return Err(GraphError::DuplicateAddress(address.to_owned())),
            None => {}
        }
        if let Some(old) = self.addresses[node.index()].take() {
            self.address_index.remove(&old);
        }
        self.addresses[node.index()] = Some(address.to_owned());
        self.address_index.insert(address.to_owned(), node);
        Ok(())
    }

    pub fn address(&self, node: NodeId) -> Option<&str> {
        self.addresses.get(node.index()).and_then(|a| a.as_deref())
    }

    pub fn node_of(&self, address: &str) -> Option<NodeId> {
        self.address_index.get(address).copied()
    }

    /// True when every node carries an address.
    pub fn is_labeled(&self) -> bool {
        !self.addresses.is_empty() && self.addresses.iter().all(Option::is_some)
    }

    fn check(&self, node: NodeId) -> Result<(), GraphError> {
        if node.index() < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                id: node.0,
                node_count: self.node_count(),
            })
        }
    }

    pub fn add_arc(&mut self, src: NodeId, dst: NodeId) -> Result<ArcInsert, GraphError> {
        self.check(src)?;
        self.check(dst)?;
        if src == dst {
            self.self_loops += 1;
            return Ok(ArcInsert::SelfLoopDiscarded);
        }
        let count = self.multiplicity.entry((src, dst)).or_insert(0);
        *count += 1;
        if *count > 1 {
            return Ok(ArcInsert::Duplicated);
        }
        self.successors[src.index()].push(dst);
        self.predecessors[dst.index()].push(src);
        Ok(ArcInsert::Inserted)
    }

    /// Interns both endpoints and adds the arc between them.
    pub fn add_connection(&mut self, sender: &str, recipient: &str) -> Result<ArcInsert, GraphError> {
        let s = self.intern_address(sender)?;
        let d = self.intern_address(recipient)?;
        self.add_arc(s, d)
    }

    pub fn contains_arc(&self, src: NodeId, dst: NodeId) -> bool {
        self.multiplicity.contains_key(&(src, dst))
    }

    /// Number of times the arc was submitted; 0 if absent.
    pub fn multiplicity(&self, src: NodeId, dst: NodeId) -> u64 {
        self.multiplicity.get(&(src, dst)).copied().unwrap_or(0)
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.multiplicity.values().sum()
    }

    pub fn self_loop_count(&self) -> u64 {
        self.self_loops
    }

    /// Fraction of accepted connections that reused an existing arc.
    pub fn edge_reuse_ratio(&self) -> f64 {
        let total = self.total_multiplicity();
        if total == 0 {
            return 0.0;
        }
        (total - self.arc_count() as u64) as f64 / total as f64
    }

    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        &self.successors[node.index()]
    }

    pub fn predecessors(&self, node: NodeId) -> &[NodeId] {
        &self.predecessors[node.index()]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.successors[node.index()].len()
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.predecessors[node.index()].len()
    }

    /// Arcs in insertion order per source node.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(s, succ)| succ.iter().map(move |&d| (NodeId(s as u32), d)))
    }

    /// Arcs in lexicographic (src, dst) order.
    pub fn sorted_arcs(&self) -> Vec<(NodeId, NodeId)> {
        let mut arcs: Vec<_> = self.arcs().collect();
        arcs.sort_unstable();
        arcs
    }

    /// Sorted, de-duplicated neighbor lists ignoring orientation.
    pub fn symmetric_adjacency(&self) -> Vec<Vec<NodeId>> {
        self.nodes()
            .map(|v| {
                let mut nbrs: Vec<NodeId> = self.successors(v).iter().chain(self.predecessors(v)).copied().collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                nbrs
            })
            .collect()
    }

    /// Same node set with every arc mirrored. Mirrored arcs carry multiplicity 1.
    pub fn undirected_projection(&self) -> DirectedGraph {
        let mut out = DirectedGraph {
            successors: vec![Vec::new(); self.node_count()],
            predecessors: vec![Vec::new(); self.node_count()],
            multiplicity: HashMap::with_capacity(self.arc_count() * 2),
            addresses: self.addresses.clone(),
            address_index: self.address_index.clone(),
            self_loops: self.self_loops,
        };
        for (s, d) in self.sorted_arcs() {
            for (a, b) in [(s, d), (d, s)] {
                if let std::collections::hash_map::Entry::Vacant(e) = out.multiplicity.entry((a, b)) {
                    e.insert(1);
                    out.successors[a.index()].push(b);
                    out.predecessors[b.index()].push(a);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Weak,
    Strong,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted ascending.
    pub members: Vec<NodeId>,
    pub kind: ComponentKind,
    pub is_main: bool,
}

impl Component {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Groups nodes by label, orders groups by lowest member and flags the largest.
fn components_from_labels(labels: &[u32], kind: ComponentKind) -> Vec<Component> {
    let mut order: Vec<Option<usize>> = vec![None; labels.len()];
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    for (v, &label) in labels.iter().enumerate() {
        let slot = *order[label as usize].get_or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(NodeId(v as u32));
    }
    // groups are created in order of their lowest member, so the first
    // maximum wins ties by lowest NodeId
    let main = groups
        .iter()
        .enumerate()
        .fold(None::<(usize, usize)>, |best, (i, g)| match best {
            Some((_, len)) if len >= g.len() => best,
            _ => Some((i, g.len())),
        })
        .map(|(i, _)| i);
    groups
        .into_iter()
        .enumerate()
        .map(|(i, members)| Component {
            members,
            kind,
            is_main: Some(i) == main,
        })
        .collect()
}

pub fn weakly_connected_components(graph: &DirectedGraph) -> Vec<Component> {
    components_from_labels(&weak_labels(graph), ComponentKind::Weak)
}

pub fn strongly_connected_components(graph: &DirectedGraph) -> Vec<Component> {
    components_from_labels(&strong_labels(graph), ComponentKind::Strong)
}

pub fn components(graph: &DirectedGraph, kind: ComponentKind) -> Vec<Component> {
    match kind {
        ComponentKind::Weak => weakly_connected_components(graph),
        ComponentKind::Strong => strongly_connected_components(graph),
    }
}

/// The largest component of the given kind, `None` for the empty graph.
pub fn main_component(graph: &DirectedGraph, kind: ComponentKind) -> Option<Component> {
    components(graph, kind).into_iter().find(|c| c.is_main)
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let grand = parent[parent[x as usize] as usize];
        parent[x as usize] = grand;
        x = grand;
    }
    x
}

/// Per-node weak component label (union-find root).
pub fn weak_labels(graph: &DirectedGraph) -> Vec<u32> {
    let n = graph.node_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for (s, d) in graph.arcs() {
        let a = find(&mut parent, s.0);
        let b = find(&mut parent, d.0);
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi as usize] = lo;
        }
    }
    (0..n as u32).map(|v| find(&mut parent, v)).collect()
}

/// Per-node strong component label, via iterative Tarjan.
pub fn strong_labels(graph: &DirectedGraph) -> Vec<u32> {
    const UNVISITED: u32 = u32::MAX;
    let n = graph.node_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut label = vec![UNVISITED; n];
    let mut stack: Vec<u32> = Vec::new();
    // (node, next successor position)
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut counter = 0u32;

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = counter;
        lowlink[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = &graph.successors[v as usize];
            if *pos < succ.len() {
                let w = succ[*pos].0;
                *pos += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = counter;
                    lowlink[w as usize] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent as usize] = lowlink[parent as usize].min(lowlink[v as usize]);
            }
            if lowlink[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    label[w as usize] = v;
                    if w == v {
                        break;
                    }
                }
            }
        }
    }
    label
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

    fn member_sets(cs: &[Component]) -> Vec<Vec<u32>> {
        cs.iter().map(|c| c.members.iter().map(|v| v.0).collect()).collect()
    }

    #[test]
    fn interning_is_incremental_and_idempotent() {
        let mut g = DirectedGraph::new();
        assert_eq!(g.intern_address("0xabc").unwrap(), NodeId(0));
        assert_eq!(g.intern_address("0xabc").unwrap(), NodeId(0));
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.intern_address("rXYZ").unwrap(), NodeId(1));
        assert_eq!(g.address(NodeId(1)), Some("rXYZ"));
        assert_eq!(g.node_of("0xabc"), Some(NodeId(0)));
        assert_eq!(g.intern_address(""), Err(GraphError::EmptyAddress));
    }

    #[test]
    fn add_arc_outcomes() {
        let mut g = DirectedGraph::with_nodes(3);
        assert_eq!(g.add_arc(NodeId(0), NodeId(1)).unwrap(), ArcInsert::Inserted);
        assert_eq!(g.arc_count(), 1);
        assert_eq!(g.add_arc(NodeId(0), NodeId(1)).unwrap(), ArcInsert::Duplicated);
        assert_eq!(g.arc_count(), 1);
        assert_eq!(g.multiplicity(NodeId(0), NodeId(1)), 2);
        assert_eq!(g.add_arc(NodeId(2), NodeId(2)).unwrap(), ArcInsert::SelfLoopDiscarded);
        assert_eq!(g.self_loop_count(), 1);
        assert_eq!(g.arc_count(), 1);
        assert!(matches!(
            g.add_arc(NodeId(0), NodeId(3)),
            Err(GraphError::NodeOutOfRange { id: 3, node_count: 3 })
        ));
        assert_eq!(g.edge_reuse_ratio(), 0.5);
    }

    #[test]
    fn weak_components_of_a_path() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let w = weakly_connected_components(&g);
        assert_eq!(member_sets(&w), vec![vec![0, 1, 2]]);
        assert!(w[0].is_main);
    }

    #[test]
    fn strong_components_of_a_path_are_singletons() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let s = strongly_connected_components(&g);
        assert_eq!(member_sets(&s), vec![vec![0], vec![1], vec![2]]);
        // tie between singletons goes to the lowest id
        assert!(s[0].is_main && !s[1].is_main && !s[2].is_main);
    }

    #[test]
    fn strong_components_with_a_cycle() {
        let g = graph(4, &[(0, 1), (1, 0), (2, 3)]);
        let s = strongly_connected_components(&g);
        assert_eq!(member_sets(&s), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(s.iter().filter(|c| c.is_main).count(), 1);
        assert_eq!(member_sets(&[main_component(&g, ComponentKind::Strong).unwrap()]), vec![vec![0, 1]]);
    }

    #[test]
    fn main_component_tie_goes_to_lowest_member() {
        let g = graph(4, &[(2, 3), (0, 1)]);
        let main = main_component(&g, ComponentKind::Weak).unwrap();
        assert_eq!(main.members, vec![NodeId(0), NodeId(1)]);
    }

    #[test]
    fn projection_examples() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(g.undirected_projection().sorted_arcs(), vec![(NodeId(0), NodeId(1)), (NodeId(1), NodeId(0))]);

        let sym = graph(2, &[(0, 1), (1, 0)]);
        assert_eq!(sym.undirected_projection().sorted_arcs(), sym.sorted_arcs());

        let g = graph(3, &[(0, 1), (1, 0), (1, 2)]);
        let p: Vec<(u32, u32)> = g.undirected_projection().sorted_arcs().iter().map(|(a, b)| (a.0, b.0)).collect();
        assert_eq!(p, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert_eq!(g.undirected_projection().node_count(), 3);
    }

    #[test]
    fn deep_chain_does_not_overflow_the_stack() {
        let n = 200_000u32;
        let arcs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, 0)]).collect();
        let g = graph(n as usize, &arcs);
        let s = strongly_connected_components(&g);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].len(), n as usize);
    }
}
