use crate::graph::DirectedGraph;

/// Compressed adjacency used by the BFS-heavy metrics.
#[derive(Clone, Debug)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    /// Successor lists, or symmetric neighbor lists when `undirected`.
    /// With a `mask`, only arcs between masked-in nodes are kept.
    pub fn build(graph: &DirectedGraph, undirected: bool, mask: Option<&[bool]>) -> Self {
        let keep = |v: usize| mask.is_none_or(|m| m[v]);
        let sym = undirected.then(|| graph.symmetric_adjacency());
        let mut offsets = Vec::with_capacity(graph.node_count() + 1);
        let mut targets = Vec::with_capacity(if undirected { 2 } else { 1 } * graph.arc_count());
        offsets.push(0);
        for v in graph.nodes() {
            if keep(v.index()) {
                let nbrs = match &sym {
                    Some(s) => &s[v.index()],
                    None => graph.successors(v),
                };
                targets.extend(nbrs.iter().filter(|u| keep(u.index())).map(|u| u.0));
            }
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}
