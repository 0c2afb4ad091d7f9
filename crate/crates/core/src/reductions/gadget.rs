//! Chain, bundle and feather builders shared by the instance generators,
//! with a record of every chain laid down so decompositions and validators
//! can navigate the result without rescanning it.

use crate::graph::{GraphBuilder, VertexId};

/// One chain between two anchor vertices; interior vertices are a contiguous
/// id range and stay unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRecord {
    pub a: VertexId,
    pub b: VertexId,
    /// Interior vertex ids, `start..end` (empty for a direct edge).
    pub interior: (usize, usize),
    pub len: u64,
}

#[derive(Debug, Default)]
pub struct GadgetBuilder {
    pub graph: GraphBuilder,
    pub chains: Vec<ChainRecord>,
}

impl GadgetBuilder {
    pub fn new() -> Self {
        GadgetBuilder {
            graph: GraphBuilder::new(0),
            chains: Vec::new(),
        }
    }

    pub fn add_anchor(&mut self, label: impl Into<String>) -> VertexId {
        self.graph.add_labeled_vertex(label)
    }

    /// A path with `len` edges from `a` to `b` through fresh interior
    /// vertices.
    pub fn add_chain(&mut self, a: VertexId, b: VertexId, len: u64) -> &ChainRecord {
        assert!(len >= 1, "chains have at least one edge");
        let start = self.graph.num_vertices();
        let mut prev = a;
        for _ in 0..len - 1 {
            let x = self.graph.add_vertex();
            self.graph.add_edge(prev, x);
            prev = x;
        }
        self.graph.add_edge(prev, b);
        let end = self.graph.num_vertices();
        self.chains.push(ChainRecord {
            a,
            b,
            interior: (start, end),
            len,
        });
        self.chains.last().unwrap()
    }

    /// `count` chains of `len` edges with common endpoints `a` and `b`.
    pub fn add_bundle(&mut self, a: VertexId, b: VertexId, count: u64, len: u64) {
        for _ in 0..count {
            self.add_chain(a, b, len);
        }
    }

    /// A shaft of `shaft_len` edges from `from` to a fresh hub, then
    /// `barb_count` chains of `barb_len` edges from the hub to `to`.
    /// Returns the hub.
    pub fn add_feather(
        &mut self,
        from: VertexId,
        to: VertexId,
        shaft_len: u64,
        barb_count: u64,
        barb_len: u64,
        hub_label: impl Into<String>,
    ) -> VertexId {
        let hub = self.add_anchor(hub_label);
        self.add_chain(from, hub, shaft_len);
        self.add_bundle(hub, to, barb_count, barb_len);
        hub
    }
}
