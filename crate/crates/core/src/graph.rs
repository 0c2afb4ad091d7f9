//! Undirected graphs with stable edge identities, plus the two edit
//! operations the rest of the crate needs: subdividing every edge and
//! contracting an edge set.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// An undirected graph. Immutable after construction; edits return new graphs
/// together with explicit vertex/edge mappings.
///
/// Parallel edges are representable (the contraction oracle needs them with
/// unit capacity each) but plain inputs are expected to be simple. Self-loops
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(VertexId, VertexId, u64)>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    labels: BTreeMap<VertexId, String>,
}

#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    num_vertices: usize,
    edges: Vec<(VertexId, VertexId, u64)>,
    labels: BTreeMap<VertexId, String>,
}

impl GraphBuilder {
    pub fn new(num_vertices: usize) -> Self {
        GraphBuilder {
            num_vertices,
            edges: Vec::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    pub fn add_labeled_vertex(&mut self, label: impl Into<String>) -> VertexId {
        let v = self.add_vertex();
        self.labels.insert(v, label.into());
        v
    }

    /// Adds an edge of weight 1. Panics on self-loops: no construction in
    /// this crate ever wants one.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> EdgeId {
        self.add_weighted_edge(a, b, 1)
    }

    pub fn add_weighted_edge(&mut self, a: VertexId, b: VertexId, w: u64) -> EdgeId {
        assert!(a != b, "self-loop {a}");
        assert!(
            a < self.num_vertices && b < self.num_vertices,
            "edge endpoint out of range"
        );
        assert!(w >= 1, "edge weights are positive");
        self.edges.push((a, b, w));
        self.edges.len() - 1
    }

    pub fn set_label(&mut self, v: VertexId, label: impl Into<String>) {
        self.labels.insert(v, label.into());
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn build(self) -> Graph {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (id, &(a, b, _)) in self.edges.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        Graph {
            num_vertices: self.num_vertices,
            edges: self.edges,
            adj,
            labels: self.labels,
        }
    }
}

impl Graph {
    /// Builds a simple unweighted graph from an edge list.
    pub fn from_edges(num_vertices: usize, edges: &[(VertexId, VertexId)]) -> Graph {
        let mut b = GraphBuilder::new(num_vertices);
        for &(u, v) in edges {
            b.add_edge(u, v);
        }
        b.build()
    }

    pub fn from_weighted_edges(num_vertices: usize, edges: &[(VertexId, VertexId, u64)]) -> Graph {
        let mut b = GraphBuilder::new(num_vertices);
        for &(u, v, w) in edges {
            b.add_weighted_edge(u, v, w);
        }
        b.build()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let (a, b, _) = self.edges[e];
        (a, b)
    }

    pub fn weight(&self, e: EdgeId) -> u64 {
        self.edges[e].2
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId, u64)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(id, &(a, b, w))| (id, a, b, w))
    }

    /// Neighbors of `v` as `(other_endpoint, edge_id)`, in insertion order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(&v).map(|s| s.as_str())
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, String> {
        &self.labels
    }

    /// True when there are no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        for &(a, b, _) in &self.edges {
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return false;
            }
        }
        true
    }

    /// The lowest edge id connecting `a` and `b`, if any.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.adj[a]
            .iter()
            .filter(|&&(w, _)| w == b)
            .map(|&(_, e)| e)
            .min()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.num_vertices {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Vertices reachable from `start`, as a boolean mask.
    pub fn reachable(&self, start: VertexId) -> Vec<bool> {
        self.reachable_avoiding(start, &[], &[])
    }

    /// Reachability with some vertices and edges removed.
    pub fn reachable_avoiding(
        &self,
        start: VertexId,
        removed_vertices: &[VertexId],
        removed_edges: &[EdgeId],
    ) -> Vec<bool> {
        let mut vmask = vec![false; self.num_vertices];
        for &v in removed_vertices {
            vmask[v] = true;
        }
        let mut emask = vec![false; self.edges.len()];
        for &e in removed_edges {
            emask[e] = true;
        }
        let mut seen = vec![false; self.num_vertices];
        if vmask[start] {
            return seen;
        }
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &self.adj[v] {
                if !emask[e] && !vmask[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_connected_between(&self, s: VertexId, t: VertexId) -> bool {
        self.reachable(s)[t]
    }
}

/// One decision/optimization instance: `p` routes from `source` to `sink`,
/// at most `budget` shared edges.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub source: VertexId,
    pub sink: VertexId,
    pub num_routes: usize,
    pub budget: u64,
}

impl Instance {
    pub fn new(
        graph: Graph,
        source: VertexId,
        sink: VertexId,
        num_routes: usize,
        budget: u64,
    ) -> Result<Instance> {
        graph.check_vertex(source)?;
        graph.check_vertex(sink)?;
        if source == sink {
            return Err(Error::Unsupported("source and sink must differ".into()));
        }
        if num_routes == 0 {
            return Err(Error::Unsupported("need at least one route".into()));
        }
        Ok(Instance {
            graph,
            source,
            sink,
            num_routes,
            budget,
        })
    }
}

/// How shared edges are charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMode {
    /// Every shared edge costs 1.
    Count,
    /// Every shared edge costs its weight.
    Weighted,
}

impl CostMode {
    pub fn edge_cost(&self, g: &Graph, e: EdgeId) -> u64 {
        match self {
            CostMode::Count => 1,
            CostMode::Weighted => g.weight(e),
        }
    }
}

/// An ordered list of `p` routes plus the derived set of shared edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Routing {
    pub routes: Vec<Vec<VertexId>>,
    pub shared_edges: BTreeSet<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoutingDefect {
    WrongRouteCount {
        expected: usize,
        got: usize,
    },
    EmptyRoute {
        route: usize,
    },
    WrongEndpoint {
        route: usize,
    },
    NotAdjacent {
        route: usize,
        from: VertexId,
        to: VertexId,
    },
    RepeatedVertex {
        route: usize,
        vertex: VertexId,
    },
}

/// Result of checking a routing against an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub valid: bool,
    pub defect: Option<RoutingDefect>,
    pub shared_count: u64,
    pub shared_edges: BTreeSet<EdgeId>,
}

/// Checks that `routes` are `p` source-sink paths of the instance graph and
/// recomputes the shared-edge set. In weighted mode `shared_count` is the
/// total weight of shared edges.
///
/// Routes are vertex sequences; consecutive pairs resolve to the lowest edge
/// id between them, so instance graphs are expected to be simple.
pub fn verify_routing(inst: &Instance, routes: &[Vec<VertexId>], mode: CostMode) -> VerifyOutcome {
    let invalid = |defect| VerifyOutcome {
        valid: false,
        defect: Some(defect),
        shared_count: 0,
        shared_edges: BTreeSet::new(),
    };
    if routes.len() != inst.num_routes {
        return invalid(RoutingDefect::WrongRouteCount {
            expected: inst.num_routes,
            got: routes.len(),
        });
    }
    let g = &inst.graph;
    let mut uses: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (qi, route) in routes.iter().enumerate() {
        if route.is_empty() {
            return invalid(RoutingDefect::EmptyRoute { route: qi });
        }
        if route[0] != inst.source || *route.last().unwrap() != inst.sink {
            return invalid(RoutingDefect::WrongEndpoint { route: qi });
        }
        let mut seen = BTreeSet::new();
        for &v in route {
            if v >= g.num_vertices() {
                return invalid(RoutingDefect::WrongEndpoint { route: qi });
            }
            if !seen.insert(v) {
                return invalid(RoutingDefect::RepeatedVertex {
                    route: qi,
                    vertex: v,
                });
            }
        }
        for win in route.windows(2) {
            match g.edge_between(win[0], win[1]) {
                Some(e) => *uses.entry(e).or_insert(0) += 1,
                None => {
                    return invalid(RoutingDefect::NotAdjacent {
                        route: qi,
                        from: win[0],
                        to: win[1],
                    })
                }
            }
        }
    }
    let shared_edges: BTreeSet<EdgeId> = uses
        .iter()
        .filter(|&(_, &c)| c >= 2)
        .map(|(&e, _)| e)
        .collect();
    let shared_count = shared_edges.iter().map(|&e| mode.edge_cost(g, e)).sum();
    VerifyOutcome {
        valid: true,
        defect: None,
        shared_count,
        shared_edges,
    }
}

impl Routing {
    /// Builds a routing from raw routes, deriving the shared-edge set.
    /// The routes are not validated here; use [`verify_routing`] for that.
    pub fn from_routes(g: &Graph, routes: Vec<Vec<VertexId>>) -> Routing {
        let mut uses: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for route in &routes {
            for win in route.windows(2) {
                if let Some(e) = g.edge_between(win[0], win[1]) {
                    *uses.entry(e).or_insert(0) += 1;
                }
            }
        }
        let shared_edges = uses
            .iter()
            .filter(|&(_, &c)| c >= 2)
            .map(|(&e, _)| e)
            .collect();
        Routing {
            routes,
            shared_edges,
        }
    }
}

/// Output of [`subdivide_all_edges`]: the new graph plus, per original edge,
/// the vertex that replaced it.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: Graph,
    /// `midpoint[e]` is the subdivision vertex of original edge `e`.
    pub midpoint: Vec<VertexId>,
}

/// Replaces each edge `{v,w}` by `{v,x_e}, {x_e,w}` with a fresh vertex
/// `x_e`. Original vertices keep their ids; expects a simple input graph.
///
/// Subdivision vertices carry a label naming the original edge. Both halves
/// inherit the original edge weight.
pub fn subdivide_all_edges(g: &Graph) -> Subdivision {
    debug_assert!(g.is_simple());
    let n = g.num_vertices();
    let mut b = GraphBuilder::new(n);
    for (v, lab) in g.labels() {
        b.set_label(*v, lab.clone());
    }
    let mut midpoint = Vec::with_capacity(g.num_edges());
    for (e, a, c, w) in g.edges() {
        let x = b.add_labeled_vertex(format!("sub:{e}:{a}-{c}"));
        b.add_weighted_edge(a, x, w);
        b.add_weighted_edge(x, c, w);
        midpoint.push(x);
    }
    Subdivision {
        graph: b.build(),
        midpoint,
    }
}

/// Output of [`contract_edges`].
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: Graph,
    /// Old vertex id -> new vertex id. Merged vertices map to one id, so
    /// `vertex_map[s] == vertex_map[t]` reports a source/sink collision.
    pub vertex_map: Vec<VertexId>,
    /// Old edge id -> surviving new edge id (None for contracted edges,
    /// self-loops, and duplicates dropped when `keep_parallel` is false).
    pub edge_map: Vec<Option<EdgeId>>,
    /// New edge id -> the old edge it came from.
    pub origin: Vec<EdgeId>,
}

/// Contracts every edge in `f`, merging endpoint classes.
///
/// With `keep_parallel` the resulting parallel edges are all retained (the
/// flow oracle gives each unit capacity); otherwise duplicates collapse onto
/// the lowest-id representative. Self-loops arising from contraction are
/// always dropped.
pub fn contract_edges(g: &Graph, f: &BTreeSet<EdgeId>, keep_parallel: bool) -> Result<Contraction> {
    for &e in f {
        if e >= g.num_edges() {
            return Err(Error::InvalidEdge(e));
        }
    }
    // Union-find over vertices.
    let mut parent: Vec<usize> = (0..g.num_vertices()).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for &e in f {
        let (a, b) = g.endpoints(e);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }
    // Number classes by smallest member for determinism.
    let mut class_of = vec![usize::MAX; g.num_vertices()];
    let mut next = 0;
    for v in 0..g.num_vertices() {
        let r = find(&mut parent, v);
        if class_of[r] == usize::MAX {
            class_of[r] = next;
            next += 1;
        }
        class_of[v] = class_of[r];
    }
    let mut b = GraphBuilder::new(next);
    let mut edge_map = vec![None; g.num_edges()];
    let mut origin = Vec::new();
    let mut seen_pairs: BTreeMap<(usize, usize), EdgeId> = BTreeMap::new();
    for (e, u, v, w) in g.edges() {
        if f.contains(&e) {
            continue;
        }
        let (cu, cv) = (class_of[u], class_of[v]);
        if cu == cv {
            continue; // self-loop
        }
        let key = (cu.min(cv), cu.max(cv));
        if !keep_parallel {
            if let Some(&prev) = seen_pairs.get(&key) {
                edge_map[e] = Some(prev);
                continue;
            }
        }
        let ne = b.add_weighted_edge(cu, cv, w);
        seen_pairs.insert(key, ne);
        edge_map[e] = Some(ne);
        origin.push(e);
    }
    Ok(Contraction {
        graph: b.build(),
        vertex_map: class_of,
        edge_map,
        origin,
    })
}
