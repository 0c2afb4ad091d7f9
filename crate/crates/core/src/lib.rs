//! Exact solvers for routing a fixed number of paths between two terminals
//! while minimizing the edges carrying more than one path.
//!
//! The pieces:
//! - [`graph`]: graphs with stable edge ids, subdivision and contraction,
//!   routing verification.
//! - [`flow`]: unit-capacity flow, disjoint paths, small minimal cuts and
//!   separators by brute force.
//! - [`treedecomp`] / [`nice`]: tree decompositions, a min-fill heuristic,
//!   the PACE-style file format, and normalization into the rooted binary
//!   form with one introduce-edge node per edge.
//! - [`dp`]: the table-filling solver over a nice decomposition.
//! - [`pipeline`]: the reduction that shrinks the graph to its small-
//!   separator core before solving, with witness lifting.
//! - [`oracle`]: independent brute-force solvers used as ground truth.
//! - [`reductions`]: hardness-construction instance generators.
//! - [`catalog`]: exhaustive and random test instance collections.

pub mod catalog;
pub mod dp;
pub mod error;
pub mod flow;
pub mod graph;
pub mod nice;
pub mod oracle;
pub mod pipeline;
pub mod reductions;
pub mod treedecomp;

pub use error::{Error, Result, WorkBudget};
pub use graph::{
    contract_edges, subdivide_all_edges, verify_routing, CostMode, EdgeId, Graph, GraphBuilder,
    Instance, Routing, VertexId,
};
