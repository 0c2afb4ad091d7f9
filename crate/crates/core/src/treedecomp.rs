//! Tree decompositions: validation, a min-fill construction heuristic, and
//! the PACE-style text format.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// A tree decomposition: bags indexed by node id plus tree edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<VertexId>>,
    pub tree_edges: Vec<(usize, usize)>,
    pub root: Option<usize>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    /// Adjacency lists of the decomposition tree.
    pub fn tree_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Checks the three defining conditions plus tree-shape, returning the first
/// violation found.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> Result<()> {
    let n_nodes = td.bags.len();
    if n_nodes == 0 {
        return Err(Error::InvalidTreeDecomposition("no bags".into()));
    }
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= g.num_vertices() {
                return Err(Error::InvalidTreeDecomposition(format!(
                    "bag {i} contains unknown vertex {v}"
                )));
            }
        }
    }
    for &(a, b) in &td.tree_edges {
        if a >= n_nodes || b >= n_nodes {
            return Err(Error::InvalidTreeDecomposition(format!(
                "tree edge ({a},{b}) out of range"
            )));
        }
    }
    // The tree must be connected and acyclic.
    if td.tree_edges.len() + 1 != n_nodes {
        return Err(Error::InvalidTreeDecomposition(format!(
            "{} nodes need {} tree edges, found {}",
            n_nodes,
            n_nodes - 1,
            td.tree_edges.len()
        )));
    }
    let adj = td.tree_adj();
    let mut seen = vec![false; n_nodes];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    if count != n_nodes {
        return Err(Error::InvalidTreeDecomposition(
            "decomposition tree is disconnected".into(),
        ));
    }
    // Every vertex in some bag; occurrence nodes induce a subtree.
    // A node-induced subgraph of a tree is connected iff #nodes - #edges = 1.
    let mut occ = vec![0usize; g.num_vertices()];
    for bag in &td.bags {
        for &v in bag {
            occ[v] += 1;
        }
    }
    for v in 0..g.num_vertices() {
        if occ[v] == 0 {
            return Err(Error::InvalidTreeDecomposition(format!(
                "vertex {v} is in no bag"
            )));
        }
    }
    let mut shared = vec![0usize; g.num_vertices()];
    for &(a, b) in &td.tree_edges {
        for &v in td.bags[a].intersection(&td.bags[b]) {
            shared[v] += 1;
        }
    }
    for v in 0..g.num_vertices() {
        if occ[v] - shared[v] != 1 {
            return Err(Error::InvalidTreeDecomposition(format!(
                "occurrence nodes of vertex {v} are not connected"
            )));
        }
    }
    // Every edge inside some bag. Scan the occurrence bags of the rarer
    // endpoint so large decompositions stay cheap.
    let mut occurrence_nodes: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices()];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            occurrence_nodes[v].push(i);
        }
    }
    for (e, a, b, _) in g.edges() {
        let (probe, other) = if occurrence_nodes[a].len() <= occurrence_nodes[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        let covered = occurrence_nodes[probe]
            .iter()
            .any(|&i| td.bags[i].contains(&other));
        if !covered {
            return Err(Error::InvalidTreeDecomposition(format!(
                "edge {e} ({a},{b}) is contained in no bag"
            )));
        }
    }
    Ok(())
}

/// Tree decomposition from the min-fill elimination ordering, ties broken by
/// lowest vertex id. Valid for any input; no width guarantee.
pub fn heuristic_td(g: &Graph) -> TreeDecomposition {
    let n = g.num_vertices();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![BTreeSet::new()],
            tree_edges: vec![],
            root: Some(0),
        };
    }
    // Work on a simple adjacency-set copy.
    let mut nb: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); n];
    for (_, a, b, _) in g.edges() {
        nb[a].insert(b);
        nb[b].insert(a);
    }
    let mut alive: BTreeSet<VertexId> = (0..n).collect();
    let mut elim_bags: Vec<(VertexId, BTreeSet<VertexId>)> = Vec::with_capacity(n);
    while !alive.is_empty() {
        // Pick the alive vertex whose neighborhood needs fewest fill edges.
        let mut best: Option<(usize, VertexId)> = None;
        for &v in &alive {
            let neigh: Vec<VertexId> = nb[v].iter().copied().collect();
            let mut fill = 0;
            for i in 0..neigh.len() {
                for j in i + 1..neigh.len() {
                    if !nb[neigh[i]].contains(&neigh[j]) {
                        fill += 1;
                    }
                }
            }
            if best.map_or(true, |(bf, bv)| fill < bf || (fill == bf && v < bv)) {
                best = Some((fill, v));
            }
        }
        let (_, v) = best.unwrap();
        let neigh: Vec<VertexId> = nb[v].iter().copied().collect();
        let mut bag: BTreeSet<VertexId> = neigh.iter().copied().collect();
        bag.insert(v);
        elim_bags.push((v, bag));
        for i in 0..neigh.len() {
            for j in i + 1..neigh.len() {
                nb[neigh[i]].insert(neigh[j]);
                nb[neigh[j]].insert(neigh[i]);
            }
        }
        for &u in &neigh {
            nb[u].remove(&v);
        }
        nb[v].clear();
        alive.remove(&v);
    }
    // Standard construction: bag of v attaches to the bag of the earliest
    // eliminated vertex among its bag's later members.
    let order_of: std::collections::BTreeMap<VertexId, usize> = elim_bags
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (*v, i))
        .collect();
    let bags: Vec<BTreeSet<VertexId>> = elim_bags.iter().map(|(_, b)| b.clone()).collect();
    let mut tree_edges = Vec::new();
    let mut roots = Vec::new();
    for (i, (v, bag)) in elim_bags.iter().enumerate() {
        let successor = bag
            .iter()
            .filter(|&&u| u != *v)
            .map(|&u| order_of[&u])
            .min();
        match successor {
            Some(j) => tree_edges.push((i, j)),
            None => roots.push(i),
        }
    }
    // Chain component roots so the result is a single tree.
    for w in roots.windows(2) {
        tree_edges.push((w[0], w[1]));
    }
    let root = roots.last().copied().or(Some(bags.len() - 1));
    TreeDecomposition {
        bags,
        tree_edges,
        root,
    }
}

/// Serializes in the PACE-style format: `s td <#bags> <width+1> <n>`, then
/// `b <bag-id> <v...>` lines, then tree edges. Everything 1-indexed.
pub fn write_pace(td: &TreeDecomposition, num_vertices: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "s td {} {} {}\n",
        td.bags.len(),
        td.width() + 1,
        num_vertices
    ));
    for (i, bag) in td.bags.iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for &v in bag {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    for &(a, b) in &td.tree_edges {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

/// Parses the PACE-style format produced by [`write_pace`]. Comment lines
/// start with `c`.
pub fn read_pace(text: &str) -> Result<TreeDecomposition> {
    let bad =
        |line: usize, msg: &str| Error::InvalidTreeDecomposition(format!("line {line}: {msg}"));
    let mut header: Option<(usize, usize)> = None; // (#bags, n)
    let mut bags: Vec<Option<BTreeSet<VertexId>>> = Vec::new();
    let mut tree_edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "s" {
            if header.is_some() {
                return Err(bad(lineno, "duplicate header"));
            }
            if toks.len() != 5 || toks[1] != "td" {
                return Err(bad(lineno, "expected `s td <#bags> <width+1> <n>`"));
            }
            let nb: usize = toks[2].parse().map_err(|_| bad(lineno, "bad bag count"))?;
            let n: usize = toks[4]
                .parse()
                .map_err(|_| bad(lineno, "bad vertex count"))?;
            bags = vec![None; nb];
            header = Some((nb, n));
        } else if toks[0] == "b" {
            let (nb, n) = header.ok_or_else(|| bad(lineno, "bag before header"))?;
            let id: usize = toks
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(lineno, "bad bag id"))?;
            if id == 0 || id > nb {
                return Err(bad(lineno, "bag id out of range"));
            }
            let mut bag = BTreeSet::new();
            for tok in &toks[2..] {
                let v: usize = tok.parse().map_err(|_| bad(lineno, "bad vertex id"))?;
                if v == 0 || v > n {
                    return Err(bad(lineno, "vertex id out of range"));
                }
                bag.insert(v - 1);
            }
            if bags[id - 1].replace(bag).is_some() {
                return Err(bad(lineno, "duplicate bag id"));
            }
        } else {
            let (nb, _) = header.ok_or_else(|| bad(lineno, "tree edge before header"))?;
            if toks.len() != 2 {
                return Err(bad(lineno, "expected `<id> <id>`"));
            }
            let a: usize = toks[0].parse().map_err(|_| bad(lineno, "bad node id"))?;
            let b: usize = toks[1].parse().map_err(|_| bad(lineno, "bad node id"))?;
            if a == 0 || a > nb || b == 0 || b > nb {
                return Err(bad(lineno, "tree edge out of range"));
            }
            tree_edges.push((a - 1, b - 1));
        }
    }
    let (nb, _) = header.ok_or_else(|| bad(0, "missing header"))?;
    let mut out = Vec::with_capacity(nb);
    for (i, b) in bags.into_iter().enumerate() {
        out.push(
            b.ok_or_else(|| Error::InvalidTreeDecomposition(format!("bag {} missing", i + 1)))?,
        );
    }
    Ok(TreeDecomposition {
        bags: out,
        tree_edges,
        root: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bag_is_valid() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        let td = TreeDecomposition {
            bags: vec![[0, 1, 2].into_iter().collect()],
            tree_edges: vec![],
            root: None,
        };
        assert!(validate_td(&g, &td).is_ok());
    }

    #[test]
    fn missing_edge_is_reported() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        let td = TreeDecomposition {
            bags: vec![[0, 1].into_iter().collect(), [1, 2].into_iter().collect()],
            tree_edges: vec![(0, 1)],
            root: None,
        };
        let err = validate_td(&g, &td).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(2,0)") || msg.contains("(0,2)"), "got: {msg}");
    }

    #[test]
    fn path_of_bags_for_path_graph() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let td = TreeDecomposition {
            bags: vec![
                [0, 1].into_iter().collect(),
                [1, 2].into_iter().collect(),
                [2, 3].into_iter().collect(),
            ],
            tree_edges: vec![(0, 1), (1, 2)],
            root: None,
        };
        assert!(validate_td(&g, &td).is_ok());
    }

    #[test]
    fn heuristic_on_tree_cycle_clique() {
        let tree = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        let td = heuristic_td(&tree);
        assert!(validate_td(&tree, &td).is_ok());
        assert_eq!(td.width(), 1);

        let cycle = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let td = heuristic_td(&cycle);
        assert!(validate_td(&cycle, &td).is_ok());
        assert_eq!(td.width(), 2);

        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let td = heuristic_td(&k4);
        assert!(validate_td(&k4, &td).is_ok());
        assert_eq!(td.width(), 3);
    }

    #[test]
    fn heuristic_handles_disconnected_graphs() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3)]);
        let td = heuristic_td(&g);
        assert!(validate_td(&g, &td).is_ok());
    }

    #[test]
    fn pace_roundtrip() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let td = heuristic_td(&g);
        let text = write_pace(&td, g.num_vertices());
        let back = read_pace(&text).unwrap();
        assert_eq!(back.bags, td.bags);
        assert!(validate_td(&g, &back).is_ok());
    }

    #[test]
    fn pace_rejects_garbage() {
        assert!(read_pace("b 1 2\n").is_err());
        assert!(read_pace("s td 1 1 2\nb 1 3\n").is_err());
        assert!(read_pace("s td 2 1 2\nb 1 1\nb 2 2\n1 3\n").is_err());
    }
}
