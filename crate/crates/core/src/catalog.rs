//! Test catalogs: every connected graph up to isomorphism at desk scale,
//! plus seeded random connected graphs.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, GraphBuilder};

/// Canonical form of a small graph: the lexicographically smallest adjacency
/// bitstring over all vertex permutations. Exponential; for n <= 8 only.
pub fn canonical_form(g: &Graph) -> Vec<u64> {
    let n = g.num_vertices();
    assert!(n <= 8, "canonical form is brute force");
    let mut adj = vec![0u64; n];
    for (_, a, b, _) in g.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<u64>> = None;
    loop {
        let mut relabeled = vec![0u64; n];
        for v in 0..n {
            for w in 0..n {
                if adj[v] & (1 << w) != 0 {
                    relabeled[perm[v]] |= 1 << perm[w];
                }
            }
        }
        if best.as_ref().map_or(true, |b| relabeled < *b) {
            best = Some(relabeled);
        }
        // Next lexicographic permutation.
        let mut i = n.wrapping_sub(1);
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    best.unwrap()
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Every connected graph with exactly `n` vertices and at most `max_edges`
/// edges, one representative per isomorphism class, deterministic order.
pub fn connected_graphs_up_to_iso(n: usize, max_edges: usize) -> Vec<Graph> {
    assert!(n >= 1 && n <= 7, "exhaustive enumeration is desk scale");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        if (mask.count_ones() as usize) > max_edges {
            continue;
        }
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e)
            .collect();
        if !is_connected(n, &edges) {
            continue;
        }
        let g = Graph::from_edges(n, &edges);
        if seen.insert(canonical_form(&g)) {
            out.push(g);
        }
    }
    out
}

/// A connected random graph: a random spanning tree plus extra edges, with
/// weights drawn from `1..=max_weight`.
pub fn random_connected_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    extra_edges: usize,
    max_weight: u64,
) -> Graph {
    assert!(n >= 2);
    let mut b = GraphBuilder::new(n);
    let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
    let weight = |rng: &mut ChaCha8Rng| {
        if max_weight <= 1 {
            1
        } else {
            rng.gen_range(1..=max_weight)
        }
    };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present.insert((u, v));
        let w = weight(rng);
        b.add_weighted_edge(u, v, w);
    }
    let max_extra = n * (n - 1) / 2 - (n - 1);
    for _ in 0..extra_edges.min(max_extra) {
        // Rejection sampling; the cap above guarantees a free slot.
        loop {
            let a = rng.gen_range(0..n);
            let c = rng.gen_range(0..n);
            if a == c {
                continue;
            }
            let key = (a.min(c), a.max(c));
            if present.insert(key) {
                let w = weight(rng);
                b.add_weighted_edge(key.0, key.1, w);
                break;
            }
        }
    }
    b.build()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
