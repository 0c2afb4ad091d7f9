//! Dynamic program over a nice tree decomposition computing the minimum
//! number (or weight) of shared edges in a p-route routing.
//!
//! The state at a decomposition node assigns, for every route, each bag
//! vertex either to the route's zero-segment (vertex absent from that
//! route's forest) or to one of its segments (traces of the forest's trees
//! on the bag). States are encoded as label vectors in restricted-growth
//! form, one label per (route, bag position): 0 is the zero-segment,
//! segments are numbered by first appearance, so equal partitions get equal
//! keys.
//!
//! The table-filling engine additionally canonicalizes states up to
//! permutation of the route indices: routes are interchangeable, so orbit
//! representatives carry the same optimum, and table sizes drop by up to
//! p!. The plain per-node rules are kept alongside as the reference
//! semantics; witnesses are rebuilt by replaying stored transitions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{CostMode, EdgeId, Graph, Instance, Routing, VertexId};
use crate::nice::{NiceTd, NodeKind};
use crate::treedecomp::heuristic_td;

pub type SigKey = Vec<u8>;

/// Where a reference-table entry came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    Leaf,
    Unary(SigKey),
    /// Child signature plus the set of routes the introduced edge joined.
    Edge(SigKey, u32),
    Join(SigKey, SigKey),
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub cost: u64,
    pub pred: Pred,
}

pub type Table = BTreeMap<SigKey, Entry>;

#[derive(Debug, Clone, Copy)]
pub struct SolveLimits {
    /// Largest admissible bag.
    pub max_bag: usize,
    /// Largest admissible table at any node.
    pub max_table: usize,
    /// Largest admissible route count.
    pub max_routes: usize,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_bag: 12,
            max_table: 12_000_000,
            max_routes: 15,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodeStats {
    pub node: usize,
    pub bag_size: usize,
    pub stored_signatures: u64,
}

#[derive(Debug, Clone, Default)]
pub struct DpStats {
    pub per_node: Vec<NodeStats>,
}

impl DpStats {
    /// Per-node signature bound `(|B|+1)^(p*|B|)`, saturating.
    pub fn signature_bound(bag_size: usize, p: usize) -> u128 {
        let base = (bag_size + 1) as u128;
        let mut acc: u128 = 1;
        for _ in 0..p * bag_size {
            acc = acc.saturating_mul(base);
        }
        acc
    }

    /// True when every recorded node respects the signature-space bound.
    pub fn within_bound(&self, p: usize) -> bool {
        self.per_node
            .iter()
            .all(|n| (n.stored_signatures as u128) <= Self::signature_bound(n.bag_size, p))
    }

    pub fn max_stored(&self) -> u64 {
        self.per_node
            .iter()
            .map(|n| n.stored_signatures)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct DpSolution {
    pub min_shared: u64,
    pub routing: Routing,
    pub stats: DpStats,
}

/// Renumbers one route's labels into restricted-growth form in place.
fn renorm_route(labels: &mut [u8]) {
    let mut map = [0u8; 256];
    let mut next = 1u8;
    for x in labels.iter_mut() {
        if *x != 0 {
            let m = &mut map[*x as usize];
            if *m == 0 {
                *m = next;
                next += 1;
            }
            *x = *m;
        }
    }
}

fn upsert(table: &mut Table, key: SigKey, cost: u64, pred: Pred) {
    match table.get_mut(&key) {
        None => {
            table.insert(key, Entry { cost, pred });
        }
        Some(e) if cost < e.cost => {
            *e = Entry { cost, pred };
        }
        _ => {}
    }
}

/// All segmentations of a `bag_size`-element bag as label vectors: position
/// labels are 0 (zero-segment) or a segment number in restricted-growth
/// order. Deterministic lexicographic order.
fn segmentations(bag_size: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; bag_size];
    fn rec(cur: &mut Vec<u8>, pos: usize, max_used: u8, out: &mut Vec<Vec<u8>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            cur[pos] = label;
            let next_max = max_used.max(label);
            rec(cur, pos + 1, next_max, out);
        }
    }
    rec(&mut cur, 0, 0, &mut out);
    out
}

/// Every signature for a bag of the given size, each exactly once, in
/// deterministic order. The count is at most `(|B|+1)^(p*|B|)`.
pub fn enumerate_signatures(bag_size: usize, p: usize, max_bag: usize) -> Result<Vec<SigKey>> {
    if bag_size > max_bag {
        return Err(Error::SignatureCapExceeded {
            bag_size,
            cap: max_bag,
        });
    }
    let segs = segmentations(bag_size);
    let mut out = Vec::new();
    let mut idx = vec![0usize; p];
    loop {
        let mut key = Vec::with_capacity(p * bag_size);
        for q in 0..p {
            key.extend_from_slice(&segs[idx[q]]);
        }
        out.push(key);
        // odometer
        let mut q = p;
        loop {
            if q == 0 {
                return Ok(out);
            }
            q -= 1;
            idx[q] += 1;
            if idx[q] < segs.len() {
                break;
            }
            idx[q] = 0;
        }
    }
}

/// Leaf rule: cost 0 exactly when every route keeps s and t as separate
/// singleton segments ({{s},{t}}, empty zero-segment); infinite otherwise.
pub fn leaf_cost(key: &[u8], p: usize) -> Option<u64> {
    if key.len() != 2 * p {
        return None;
    }
    for q in 0..p {
        if key[2 * q] != 1 || key[2 * q + 1] != 2 {
            return None;
        }
    }
    Some(0)
}

pub fn leaf_table(p: usize) -> Table {
    let mut key = Vec::with_capacity(2 * p);
    for _ in 0..p {
        key.push(1);
        key.push(2);
    }
    let mut t = Table::new();
    t.insert(
        key,
        Entry {
            cost: 0,
            pred: Pred::Leaf,
        },
    );
    t
}

/// Raw transition: insert position `pos` into each route of `child`, with
/// routes selected by `mask` getting a fresh singleton and the rest the
/// zero-segment. Output routes stay in child order.
fn apply_introduce_vertex_into(
    ckey: &[u8],
    bc: usize,
    pos: usize,
    p: usize,
    mask: u32,
    key: &mut Vec<u8>,
) {
    let bp = bc + 1;
    key.clear();
    key.resize(p * bp, 0);
    for q in 0..p {
        let cs = &ckey[q * bc..(q + 1) * bc];
        let ps = &mut key[q * bp..(q + 1) * bp];
        ps[..pos].copy_from_slice(&cs[..pos]);
        ps[pos + 1..].copy_from_slice(&cs[pos..]);
        ps[pos] = if mask & (1 << q) != 0 {
            cs.iter().copied().max().unwrap_or(0) + 1
        } else {
            0
        };
        renorm_route(ps);
    }
}

fn apply_introduce_vertex(ckey: &[u8], bc: usize, pos: usize, p: usize, mask: u32) -> SigKey {
    let bp = bc + 1;
    let mut key = vec![0u8; p * bp];
    for q in 0..p {
        let cs = &ckey[q * bc..(q + 1) * bc];
        let ps = &mut key[q * bp..(q + 1) * bp];
        ps[..pos].copy_from_slice(&cs[..pos]);
        ps[pos + 1..].copy_from_slice(&cs[pos..]);
        ps[pos] = if mask & (1 << q) != 0 {
            cs.iter().copied().max().unwrap_or(0) + 1
        } else {
            0
        };
        renorm_route(ps);
    }
    key
}

/// Raw transition: drop position `pos` from each route.
fn apply_forget(ckey: &[u8], bc: usize, pos: usize, p: usize) -> SigKey {
    let bp = bc - 1;
    let mut key = vec![0u8; p * bp];
    for q in 0..p {
        let cs = &ckey[q * bc..(q + 1) * bc];
        let ps = &mut key[q * bp..(q + 1) * bp];
        ps[..pos].copy_from_slice(&cs[..pos]);
        ps[pos..].copy_from_slice(&cs[pos + 1..]);
        renorm_route(ps);
    }
    key
}

/// Raw transition: merge the segments holding positions `pa` and `pb` in
/// the routes selected by `mask`.
fn apply_edge_into(
    ckey: &[u8],
    b: usize,
    pa: usize,
    pb: usize,
    p: usize,
    mask: u32,
    key: &mut Vec<u8>,
) {
    key.clear();
    key.extend_from_slice(ckey);
    for q in 0..p {
        if mask & (1 << q) != 0 {
            let rs = &mut key[q * b..(q + 1) * b];
            let (la, lb) = (rs[pa], rs[pb]);
            debug_assert!(la != 0 && lb != 0 && la != lb);
            for x in rs.iter_mut() {
                if *x == lb {
                    *x = la;
                }
            }
            renorm_route(rs);
        }
    }
}

fn apply_edge(ckey: &[u8], b: usize, pa: usize, pb: usize, p: usize, mask: u32) -> SigKey {
    let mut key = ckey.to_vec();
    for q in 0..p {
        if mask & (1 << q) != 0 {
            let rs = &mut key[q * b..(q + 1) * b];
            let (la, lb) = (rs[pa], rs[pb]);
            debug_assert!(la != 0 && lb != 0 && la != lb);
            for x in rs.iter_mut() {
                if *x == lb {
                    *x = la;
                }
            }
            renorm_route(rs);
        }
    }
    key
}

/// Introduce-vertex rule: the new vertex enters each route either in the
/// zero-segment or as a fresh singleton segment.
pub fn introduce_vertex_table(
    child: &Table,
    child_bag_size: usize,
    insert_pos: usize,
    p: usize,
) -> Table {
    let mut out = Table::new();
    for (ckey, entry) in child {
        for mask in 0u32..(1 << p) {
            let key = apply_introduce_vertex(ckey, child_bag_size, insert_pos, p, mask);
            upsert(&mut out, key, entry.cost, Pred::Unary(ckey.clone()));
        }
    }
    out
}

/// Forget rule: the parent signature is the child signature restricted to
/// the smaller bag; a segment whose only bag vertex is forgotten vanishes.
pub fn forget_table(child: &Table, child_bag_size: usize, remove_pos: usize, p: usize) -> Table {
    let mut out = Table::new();
    for (ckey, entry) in child {
        let key = apply_forget(ckey, child_bag_size, remove_pos, p);
        upsert(&mut out, key, entry.cost, Pred::Unary(ckey.clone()));
    }
    out
}

/// Routes where the introduced edge could join two segments: both endpoints
/// present and in distinct segments.
fn mergeable_routes(ckey: &[u8], b: usize, pa: usize, pb: usize, p: usize) -> Vec<usize> {
    (0..p)
        .filter(|q| {
            let (la, lb) = (ckey[q * b + pa], ckey[q * b + pb]);
            la != 0 && lb != 0 && la != lb
        })
        .collect()
}

/// Introduce-edge rule: per route the edge may merge the two segments
/// containing its endpoints (both present, distinct). Merging in two or more
/// routes shares the edge and charges `edge_cost`.
pub fn introduce_edge_table(
    child: &Table,
    bag_size: usize,
    pos_a: usize,
    pos_b: usize,
    edge_cost: u64,
    p: usize,
) -> Table {
    let b = bag_size;
    let mut out = Table::new();
    for (ckey, entry) in child {
        let mergeable = mergeable_routes(ckey, b, pos_a, pos_b, p);
        for bits in 0u32..(1 << mergeable.len()) {
            let mut merged_mask = 0u32;
            for (i, &q) in mergeable.iter().enumerate() {
                if bits & (1 << i) != 0 {
                    merged_mask |= 1 << q;
                }
            }
            let key = apply_edge(ckey, b, pos_a, pos_b, p, merged_mask);
            let cost = entry.cost
                + if merged_mask.count_ones() >= 2 {
                    edge_cost
                } else {
                    0
                };
            upsert(&mut out, key, cost, Pred::Edge(ckey.clone(), merged_mask));
        }
    }
    out
}

/// Combines one route of a left/right signature pair at a join node.
///
/// Returns the combined labels, or None when the pair is incompatible:
/// unequal zero-segments, two segments meeting in two or more vertices, or a
/// chain of segments closing a cycle.
fn join_route(left: &[u8], right: &[u8]) -> Option<Vec<u8>> {
    let b = left.len();
    let nl = left.iter().copied().max().unwrap_or(0) as usize;
    let nr = right.iter().copied().max().unwrap_or(0) as usize;
    // Union-find over left segments (0..nl) and right segments (nl..nl+nr).
    let mut parent: Vec<usize> = (0..nl + nr).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut seen_pairs = std::collections::BTreeSet::new();
    for i in 0..b {
        let (ll, lr) = (left[i], right[i]);
        if (ll == 0) != (lr == 0) {
            return None; // zero-segments differ
        }
        if ll == 0 {
            continue;
        }
        let a = ll as usize - 1;
        let c = nl + lr as usize - 1;
        if !seen_pairs.insert((a, c)) {
            return None; // two vertices in the same segment pair
        }
        let (ra, rc) = (find(&mut parent, a), find(&mut parent, c));
        if ra == rc {
            return None; // closing a cycle of segments
        }
        parent[ra.max(rc)] = ra.min(rc);
    }
    let mut out = vec![0u8; b];
    for i in 0..b {
        if left[i] != 0 {
            out[i] = (find(&mut parent, left[i] as usize - 1) + 1) as u8;
        }
    }
    renorm_route(&mut out);
    Some(out)
}

/// Raw transition at a join: route `q` of the result combines route `q` of
/// `left` with route `align[q]` of `right`. None when incompatible.
fn apply_join(lkey: &[u8], rkey: &[u8], b: usize, p: usize, align: &[u8]) -> Option<SigKey> {
    let mut key = Vec::with_capacity(p * b);
    for q in 0..p {
        let rq = align[q] as usize;
        let combined = join_route(&lkey[q * b..(q + 1) * b], &rkey[rq * b..(rq + 1) * b])?;
        key.extend_from_slice(&combined);
    }
    Some(key)
}

/// Join rule: pairs of child signatures with equal zero-segments combine
/// route-wise; segments chaining through shared bag vertices fuse, cycles
/// and double intersections are rejected, costs add.
pub fn join_table(left: &Table, right: &Table, bag_size: usize, p: usize) -> Table {
    let b = bag_size;
    let identity: Vec<u8> = (0..p as u8).collect();
    let mut out = Table::new();
    for (lkey, lentry) in left {
        for (rkey, rentry) in right {
            if let Some(key) = apply_join(lkey, rkey, b, p, &identity) {
                upsert(
                    &mut out,
                    key,
                    lentry.cost + rentry.cost,
                    Pred::Join(lkey.clone(), rkey.clone()),
                );
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Canonical engine: states up to route permutation.
// ---------------------------------------------------------------------------

/// Writes the canonical form of `key` (route slices sorted) into `out`.
fn canon_routes_into(key: &[u8], b: usize, p: usize, order: &mut [u8; 16], out: &mut Vec<u8>) {
    for (i, o) in order.iter_mut().take(p).enumerate() {
        *o = i as u8;
    }
    order[..p].sort_by(|&x, &y| {
        key[x as usize * b..(x as usize + 1) * b].cmp(&key[y as usize * b..(y as usize + 1) * b])
    });
    out.clear();
    for &q in &order[..p] {
        out.extend_from_slice(&key[q as usize * b..(q as usize + 1) * b]);
    }
}

/// Sorts the route slices of `key` lexicographically (stable), returning the
/// canonical key and the permutation `perm[new_pos] = old_pos`.
fn canon_routes(key: &[u8], b: usize, p: usize) -> (SigKey, Vec<u8>) {
    let mut order: Vec<u8> = (0..p as u8).collect();
    order.sort_by(|&x, &y| {
        key[x as usize * b..(x as usize + 1) * b].cmp(&key[y as usize * b..(y as usize + 1) * b])
    });
    let mut out = Vec::with_capacity(key.len());
    for &q in &order {
        out.extend_from_slice(&key[q as usize * b..(q as usize + 1) * b]);
    }
    (out, order)
}

/// Canonicalizes a signature key up to route permutation.
pub fn canonical_signature(key: &[u8], bag_size: usize, p: usize) -> SigKey {
    canon_routes(key, bag_size, p).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CPred {
    Leaf,
    /// Introduce-vertex (mask = routes taking the vertex as a singleton, in
    /// child route order) or forget (mask unused).
    Step {
        child: u32,
        mask: u32,
    },
    /// Introduce-edge; mask = routes (child order) that merged.
    Edge {
        child: u32,
        mask: u32,
    },
    /// Join; align nibble q = right route combined with left route q.
    Join {
        left: u32,
        right: u32,
        align: u64,
    },
}

/// FNV-1a; signature keys are short, so this beats the default hasher.
#[derive(Default)]
struct Fnv(u64);

impl std::hash::Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        let mut h = if self.0 == 0 {
            0xcbf29ce484222325
        } else {
            self.0
        };
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        self.0 = h;
    }
}

type FnvState = std::hash::BuildHasherDefault<Fnv>;

#[derive(Debug, Clone)]
pub struct CanonEntry {
    pub key: SigKey,
    pub cost: u64,
    pred: CPred,
}

/// One frozen per-node table: entries sorted by key.
pub type CanonTable = Vec<CanonEntry>;

fn align_get(align: u64, q: usize) -> usize {
    ((align >> (4 * q)) & 0xf) as usize
}

fn permutations(p: usize) -> Vec<Vec<u8>> {
    fn rec(remaining: &mut Vec<u8>, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..remaining.len() {
            let x = remaining.remove(i);
            cur.push(x);
            rec(remaining, cur, out);
            cur.pop();
            remaining.insert(i, x);
        }
    }
    let mut remaining: Vec<u8> = (0..p as u8).collect();
    let mut out = Vec::new();
    rec(&mut remaining, &mut Vec::new(), &mut out);
    out
}

struct Filler<'a> {
    g: &'a Graph,
    ntd: &'a NiceTd,
    p: usize,
    mode: CostMode,
    limits: &'a SolveLimits,
}

impl<'a> Filler<'a> {
    fn freeze(
        &self,
        map: std::collections::HashMap<SigKey, (u64, CPred), FnvState>,
    ) -> Result<CanonTable> {
        if map.len() > self.limits.max_table {
            return Err(Error::WorkBoundExceeded {
                needed: map.len() as u128,
                budget: self.limits.max_table as u64,
                what: "dynamic-program table",
            });
        }
        let mut out: CanonTable = map
            .into_iter()
            .map(|(key, (cost, pred))| CanonEntry { key, cost, pred })
            .collect();
        out.sort_unstable_by(|a, b| a.key.cmp(&b.key));
        Ok(out)
    }

    fn fill(&self) -> Result<(Vec<CanonTable>, DpStats)> {
        let p = self.p;
        if p > self.limits.max_routes.min(15) {
            return Err(Error::Unsupported(format!(
                "route count {p} beyond supported limit"
            )));
        }
        let mut tables: Vec<CanonTable> = (0..self.ntd.nodes.len()).map(|_| Vec::new()).collect();
        let mut stats = DpStats::default();
        let perms = permutations(p);
        type FillMap = std::collections::HashMap<SigKey, (u64, CPred), FnvState>;
        // Candidates arrive in a deterministic order (children are frozen
        // sorted, transitions enumerate in fixed order); ties keep the first.
        // The key is borrowed for the probe and only cloned on insertion.
        fn push(map: &mut FillMap, key: &[u8], cost: u64, pred: CPred) {
            match map.get_mut(key) {
                None => {
                    map.insert(key.to_vec(), (cost, pred));
                }
                Some(e) if cost < e.0 => {
                    *e = (cost, pred);
                }
                _ => {}
            }
        }
        let mut raw: Vec<u8> = Vec::new();
        let mut canon: Vec<u8> = Vec::new();
        let mut order = [0u8; 16];
        for id in self.ntd.postorder() {
            let node = &self.ntd.nodes[id];
            let b = node.bag.len();
            if b > self.limits.max_bag {
                return Err(Error::SignatureCapExceeded {
                    bag_size: b,
                    cap: self.limits.max_bag,
                });
            }
            let mut map: FillMap = FillMap::default();
            match node.kind {
                NodeKind::Leaf => {
                    let mut key = Vec::with_capacity(2 * p);
                    for _ in 0..p {
                        key.push(1);
                        key.push(2);
                    }
                    push(&mut map, &key, 0, CPred::Leaf);
                }
                NodeKind::IntroduceVertex(v) => {
                    let child = node.children[0];
                    let bc = self.ntd.nodes[child].bag.len();
                    let pos = bag_position(&node.bag, v);
                    for (idx, e) in tables[child].iter().enumerate() {
                        for mask in 0u32..(1 << p) {
                            apply_introduce_vertex_into(&e.key, bc, pos, p, mask, &mut raw);
                            canon_routes_into(&raw, b, p, &mut order, &mut canon);
                            push(
                                &mut map,
                                &canon,
                                e.cost,
                                CPred::Step {
                                    child: idx as u32,
                                    mask,
                                },
                            );
                        }
                    }
                }
                NodeKind::Forget(v) => {
                    let child = node.children[0];
                    let bc = self.ntd.nodes[child].bag.len();
                    let pos = bag_position(&self.ntd.nodes[child].bag, v);
                    for (idx, e) in tables[child].iter().enumerate() {
                        let fraw = apply_forget(&e.key, bc, pos, p);
                        canon_routes_into(&fraw, b, p, &mut order, &mut canon);
                        push(
                            &mut map,
                            &canon,
                            e.cost,
                            CPred::Step {
                                child: idx as u32,
                                mask: 0,
                            },
                        );
                    }
                }
                NodeKind::IntroduceEdge(edge) => {
                    let child = node.children[0];
                    let (va, vb) = self.g.endpoints(edge);
                    let (pa, pb) = (bag_position(&node.bag, va), bag_position(&node.bag, vb));
                    let w = self.mode.edge_cost(self.g, edge);
                    for (idx, e) in tables[child].iter().enumerate() {
                        let mergeable = mergeable_routes(&e.key, b, pa, pb, p);
                        for bits in 0u32..(1 << mergeable.len()) {
                            let mut mask = 0u32;
                            for (i, &q) in mergeable.iter().enumerate() {
                                if bits & (1 << i) != 0 {
                                    mask |= 1 << q;
                                }
                            }
                            apply_edge_into(&e.key, b, pa, pb, p, mask, &mut raw);
                            canon_routes_into(&raw, b, p, &mut order, &mut canon);
                            let cost = e.cost + if mask.count_ones() >= 2 { w } else { 0 };
                            push(
                                &mut map,
                                &canon,
                                cost,
                                CPred::Edge {
                                    child: idx as u32,
                                    mask,
                                },
                            );
                        }
                    }
                }
                NodeKind::Join => {
                    let (lc, rc) = (node.children[0], node.children[1]);
                    // Bucket the right table by the sorted multiset of
                    // per-route zero-patterns; only matching multisets can
                    // pair under some alignment.
                    let zsig = |key: &SigKey| -> Vec<u8> {
                        let mut per: Vec<Vec<u8>> = (0..p)
                            .map(|q| {
                                key[q * b..(q + 1) * b]
                                    .iter()
                                    .map(|&l| (l == 0) as u8)
                                    .collect()
                            })
                            .collect();
                        per.sort_unstable();
                        per.concat()
                    };
                    let mut buckets: BTreeMap<Vec<u8>, Vec<u32>> = BTreeMap::new();
                    for (idx, e) in tables[rc].iter().enumerate() {
                        buckets.entry(zsig(&e.key)).or_default().push(idx as u32);
                    }
                    for (lidx, le) in tables[lc].iter().enumerate() {
                        let Some(cands) = buckets.get(&zsig(&le.key)) else {
                            continue;
                        };
                        for &ridx in cands {
                            let re = &tables[rc][ridx as usize];
                            for perm in &perms {
                                if let Some(jraw) = apply_join(&le.key, &re.key, b, p, perm) {
                                    canon_routes_into(&jraw, b, p, &mut order, &mut canon);
                                    let mut align = 0u64;
                                    for (q, &rq) in perm.iter().enumerate() {
                                        align |= (rq as u64) << (4 * q);
                                    }
                                    push(
                                        &mut map,
                                        &canon,
                                        le.cost + re.cost,
                                        CPred::Join {
                                            left: lidx as u32,
                                            right: ridx,
                                            align,
                                        },
                                    );
                                }
                            }
                        }
                    }
                }
            }
            let table = self.freeze(map)?;
            stats.per_node.push(NodeStats {
                node: id,
                bag_size: b,
                stored_signatures: table.len() as u64,
            });
            tables[id] = table;
        }
        Ok((tables, stats))
    }
}

/// Fills canonical tables for inspection or testing: per node, entries
/// sorted by key with their optimal costs.
pub fn fill_canonical_tables(
    inst: &Instance,
    ntd: &NiceTd,
    mode: CostMode,
    limits: &SolveLimits,
) -> Result<(Vec<CanonTable>, DpStats)> {
    Filler {
        g: &inst.graph,
        ntd,
        p: inst.num_routes,
        mode,
        limits,
    }
    .fill()
}

fn bag_position(bag: &[VertexId], v: VertexId) -> usize {
    bag.binary_search(&v).expect("vertex must be in bag")
}

/// Walks stored transitions from the root entry down to the leaves,
/// replaying each to recover route identities, and collects the edges each
/// route's forest uses.
fn collect_route_edges(
    g: &Graph,
    ntd: &NiceTd,
    tables: &[CanonTable],
    root_entry: usize,
    p: usize,
) -> Vec<Vec<EdgeId>> {
    let mut route_edges: Vec<Vec<EdgeId>> = vec![Vec::new(); p];
    // (node, entry index, slot[final route] = route position in this entry)
    let ident: Vec<u8> = (0..p as u8).collect();
    let mut stack: Vec<(usize, usize, Vec<u8>)> = vec![(ntd.root, root_entry, ident)];
    while let Some((id, idx, slot)) = stack.pop() {
        let node = &ntd.nodes[id];
        let b = node.bag.len();
        let entry = &tables[id][idx];
        // Translate slots through the canonicalizing sort of the raw key.
        let descend = |raw: &SigKey, slot: &[u8]| -> Vec<u8> {
            let (key, perm) = canon_routes(raw, b, p);
            debug_assert_eq!(&key, &entry.key);
            slot.iter().map(|&f| perm[f as usize]).collect()
        };
        match entry.pred {
            CPred::Leaf => {}
            CPred::Step { child, mask } => {
                let cid = node.children[0];
                let ckey = &tables[cid][child as usize].key;
                let bc = ntd.nodes[cid].bag.len();
                let raw = match node.kind {
                    NodeKind::IntroduceVertex(v) => {
                        apply_introduce_vertex(ckey, bc, bag_position(&node.bag, v), p, mask)
                    }
                    NodeKind::Forget(v) => {
                        apply_forget(ckey, bc, bag_position(&ntd.nodes[cid].bag, v), p)
                    }
                    _ => unreachable!("step predecessor on a unary node"),
                };
                let slot = descend(&raw, &slot);
                stack.push((cid, child as usize, slot));
            }
            CPred::Edge { child, mask } => {
                let NodeKind::IntroduceEdge(e) = node.kind else {
                    unreachable!("edge predecessor on an edge node")
                };
                let cid = node.children[0];
                let ckey = &tables[cid][child as usize].key;
                let (va, vb) = g.endpoints(e);
                let (pa, pb) = (bag_position(&node.bag, va), bag_position(&node.bag, vb));
                let raw = apply_edge(ckey, b, pa, pb, p, mask);
                let slot = descend(&raw, &slot);
                for f in 0..p {
                    if mask & (1 << slot[f]) != 0 {
                        route_edges[f].push(e);
                    }
                }
                stack.push((cid, child as usize, slot));
            }
            CPred::Join { left, right, align } => {
                let (lc, rc) = (node.children[0], node.children[1]);
                let lkey = &tables[lc][left as usize].key;
                let rkey = &tables[rc][right as usize].key;
                let perm: Vec<u8> = (0..p).map(|q| align_get(align, q) as u8).collect();
                let raw = apply_join(lkey, rkey, b, p, &perm).expect("stored join replays");
                let slot_l = descend(&raw, &slot);
                let slot_r: Vec<u8> = slot_l
                    .iter()
                    .map(|&q| align_get(align, q as usize) as u8)
                    .collect();
                stack.push((lc, left as usize, slot_l));
                stack.push((rc, right as usize, slot_r));
            }
        }
    }
    route_edges
}

/// Reduces one route's forest to an s-t path by breadth-first search inside
/// the tree containing both endpoints.
fn forest_to_path(g: &Graph, edges: &[EdgeId], s: VertexId, t: VertexId) -> Vec<VertexId> {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &e in edges {
        let (a, b) = g.endpoints(e);
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut pred: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(s);
    pred.insert(s, s);
    while let Some(v) = queue.pop_front() {
        if v == t {
            break;
        }
        if let Some(ns) = adj.get(&v) {
            for &w in ns {
                if !pred.contains_key(&w) {
                    pred.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
    }
    assert!(
        pred.contains_key(&t),
        "route forest must connect source and sink"
    );
    let mut path = vec![t];
    let mut v = t;
    while v != s {
        v = pred[&v];
        path.push(v);
    }
    path.reverse();
    path
}

/// Runs the dynamic program over the given nice decomposition.
///
/// Returns None when no routing exists (source and sink disconnected).
/// The witness routing always verifies with exactly the reported optimum.
pub fn solve_on(
    inst: &Instance,
    ntd: &NiceTd,
    mode: CostMode,
    limits: &SolveLimits,
) -> Result<Option<DpSolution>> {
    let g = &inst.graph;
    let p = inst.num_routes;
    ntd.validate(g)?;
    let (tables, stats) = fill_canonical_tables(inst, ntd, mode, limits)?;
    // Answer: cheapest root signature where every route has one segment
    // holding both s and t.
    let root_bag = &ntd.nodes[ntd.root].bag;
    let b = root_bag.len();
    let (sp, tp) = (
        bag_position(root_bag, inst.source),
        bag_position(root_bag, inst.sink),
    );
    let mut best: Option<(usize, u64)> = None;
    for (idx, entry) in tables[ntd.root].iter().enumerate() {
        let connected = (0..p).all(|q| {
            let ls = entry.key[q * b + sp];
            ls != 0 && ls == entry.key[q * b + tp]
        });
        if connected && best.map_or(true, |(_, c)| entry.cost < c) {
            best = Some((idx, entry.cost));
        }
    }
    let Some((root_entry, min_shared)) = best else {
        return Ok(None);
    };
    let route_edges = collect_route_edges(g, ntd, &tables, root_entry, p);
    let routes: Vec<Vec<VertexId>> = route_edges
        .iter()
        .map(|edges| forest_to_path(g, edges, inst.source, inst.sink))
        .collect();
    let routing = Routing::from_routes(g, routes);
    let check = crate::graph::verify_routing(inst, &routing.routes, mode);
    assert!(check.valid, "reconstructed routing must be valid");
    assert_eq!(
        check.shared_count, min_shared,
        "witness must match the optimum"
    );
    Ok(Some(DpSolution {
        min_shared,
        routing,
        stats,
    }))
}

/// Unweighted solve over a caller-supplied decomposition.
pub fn solve(inst: &Instance, ntd: &NiceTd, limits: &SolveLimits) -> Result<Option<DpSolution>> {
    solve_on(inst, ntd, CostMode::Count, limits)
}

/// Weighted solve: shared edges charge their weight.
pub fn solve_weighted(
    inst: &Instance,
    ntd: &NiceTd,
    limits: &SolveLimits,
) -> Result<Option<DpSolution>> {
    solve_on(inst, ntd, CostMode::Weighted, limits)
}

/// Convenience path: heuristic decomposition, normalization, then solve.
pub fn solve_auto(
    inst: &Instance,
    mode: CostMode,
    limits: &SolveLimits,
) -> Result<Option<DpSolution>> {
    let td = heuristic_td(&inst.graph);
    let ntd = crate::nice::make_nice_with_edges(&inst.graph, &td, inst.source, inst.sink)?;
    solve_on(inst, &ntd, mode, limits)
}
