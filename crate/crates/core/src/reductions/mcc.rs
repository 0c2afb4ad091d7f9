//! Clique-selection instance generator: encodes "does the k-partite graph
//! contain a clique with one vertex per class" into a shared-edges instance
//! built from chains, bundles and feathers, with vertex ids drawn from a
//! collision-free integer assignment. Comes with an explicit narrow tree
//! decomposition and a structural validator.
//!
//! These instances are benchmark artifacts: the faithful chain lengths grow
//! like k^10, so solving them is out of the question by design.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, Instance, VertexId};
use crate::reductions::gadget::{ChainRecord, GadgetBuilder};
use crate::reductions::sidon::{check_properties, sidon_assignment, SidonAssignment, SidonCheck};
use crate::treedecomp::TreeDecomposition;

/// A k-partite graph with explicitly declared classes. Vertices are
/// addressed as (class, index-within-class), both 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPartiteGraph {
    pub class_sizes: Vec<usize>,
    pub edges: Vec<((usize, usize), (usize, usize))>,
}

impl KPartiteGraph {
    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.class_sizes.iter().sum()
    }

    fn global_index(&self, class: usize, idx: usize) -> usize {
        self.class_sizes[..class].iter().sum::<usize>() + idx
    }

    fn validate(&self) -> Result<()> {
        let k = self.num_classes();
        if k < 2 {
            return Err(Error::NotKPartite("need at least two classes".into()));
        }
        for (i, &sz) in self.class_sizes.iter().enumerate() {
            if sz == 0 {
                return Err(Error::NotKPartite(format!("class {i} is empty")));
            }
        }
        let mut seen = BTreeSet::new();
        for &((ci, vi), (cj, vj)) in &self.edges {
            if ci >= k || cj >= k || vi >= self.class_sizes[ci] || vj >= self.class_sizes[cj] {
                return Err(Error::NotKPartite(format!(
                    "edge ({ci}.{vi})-({cj}.{vj}) out of range"
                )));
            }
            if ci == cj {
                return Err(Error::NotKPartite(format!("edge inside class {ci}")));
            }
            let key = if ci < cj {
                ((ci, vi), (cj, vj))
            } else {
                ((cj, vj), (ci, vi))
            };
            if !seen.insert(key) {
                return Err(Error::NotKPartite("duplicate edge".into()));
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                if self.pair_edges(i, j).is_empty() {
                    return Err(Error::NotKPartite(format!(
                        "no edge between classes {i} and {j}; the construction is undefined"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Edges between classes `i < j`, sorted.
    fn pair_edges(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&((ci, vi), (cj, vj))| {
                if (ci, cj) == (i, j) {
                    Some((vi, vj))
                } else if (ci, cj) == (j, i) {
                    Some((vj, vi))
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Chain-length configuration. The faithful lengths are k^10 and k^5;
/// smaller exponents give structurally identical but non-faithful instances
/// for testing the machinery at manageable sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MccConfig {
    pub exp_selector: u32,
    pub exp_relay: u32,
}

impl MccConfig {
    pub const FAITHFUL: MccConfig = MccConfig {
        exp_selector: 10,
        exp_relay: 5,
    };

    pub fn scaled(exp_selector: u32, exp_relay: u32) -> MccConfig {
        MccConfig {
            exp_selector,
            exp_relay,
        }
    }

    pub fn is_faithful(&self) -> bool {
        *self == MccConfig::FAITHFUL
    }

    fn selector_len(&self, k: usize) -> u64 {
        (k as u64).pow(self.exp_selector)
    }

    fn relay_len(&self, k: usize) -> u64 {
        (k as u64).pow(self.exp_relay)
    }
}

fn choose2(k: u64) -> u64 {
    k * (k - 1) / 2
}

/// The budget formula for the given chain lengths.
pub fn budget_formula(k: usize, selector_len: u64, relay_len: u64) -> u64 {
    let k = k as u64;
    k * selector_len + k * (k + 2 * (k - 1)) * relay_len + choose2(k) * 3 * k
}

/// The route-count formula; independent of the chain lengths.
pub fn route_formula(k: usize, num_edges: usize, modulus: u64, n: usize) -> u64 {
    let k64 = k as u64;
    (num_edges as u64 - choose2(k64)) + k64 * ((k64 - 1) * modulus + 1) + n as u64
}

/// Faithful (p, k') for an input, computed without building the graph.
pub fn faithful_parameters(input: &KPartiteGraph) -> Result<(u64, u64)> {
    input.validate()?;
    let k = input.num_classes();
    let sidon = sidon_assignment(input.num_vertices());
    let cfg = MccConfig::FAITHFUL;
    Ok((
        route_formula(k, input.edges.len(), sidon.modulus, input.num_vertices()),
        budget_formula(k, cfg.selector_len(k), cfg.relay_len(k)),
    ))
}

/// One structural component of the generated graph, for recounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentSpec {
    Bundle {
        from: String,
        to: String,
        count: u64,
        len: u64,
    },
    Feather {
        from: String,
        hub: String,
        to: String,
        shaft_len: u64,
        barb_count: u64,
        barb_len: u64,
    },
    Chain {
        from: String,
        to: String,
        len: u64,
    },
}

#[derive(Debug, Clone)]
pub struct MccReport {
    pub k: usize,
    pub class_sizes: Vec<usize>,
    pub num_input_edges: usize,
    pub sidon: SidonAssignment,
    pub routes: u64,
    pub budget: u64,
    pub config: MccConfig,
    pub selector_len: u64,
    pub relay_len: u64,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub components: Vec<ComponentSpec>,
    pub td_width: usize,
}

#[derive(Debug)]
pub struct MccOutput {
    pub instance: Instance,
    pub report: MccReport,
    pub tree_decomposition: TreeDecomposition,
}

/// Closed-form size of the generated graph, summed component by component:
/// `(vertices, edges)`. Derived independently of the builder, so tests can
/// hold the construction against it.
pub fn closed_form_size(input: &KPartiteGraph, config: MccConfig) -> Result<(u64, u64)> {
    input.validate()?;
    let k = input.num_classes();
    let n = input.num_vertices();
    let sidon = sidon_assignment(n);
    let m_big = sidon.modulus;
    let len10 = config.selector_len(k);
    let len5 = config.relay_len(k);
    let long = budget_formula(k, len10, len5) + 1;
    let k64 = k as u64;
    // A chain of length L contributes L edges and L-1 interior vertices; a
    // bundle or feather is a sum of chains. Anchors are counted separately.
    let mut edges: u64 = 0;
    let mut interior: u64 = 0;
    let mut anchors: u64 = 2 + k64 + 2 * choose2(k64); // s, t, class and pair anchors
    let chain = |count: u64, len: u64, edges: &mut u64, interior: &mut u64| {
        *edges += count * len;
        *interior += count * (len - 1);
    };
    for i in 0..k {
        let ni = input.class_sizes[i] as u64;
        chain((k64 - 1) * m_big + ni + 1, long, &mut edges, &mut interior);
        for j in 0..input.class_sizes[i] {
            anchors += 1 + k64; // the choice vertex and its relays
            chain(1, len10, &mut edges, &mut interior);
            chain(k64, len5, &mut edges, &mut interior); // subdivided relay chain
            let g = sidon.ids[input.global_index(i, j)];
            let gbar = sidon.complements[input.global_index(i, j)];
            // One id feather and one complement feather per relay slot.
            anchors += 2 * (k64 - 1);
            chain(2 * (k64 - 1), len5, &mut edges, &mut interior); // shafts
            chain((k64 - 1) * g, long, &mut edges, &mut interior); // id barbs
            chain((k64 - 1) * gbar, long, &mut edges, &mut interior); // complement barbs
            chain(2, long, &mut edges, &mut interior); // bundle into the sink
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let pair_edges = input.pair_edges(i, j);
            chain(pair_edges.len() as u64 - 1, long, &mut edges, &mut interior);
            for &(y, z) in &pair_edges {
                anchors += 3; // the edge vertex and its two hubs
                let sum = sidon.ids[input.global_index(i, y)] + sidon.ids[input.global_index(j, z)];
                let bar_sum = sidon.complements[input.global_index(i, y)]
                    + sidon.complements[input.global_index(j, z)];
                chain(2, k64, &mut edges, &mut interior); // both shafts
                chain(sum + bar_sum, long, &mut edges, &mut interior); // barbs
                chain(1, k64, &mut edges, &mut interior); // edge vertex to sink
            }
        }
    }
    Ok((anchors + interior, edges))
}

struct Labels;

impl Labels {
    fn class(i: usize) -> String {
        format!("sel:{i}:c")
    }
    fn choice(i: usize, j: usize) -> String {
        format!("sel:{i}:x:{j}")
    }
    fn relay(i: usize, j: usize, l: usize) -> String {
        format!("sel:{i}:x:{j}:relay:{l}")
    }
    fn relay_hub(i: usize, j: usize, l: usize, bar: bool) -> String {
        format!(
            "sel:{i}:x:{j}:relay:{l}:hub:{}",
            if bar { "gbar" } else { "g" }
        )
    }
    fn pair(i: usize, j: usize) -> String {
        format!("val:{i},{j}:cc")
    }
    fn pair_bar(i: usize, j: usize) -> String {
        format!("val:{i},{j}:ccbar")
    }
    fn edge_vertex(i: usize, j: usize, y: usize, z: usize) -> String {
        format!("val:{i},{j}:edge:{y},{z}")
    }
    fn edge_hub(i: usize, j: usize, y: usize, z: usize, bar: bool) -> String {
        format!(
            "val:{i},{j}:edge:{y},{z}:hub:{}",
            if bar { "gbar" } else { "g" }
        )
    }
}

/// Builds the full instance. Every route forced through a selection gadget
/// relays the chosen vertex's id into the validation gadgets; a pair of
/// classes validates cheaply only if the relayed id sum matches an edge.
pub fn mcc_to_mse(input: &KPartiteGraph, config: MccConfig) -> Result<MccOutput> {
    input.validate()?;
    let k = input.num_classes();
    let n = input.num_vertices();
    let sidon = sidon_assignment(n);
    let len10 = config.selector_len(k);
    let len5 = config.relay_len(k);
    let budget = budget_formula(k, len10, len5);
    let routes = route_formula(k, input.edges.len(), sidon.modulus, n);
    let long = budget + 1;
    let m_big = sidon.modulus;

    let mut b = GadgetBuilder::new();
    let mut components: Vec<ComponentSpec> = Vec::new();
    let s = b.add_anchor("s");
    let t = b.add_anchor("t");
    let class_anchor: Vec<VertexId> = (0..k).map(|i| b.add_anchor(Labels::class(i))).collect();
    let mut pair_anchor: BTreeMap<(usize, usize), (VertexId, VertexId)> = BTreeMap::new();
    for i in 0..k {
        for j in i + 1..k {
            let cc = b.add_anchor(Labels::pair(i, j));
            let ccbar = b.add_anchor(Labels::pair_bar(i, j));
            pair_anchor.insert((i, j), (cc, ccbar));
        }
    }
    // Members of the shared root bag of the decomposition.
    let mut core: BTreeSet<VertexId> = [s, t].into_iter().collect();
    core.extend(class_anchor.iter().copied());
    for &(cc, ccbar) in pair_anchor.values() {
        core.insert(cc);
        core.insert(ccbar);
    }

    let bundle = |b: &mut GadgetBuilder,
                  comps: &mut Vec<ComponentSpec>,
                  from: VertexId,
                  to: VertexId,
                  fl: String,
                  tl: String,
                  count: u64,
                  len: u64| {
        b.add_bundle(from, to, count, len);
        comps.push(ComponentSpec::Bundle {
            from: fl,
            to: tl,
            count,
            len,
        });
    };

    // Selection gadgets.
    for i in 0..k {
        let ni = input.class_sizes[i] as u64;
        bundle(
            &mut b,
            &mut components,
            s,
            class_anchor[i],
            "s".into(),
            Labels::class(i),
            (k as u64 - 1) * m_big + ni + 1,
            long,
        );
        for j in 0..input.class_sizes[i] {
            let x = b.add_anchor(Labels::choice(i, j));
            b.add_chain(class_anchor[i], x, len10);
            components.push(ComponentSpec::Chain {
                from: Labels::class(i),
                to: Labels::choice(i, j),
                len: len10,
            });
            let gid = sidon.ids[input.global_index(i, j)];
            let gbar = sidon.complements[input.global_index(i, j)];
            let mut prev = x;
            let mut prev_label = Labels::choice(i, j);
            for l in 1..=k {
                let relay = b.add_anchor(Labels::relay(i, j, l));
                b.add_chain(prev, relay, len5);
                components.push(ComponentSpec::Chain {
                    from: prev_label.clone(),
                    to: Labels::relay(i, j, l),
                    len: len5,
                });
                if l <= k - 1 {
                    // Relay slot l talks to the validation gadget of classes
                    // {i, l'} where l' skips i itself.
                    let lp = if l - 1 < i { l - 1 } else { l };
                    let (lo, hi) = (i.min(lp), i.max(lp));
                    let (cc, ccbar) = pair_anchor[&(lo, hi)];
                    let hub = b.add_feather(
                        relay,
                        cc,
                        len5,
                        gid,
                        long,
                        Labels::relay_hub(i, j, l, false),
                    );
                    debug_assert!(b.graph.num_vertices() > hub);
                    components.push(ComponentSpec::Feather {
                        from: Labels::relay(i, j, l),
                        hub: Labels::relay_hub(i, j, l, false),
                        to: Labels::pair(lo, hi),
                        shaft_len: len5,
                        barb_count: gid,
                        barb_len: long,
                    });
                    b.add_feather(
                        relay,
                        ccbar,
                        len5,
                        gbar,
                        long,
                        Labels::relay_hub(i, j, l, true),
                    );
                    components.push(ComponentSpec::Feather {
                        from: Labels::relay(i, j, l),
                        hub: Labels::relay_hub(i, j, l, true),
                        to: Labels::pair_bar(lo, hi),
                        shaft_len: len5,
                        barb_count: gbar,
                        barb_len: long,
                    });
                }
                prev = relay;
                prev_label = Labels::relay(i, j, l);
            }
            bundle(
                &mut b,
                &mut components,
                prev,
                t,
                Labels::relay(i, j, k),
                "t".into(),
                2,
                long,
            );
        }
    }

    // Validation gadgets.
    for i in 0..k {
        for j in i + 1..k {
            let (cc, ccbar) = pair_anchor[&(i, j)];
            let pair_edges = input.pair_edges(i, j);
            bundle(
                &mut b,
                &mut components,
                s,
                cc,
                "s".into(),
                Labels::pair(i, j),
                pair_edges.len() as u64 - 1,
                long,
            );
            for &(y, z) in &pair_edges {
                let gy = sidon.ids[input.global_index(i, y)];
                let gz = sidon.ids[input.global_index(j, z)];
                let gby = sidon.complements[input.global_index(i, y)];
                let gbz = sidon.complements[input.global_index(j, z)];
                // Shaft at the pair anchor, barbs into the edge vertex; built
                // from the edge vertex outward so the decomposition spine
                // follows the gadget tree.
                let ev = b.add_anchor(Labels::edge_vertex(i, j, y, z));
                let hub = b.add_anchor(Labels::edge_hub(i, j, y, z, false));
                b.add_bundle(hub, ev, gy + gz, long);
                b.add_chain(cc, hub, k as u64);
                components.push(ComponentSpec::Feather {
                    from: Labels::pair(i, j),
                    hub: Labels::edge_hub(i, j, y, z, false),
                    to: Labels::edge_vertex(i, j, y, z),
                    shaft_len: k as u64,
                    barb_count: gy + gz,
                    barb_len: long,
                });
                let hub_bar = b.add_anchor(Labels::edge_hub(i, j, y, z, true));
                b.add_bundle(hub_bar, ev, gby + gbz, long);
                b.add_chain(ccbar, hub_bar, k as u64);
                components.push(ComponentSpec::Feather {
                    from: Labels::pair_bar(i, j),
                    hub: Labels::edge_hub(i, j, y, z, true),
                    to: Labels::edge_vertex(i, j, y, z),
                    shaft_len: k as u64,
                    barb_count: gby + gbz,
                    barb_len: long,
                });
                b.add_chain(ev, t, k as u64);
                components.push(ComponentSpec::Chain {
                    from: Labels::edge_vertex(i, j, y, z),
                    to: "t".into(),
                    len: k as u64,
                });
            }
        }
    }

    let chains = b.chains.clone();
    let graph = b.graph.build();
    debug_assert_eq!(graph.degree(s) as u64, routes, "one source chain per route");

    let td = build_gadget_td(&graph, &core, &chains);
    let td_width = td.width();
    let report = MccReport {
        k,
        class_sizes: input.class_sizes.clone(),
        num_input_edges: input.edges.len(),
        sidon,
        routes,
        budget,
        config,
        selector_len: len10,
        relay_len: len5,
        num_vertices: graph.num_vertices(),
        num_edges: graph.num_edges(),
        components,
        td_width,
    };
    let instance = Instance::new(graph, s, t, routes as usize, budget)?;
    Ok(MccOutput {
        instance,
        report,
        tree_decomposition: td,
    })
}

/// Tree decomposition for a chain-recorded gadget graph: one shared root bag
/// holding the interconnect vertices, one spine bag per chain hung off the
/// bag that introduced its most recent endpoint, and one bag per chain edge.
/// Width is at most |core| + 3.
fn build_gadget_td(
    graph: &Graph,
    core: &BTreeSet<VertexId>,
    chains: &[ChainRecord],
) -> TreeDecomposition {
    let _ = graph;
    let mut bags: Vec<BTreeSet<VertexId>> = vec![core.clone()];
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    // For each non-core anchor: the bag that introduced it, and when.
    let mut intro: BTreeMap<VertexId, (usize, usize)> = BTreeMap::new();
    for (seq, chain) in chains.iter().enumerate() {
        let mut spine = core.clone();
        spine.insert(chain.a);
        spine.insert(chain.b);
        let parent = [chain.a, chain.b]
            .into_iter()
            .filter(|v| !core.contains(v))
            .filter_map(|v| intro.get(&v).copied())
            .max_by_key(|&(_, when)| when)
            .map(|(bag, _)| bag)
            .unwrap_or(0);
        let spine_idx = bags.len();
        debug_assert!(
            [chain.a, chain.b]
                .into_iter()
                .all(|v| core.contains(&v) || !intro.contains_key(&v) || bags[parent].contains(&v)),
            "seen endpoints must already live in the parent bag"
        );
        bags.push(spine);
        tree_edges.push((parent, spine_idx));
        for v in [chain.a, chain.b] {
            if !core.contains(&v) {
                intro.entry(v).or_insert((spine_idx, seq));
            }
        }
        // One bag per chain edge: core + both anchors + the edge's ends.
        let (int_start, int_end) = chain.interior;
        let mut prev_bag = spine_idx;
        let mut prev_vertex = chain.a;
        for x in int_start..int_end {
            let mut bag = core.clone();
            bag.insert(chain.a);
            bag.insert(chain.b);
            bag.insert(prev_vertex);
            bag.insert(x);
            let idx = bags.len();
            bags.push(bag);
            tree_edges.push((prev_bag, idx));
            prev_bag = idx;
            prev_vertex = x;
        }
        // Last interior vertex to b is covered by the final bag (or the
        // spine bag for a direct edge).
        if int_start != int_end {
            let mut bag = core.clone();
            bag.insert(chain.a);
            bag.insert(chain.b);
            bag.insert(prev_vertex);
            let idx = bags.len();
            bags.push(bag);
            tree_edges.push((prev_bag, idx));
        }
    }
    TreeDecomposition {
        bags,
        tree_edges,
        root: Some(0),
    }
}

/// Recounts every recorded component against the graph and re-verifies the
/// id assignment. Walks stop at labeled vertices, so anchor labels navigate
/// the graph without a vertex-count-sized index.
pub fn validate_gadget_graph(instance: &Instance, report: &MccReport) -> Result<()> {
    let g = &instance.graph;
    if g.num_vertices() != report.num_vertices || g.num_edges() != report.num_edges {
        return Err(Error::MalformedFamily(format!(
            "size mismatch: graph has ({}, {}), report says ({}, {})",
            g.num_vertices(),
            g.num_edges(),
            report.num_vertices,
            report.num_edges
        )));
    }
    let n_input: usize = report.class_sizes.iter().sum();
    let sidon_check: SidonCheck = check_properties(&report.sidon, n_input);
    if !sidon_check.all_hold() {
        return Err(Error::MalformedFamily(format!(
            "id assignment check failed: {sidon_check:?}"
        )));
    }
    if report.routes
        != route_formula(
            report.k,
            report.num_input_edges,
            report.sidon.modulus,
            n_input,
        )
        || report.budget != budget_formula(report.k, report.selector_len, report.relay_len)
    {
        return Err(Error::MalformedFamily(
            "parameter formulas do not match the report".into(),
        ));
    }
    let label_of: BTreeMap<&str, VertexId> = g
        .labels()
        .iter()
        .map(|(&v, lab)| (lab.as_str(), v))
        .collect();
    let resolve = |label: &str| -> Result<VertexId> {
        label_of
            .get(label)
            .copied()
            .ok_or_else(|| Error::MalformedFamily(format!("anchor `{label}` missing")))
    };
    // Expected multiset of (far endpoint, chain length) per anchor.
    let mut expected: BTreeMap<VertexId, BTreeMap<(VertexId, u64), u64>> = BTreeMap::new();
    let mut note = |a: VertexId, b: VertexId, len: u64, count: u64| {
        *expected.entry(a).or_default().entry((b, len)).or_insert(0) += count;
        *expected.entry(b).or_default().entry((a, len)).or_insert(0) += count;
    };
    for comp in &report.components {
        match comp {
            ComponentSpec::Bundle {
                from,
                to,
                count,
                len,
            } => {
                if *count > 0 {
                    note(resolve(from)?, resolve(to)?, *len, *count);
                }
            }
            ComponentSpec::Chain { from, to, len } => {
                note(resolve(from)?, resolve(to)?, *len, 1);
            }
            ComponentSpec::Feather {
                from,
                hub,
                to,
                shaft_len,
                barb_count,
                barb_len,
            } => {
                let h = resolve(hub)?;
                note(resolve(from)?, h, *shaft_len, 1);
                if *barb_count > 0 {
                    note(h, resolve(to)?, *barb_len, *barb_count);
                }
            }
        }
    }
    let labeled: BTreeSet<VertexId> = g.labels().keys().copied().collect();
    for (&anchor, want) in &expected {
        let mut got: BTreeMap<(VertexId, u64), u64> = BTreeMap::new();
        for &(start, first_edge) in g.neighbors(anchor) {
            let (mut cur, mut via) = (start, first_edge);
            let mut len = 1u64;
            while !labeled.contains(&cur) && g.degree(cur) == 2 {
                let &(next, edge) = g
                    .neighbors(cur)
                    .iter()
                    .find(|&&(_, e)| e != via)
                    .expect("degree-2 vertex has another edge");
                cur = next;
                via = edge;
                len += 1;
            }
            if labeled.contains(&cur) {
                *got.entry((cur, len)).or_insert(0) += 1;
            } else {
                return Err(Error::MalformedFamily(format!(
                    "chain from `{}` dead-ends after {len} edges",
                    g.label(anchor).unwrap_or("?")
                )));
            }
        }
        if &got != want {
            let name = g.label(anchor).unwrap_or("?");
            // Point at a component touching this anchor for the message.
            let culprit = report
                .components
                .iter()
                .find(|c| match c {
                    ComponentSpec::Bundle { from, to, .. } => {
                        label_of.get(from.as_str()) == Some(&anchor)
                            || label_of.get(to.as_str()) == Some(&anchor)
                    }
                    ComponentSpec::Chain { from, to, .. } => {
                        label_of.get(from.as_str()) == Some(&anchor)
                            || label_of.get(to.as_str()) == Some(&anchor)
                    }
                    ComponentSpec::Feather { from, hub, to, .. } => [from, hub, to]
                        .iter()
                        .any(|l| label_of.get(l.as_str()) == Some(&anchor)),
                })
                .map(|c| format!("{c:?}"))
                .unwrap_or_else(|| "unknown component".into());
            return Err(Error::MalformedFamily(format!(
                "component mismatch at `{name}` ({culprit}): expected {want:?}, found {got:?}"
            )));
        }
    }
    Ok(())
}
