//! The acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture`). The solver catalog is swept once and
//! shared across the criteria that consume it.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use mse_core::catalog::{connected_graphs_up_to_iso, random_connected_graph, seeded_rng};
use mse_core::dp::{solve_auto, SolveLimits};
use mse_core::error::WorkBudget;
use mse_core::flow::{enumerate_minimal_cuts_upto, max_flow_value};
use mse_core::graph::{verify_routing, CostMode, Graph, Instance};
use mse_core::oracle::{
    contraction_oracle, contraction_oracle_decide, path_enum_oracle, search_tree_solver,
};
use mse_core::pipeline::{solve_fpt, treewidth_reduce};
use mse_core::reductions::{
    brute_force_set_cover, budget_formula, check_properties, closed_form_size, expected_routes,
    faithful_parameters, mcc_to_mse, mse_to_amse, or_cross_compose, route_formula, setcover_to_mse,
    validate_gadget_graph, KPartiteGraph, MccConfig, SetCover,
};
use mse_core::treedecomp::{heuristic_td, validate_td};

const PATH_ORACLE_BOUND: WorkBudget = WorkBudget(3_000_000);

struct Case {
    desc: String,
    graph: Graph,
    p: usize,
    heuristic_width: usize,
    flow: usize,
    dp: Option<u64>,
    dp_time: Duration,
    dp_witness_ok: bool,
    dp_stats_ok: bool,
    contraction: Option<u64>,
    searchtree: Option<u64>,
    /// None when the path oracle was not runnable within its budget.
    paths: Option<Option<u64>>,
    fpt: Option<u64>,
    fpt_witness_ok: bool,
}

struct Sweep {
    cases: Vec<Case>,
    elapsed: Duration,
}

fn run_case(graph: Graph, p: usize, desc: String) -> Case {
    let budget = WorkBudget::DEFAULT;
    let limits = SolveLimits::default();
    let t = graph.num_vertices() - 1;
    let inst = Instance::new(graph.clone(), 0, t, p, 0).unwrap();
    let flow = max_flow_value(&inst.graph, 0, t).unwrap().finite().unwrap();
    let t0 = Instant::now();
    let dp = solve_auto(&inst, CostMode::Count, &limits).unwrap();
    let dp_time = t0.elapsed();
    let (dp_value, dp_witness_ok, dp_stats_ok) = match &dp {
        None => (None, true, true),
        Some(sol) => {
            let check = verify_routing(&inst, &sol.routing.routes, CostMode::Count);
            (
                Some(sol.min_shared),
                check.valid && check.shared_count == sol.min_shared,
                sol.stats.within_bound(p),
            )
        }
    };
    let contraction = contraction_oracle(&inst, CostMode::Count, budget)
        .unwrap()
        .map(|r| r.min_shared);
    let searchtree = search_tree_solver(&inst);
    let paths = match path_enum_oracle(&inst, CostMode::Count, PATH_ORACLE_BOUND) {
        Ok(v) => Some(v),
        Err(_) => None, // not runnable at this size
    };
    let fpt_sol = solve_fpt(&inst, CostMode::Count, budget, &limits).unwrap();
    let (fpt, fpt_witness_ok) = match &fpt_sol {
        None => (None, true),
        Some(sol) => {
            let check = verify_routing(&inst, &sol.routing.routes, CostMode::Count);
            (
                Some(sol.min_shared),
                check.valid && check.shared_count == sol.min_shared,
            )
        }
    };
    Case {
        desc,
        heuristic_width: heuristic_td(&inst.graph).width(),
        graph: inst.graph,
        p,
        flow,
        dp: dp_value,
        dp_time,
        dp_witness_ok,
        dp_stats_ok,
        contraction,
        searchtree,
        paths,
        fpt,
        fpt_witness_ok,
    }
}

fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let t0 = Instant::now();
        let mut jobs: Vec<(Graph, usize, String)> = Vec::new();
        // Exhaustive: every connected graph with n <= 6 and m <= 9 up to
        // isomorphism, endpoints fixed to the extreme vertex ids.
        for n in 2..=6 {
            for (gi, g) in connected_graphs_up_to_iso(n, 9).into_iter().enumerate() {
                for p in [2, 3] {
                    jobs.push((g.clone(), p, format!("exhaustive n={n} #{gi} p={p}")));
                }
            }
        }
        // 500 seeded random connected graphs with n <= 8.
        let mut rng = seeded_rng(0x5eed);
        for i in 0..500 {
            use rand::Rng;
            let n = rng.gen_range(3..=8);
            let extra = rng.gen_range(0..=4);
            let g = random_connected_graph(&mut rng, n, extra, 1);
            let p = 2 + (i % 2);
            jobs.push((g, p, format!("random #{i} n={n} p={p}")));
        }
        let cases: Vec<Case> = jobs
            .into_par_iter()
            .map(|(g, p, desc)| run_case(g, p, desc))
            .collect();
        Sweep {
            cases,
            elapsed: t0.elapsed(),
        }
    })
}

fn finish(criterion: &str, violations: Vec<String>) {
    if violations.is_empty() {
        println!("{criterion}: PASS");
    } else {
        println!("{criterion}: FAIL ({} violations)", violations.len());
        for v in violations.iter().take(10) {
            println!("  {v}");
        }
        panic!("{criterion} failed");
    }
}

#[test]
fn criterion_1_oracle_equivalence() {
    let sween = sweep();
    let mut violations = Vec::new();
    let mut paths_ran = 0usize;
    for c in &sween.cases {
        if c.dp != c.contraction {
            violations.push(format!(
                "{}: dp {:?} vs contraction {:?}",
                c.desc, c.dp, c.contraction
            ));
        }
        if c.dp != c.searchtree {
            violations.push(format!(
                "{}: dp {:?} vs searchtree {:?}",
                c.desc, c.dp, c.searchtree
            ));
        }
        if let Some(paths) = c.paths {
            paths_ran += 1;
            if c.dp != paths {
                violations.push(format!("{}: dp {:?} vs paths {:?}", c.desc, c.dp, paths));
            }
        }
    }
    if paths_ran < sween.cases.len() / 2 {
        violations.push(format!(
            "path oracle ran on only {paths_ran}/{} cases",
            sween.cases.len()
        ));
    }
    if sween.elapsed > Duration::from_secs(600) {
        violations.push(format!(
            "catalog sweep took {:?} (> 10 minutes)",
            sween.elapsed
        ));
    }
    println!(
        "criterion 1 detail: {} instances, path oracle on {}, sweep {:?}",
        sween.cases.len(),
        paths_ran,
        sween.elapsed
    );
    finish("criterion 1 (solver agrees with all oracles)", violations);
}

#[test]
fn criterion_2_zero_budget_law() {
    let mut violations = Vec::new();
    for c in &sweep().cases {
        let zero = c.dp == Some(0);
        let covered = c.flow >= c.p;
        if zero != covered {
            violations.push(format!(
                "{}: optimum {:?} but flow {} for p {}",
                c.desc, c.dp, c.flow, c.p
            ));
        }
    }
    finish(
        "criterion 2 (zero shared edges iff flow covers the routes)",
        violations,
    );
}

#[test]
fn criterion_3_reduction_pipeline_equivalence() {
    let budget = WorkBudget::DEFAULT;
    let mut violations = Vec::new();
    for c in &sweep().cases {
        if c.dp != c.fpt {
            violations.push(format!("{}: dp {:?} vs pipeline {:?}", c.desc, c.dp, c.fpt));
        }
    }
    // Cut preservation under double enumeration: minimal cuts below p map
    // one-to-one between the original graph and the reduced graph.
    for c in &sweep().cases {
        if c.graph.num_edges() > 8 || c.p > 3 {
            continue;
        }
        let g = &c.graph;
        let (s, t) = (0, g.num_vertices() - 1);
        let trace = treewidth_reduce(g, s, t, c.p, budget).unwrap();
        let gs = &trace.final_graph;
        let (fs, ft) = (trace.final_source, trace.final_sink);
        let cuts_g = enumerate_minimal_cuts_upto(g, s, t, c.p - 1, budget).unwrap();
        let cuts_gs = enumerate_minimal_cuts_upto(gs, fs, ft, c.p - 1, budget).unwrap();
        let mut lost = false;
        let forward: BTreeSet<BTreeSet<usize>> = cuts_g
            .iter()
            .map(|cut| {
                cut.iter()
                    .filter_map(|e| match trace.edge_correspondence.get(e) {
                        Some(&ne) => Some(ne),
                        None => {
                            lost = true;
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        if lost {
            violations.push(format!(
                "{}: a small-cut edge was lost by the reduction",
                c.desc
            ));
            continue;
        }
        let reduced: BTreeSet<BTreeSet<usize>> = cuts_gs.into_iter().collect();
        if forward != reduced {
            violations.push(format!(
                "{}: {} cuts in the input vs {} in the reduced graph",
                c.desc,
                forward.len(),
                reduced.len()
            ));
        }
    }
    finish(
        "criterion 3 (pipeline preserves optima and small minimal cuts)",
        violations,
    );
}

#[test]
fn criterion_4_witness_soundness() {
    let mut violations = Vec::new();
    for c in &sweep().cases {
        if !c.dp_witness_ok {
            violations.push(format!("{}: solver witness mismatch", c.desc));
        }
        if !c.fpt_witness_ok {
            violations.push(format!("{}: pipeline witness mismatch", c.desc));
        }
    }
    finish(
        "criterion 4 (every optimum ships a verifying routing)",
        violations,
    );
}

/// All set families over `universe` with at most `max_sets` sets, one
/// representative per element-permutation class.
fn families_up_to_symmetry(universe: usize, max_sets: usize) -> Vec<Vec<BTreeSet<usize>>> {
    let subsets: Vec<u32> = (0u32..(1 << universe)).collect();
    let perms = permutations(universe);
    let apply = |mask: u32, perm: &[usize]| -> u32 {
        let mut out = 0;
        for (from, &to) in perm.iter().enumerate() {
            if mask & (1 << from) != 0 {
                out |= 1 << to;
            }
        }
        out
    };
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    while let Some(family) = stack.pop() {
        let canon = perms
            .iter()
            .map(|perm| {
                let mut mapped: Vec<u32> = family.iter().map(|&m| apply(m, perm)).collect();
                mapped.sort_unstable();
                mapped
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(
                family
                    .iter()
                    .map(|&m| (0..universe).filter(|&x| m & (1 << x) != 0).collect())
                    .collect(),
            );
        }
        if family.len() < max_sets {
            let start = family.last().map_or(0, |&m| m + 1);
            for &next in subsets.iter().filter(|&&m| m >= start) {
                let mut bigger = family.clone();
                bigger.push(next);
                stack.push(bigger);
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_5_set_cover_reduction_faithfulness() {
    let budget = WorkBudget::DEFAULT;
    let jobs: Vec<(usize, Vec<BTreeSet<usize>>)> = (0..=4usize)
        .flat_map(|universe| {
            families_up_to_symmetry(universe, 4)
                .into_iter()
                .map(move |family| (universe, family))
        })
        .collect();
    let checked = jobs.len() * 3;
    let violations: Vec<String> = jobs
        .into_par_iter()
        .flat_map(|(universe, family)| {
            let mut local = Vec::new();
            for ell in 0..=2u64 {
                // No sets and no elements asks for zero routes; outside the
                // construction's domain.
                if universe == 0 && family.is_empty() {
                    continue;
                }
                let sc = SetCover { universe, family: family.clone(), ell };
                let want = brute_force_set_cover(&sc);
                match setcover_to_mse(&sc) {
                    Err(_) => {
                        // Rejected families contain an uncoverable element;
                        // those are always no-instances.
                        if want {
                            local.push(format!(
                                "universe {universe} family {family:?}: rejected a yes-instance"
                            ));
                        }
                    }
                    Ok(inst) => {
                        if inst.num_routes != expected_routes(&sc) || inst.budget != ell {
                            local.push(format!(
                                "universe {universe} family {family:?}: parameter formulas broken"
                            ));
                        }
                        let got =
                            contraction_oracle_decide(&inst, CostMode::Count, ell, budget).unwrap();
                        if got != want {
                            local.push(format!(
                                "universe {universe} family {family:?} ell {ell}: cover {want}, routing {got}"
                            ));
                        }
                    }
                }
            }
            local
        })
        .collect();
    println!("criterion 5 detail: {checked} set-cover instances checked");
    finish(
        "criterion 5 (set-cover encoding tracks the cover answer)",
        violations,
    );
}

#[test]
fn criterion_6_chain_composition_faithfulness() {
    let budget = WorkBudget::DEFAULT;
    // A pool of promise instances sharing (p=2, k=1), with known answers.
    let pool: Vec<(Instance, bool)> = vec![
        (
            Instance::new(Graph::from_edges(2, &[(0, 1)]), 0, 1, 2, 1).unwrap(),
            true,
        ),
        (
            Instance::new(
                Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
                0,
                2,
                2,
                1,
            )
            .unwrap(),
            true,
        ),
        (
            Instance::new(Graph::from_edges(3, &[(0, 1), (1, 2)]), 0, 2, 2, 1).unwrap(),
            false,
        ),
        (
            Instance::new(Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]), 0, 3, 2, 1).unwrap(),
            false,
        ),
    ];
    let mut violations = Vec::new();
    // Every component's label is itself oracle-verified.
    for (inst, want) in &pool {
        let got = contraction_oracle(inst, CostMode::Count, budget)
            .unwrap()
            .map(|r| r.min_shared <= inst.budget)
            .unwrap_or(false);
        if got != *want {
            violations.push(format!("pool label wrong: expected {want}"));
        }
    }
    let promises: Vec<_> = pool
        .iter()
        .map(|(inst, _)| mse_to_amse(inst).unwrap())
        .collect();
    let mut checked = 0;
    for len in 1..=3usize {
        let mut index = vec![0usize; len];
        loop {
            let parts: Vec<_> = index.iter().map(|&i| promises[i].clone()).collect();
            let expected_or = index.iter().any(|&i| pool[i].1);
            let composed = or_cross_compose(&parts).unwrap();
            let k_star = len as u64 * (1 + 1) - 1;
            if composed.budget != k_star {
                violations.push(format!(
                    "chain {index:?}: budget {} != {k_star}",
                    composed.budget
                ));
            }
            let best = path_enum_oracle(&composed, CostMode::Count, budget)
                .unwrap()
                .unwrap();
            if (best <= composed.budget) != expected_or {
                violations.push(format!(
                    "chain {index:?}: best {best}, budget {}, expected OR {expected_or}",
                    composed.budget
                ));
            }
            // Cross-check short chains with the subset oracle as well.
            if len <= 2 {
                let agree =
                    contraction_oracle_decide(&composed, CostMode::Count, composed.budget, budget)
                        .unwrap();
                if agree != expected_or {
                    violations.push(format!("chain {index:?}: subset oracle disagrees"));
                }
            }
            checked += 1;
            // advance odometer
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < promises.len() {
                    break;
                }
                index[pos] = 0;
            }
            if index.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    println!("criterion 6 detail: {checked} compositions checked");
    finish(
        "criterion 6 (chain composition is the OR of its parts)",
        violations,
    );
}

#[test]
fn criterion_7_clique_construction() {
    let mut violations = Vec::new();

    // k = 2, faithful lengths: a single cross edge between two singleton
    // classes.
    let input2 = KPartiteGraph {
        class_sizes: vec![1, 1],
        edges: vec![((0, 0), (1, 0))],
    };
    let out2 = mcc_to_mse(&input2, MccConfig::FAITHFUL).unwrap();
    let n2: usize = input2.class_sizes.iter().sum();
    let want_p2 = route_formula(2, 1, out2.report.sidon.modulus, n2);
    let want_k2 = budget_formula(2, 2u64.pow(10), 2u64.pow(5));
    if out2.instance.num_routes as u64 != want_p2 || out2.report.routes != want_p2 {
        violations.push(format!("k=2: routes {} != {want_p2}", out2.report.routes));
    }
    if out2.instance.budget != want_k2 || out2.report.budget != want_k2 {
        violations.push(format!("k=2: budget {} != {want_k2}", out2.report.budget));
    }
    if !check_properties(&out2.report.sidon, n2).all_hold() {
        violations.push("k=2: id assignment properties fail".into());
    }
    if let Err(e) = validate_gadget_graph(&out2.instance, &out2.report) {
        violations.push(format!("k=2: structural recount failed: {e}"));
    }
    if let Err(e) = validate_td(&out2.instance.graph, &out2.tree_decomposition) {
        violations.push(format!("k=2: decomposition invalid: {e}"));
    }
    let (cf_n2, cf_m2) = closed_form_size(&input2, MccConfig::FAITHFUL).unwrap();
    if (
        out2.instance.graph.num_vertices() as u64,
        out2.instance.graph.num_edges() as u64,
    ) != (cf_n2, cf_m2)
    {
        violations.push("k=2: size differs from the closed form".into());
    }
    let bound2 = 2 * 1 + 2 + 6; // 2*C(2,2 choose)= 2*1; k=2; +6
    if out2.tree_decomposition.width() > bound2 {
        violations.push(format!(
            "k=2: width {} above bound {bound2}",
            out2.tree_decomposition.width()
        ));
    }
    println!(
        "criterion 7 detail: k=2 faithful instance has {} vertices, {} edges, width {}",
        out2.instance.graph.num_vertices(),
        out2.instance.graph.num_edges(),
        out2.tree_decomposition.width()
    );

    // k = 3: the faithful chain lengths (3^10-edge chains times hundreds of
    // bundle chains) put the graph in the hundreds of millions of edges, so
    // the graph itself is generated in the scaled mode the generator
    // provides for structural testing; the faithful parameter formulas are
    // still checked exactly, and p is length-independent.
    let input3 = KPartiteGraph {
        class_sizes: vec![2, 1, 1],
        edges: vec![
            ((0, 0), (1, 0)),
            ((0, 1), (1, 0)),
            ((0, 0), (2, 0)),
            ((1, 0), (2, 0)),
        ],
    };
    let n3: usize = input3.class_sizes.iter().sum();
    let (p3, k3) = faithful_parameters(&input3).unwrap();
    let sidon3 = mse_core::reductions::sidon_assignment(n3);
    if p3 != route_formula(3, input3.edges.len(), sidon3.modulus, n3) {
        violations.push("k=3: route formula mismatch".into());
    }
    if k3 != 3 * 3u64.pow(10) + 3 * (3 + 4) * 3u64.pow(5) + 3 * 3 * 3 {
        violations.push(format!(
            "k=3: faithful budget {k3} does not match the formula"
        ));
    }
    let out3 = mcc_to_mse(&input3, MccConfig::scaled(2, 1)).unwrap();
    if out3.report.routes != p3 {
        violations.push(format!(
            "k=3: scaled routes {} != faithful {p3}",
            out3.report.routes
        ));
    }
    if out3.report.budget != budget_formula(3, 3u64.pow(2), 3u64.pow(1)) {
        violations.push("k=3: scaled budget formula mismatch".into());
    }
    if !check_properties(&out3.report.sidon, n3).all_hold() {
        violations.push("k=3: id assignment properties fail".into());
    }
    if let Err(e) = validate_gadget_graph(&out3.instance, &out3.report) {
        violations.push(format!("k=3: structural recount failed: {e}"));
    }
    if let Err(e) = validate_td(&out3.instance.graph, &out3.tree_decomposition) {
        violations.push(format!("k=3: decomposition invalid: {e}"));
    }
    let (cf_n3, cf_m3) = closed_form_size(&input3, MccConfig::scaled(2, 1)).unwrap();
    if (
        out3.instance.graph.num_vertices() as u64,
        out3.instance.graph.num_edges() as u64,
    ) != (cf_n3, cf_m3)
    {
        violations.push("k=3: size differs from the closed form".into());
    }
    let bound3 = 2 * 3 + 3 + 6; // 2*C(3,2) + k + 6
    if out3.tree_decomposition.width() > bound3 {
        violations.push(format!(
            "k=3: width {} above bound {bound3}",
            out3.tree_decomposition.width()
        ));
    }
    println!(
        "criterion 7 detail: k=3 scaled instance has {} vertices, {} edges, width {}",
        out3.instance.graph.num_vertices(),
        out3.instance.graph.num_edges(),
        out3.tree_decomposition.width()
    );
    // Solving these instances is out of scope by construction: the faithful
    // budget alone exceeds any desk-scale table.
    finish(
        "criterion 7 (clique gadget: formulas, ids, decomposition)",
        violations,
    );
}

#[test]
fn criterion_8_signature_space_discipline() {
    let mut violations = Vec::new();
    let mut timed = 0;
    for c in &sweep().cases {
        if !c.dp_stats_ok {
            violations.push(format!("{}: stored signatures exceed the bound", c.desc));
        }
        if c.heuristic_width <= 3 && c.p <= 3 {
            timed += 1;
            if c.dp_time > Duration::from_secs(60) {
                violations.push(format!("{}: solve took {:?}", c.desc, c.dp_time));
            }
        }
    }
    println!("criterion 8 detail: {timed} narrow instances timed");
    finish(
        "criterion 8 (signature counts bounded, narrow instances fast)",
        violations,
    );
}

#[test]
fn criterion_9_weighted_consistency() {
    let budget = WorkBudget::DEFAULT;
    let limits = SolveLimits::default();
    let mut rng = seeded_rng(0xaeed);
    let mut jobs = Vec::new();
    for i in 0..100 {
        use rand::Rng;
        let n = rng.gen_range(3..=6);
        let extra = rng.gen_range(0..=3);
        let g = random_connected_graph(&mut rng, n, extra, 5);
        let p = 2 + (i % 2);
        jobs.push((g, p, i));
    }
    let violations: Vec<String> = jobs
        .into_par_iter()
        .filter_map(|(g, p, i)| {
            let t = g.num_vertices() - 1;
            let inst = Instance::new(g, 0, t, p, 0).unwrap();
            let dp = solve_auto(&inst, CostMode::Weighted, &limits)
                .unwrap()
                .map(|s| s.min_shared);
            let oracle = contraction_oracle(&inst, CostMode::Weighted, budget)
                .unwrap()
                .map(|r| r.min_shared);
            (dp != oracle).then(|| format!("weighted #{i}: dp {dp:?} vs oracle {oracle:?}"))
        })
        .collect();
    finish(
        "criterion 9 (weighted solver matches the weighted oracle)",
        violations,
    );
}
