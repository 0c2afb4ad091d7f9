//! Batch front door: parse instances, pick or build decompositions,
//! dispatch solvers and generators, emit machine-readable results.
//!
//! Exit codes: 0 solved / verified / generated, 1 answer is no or the
//! instance is infeasible as queried, 2 usage or parse error, 3 work bound
//! exceeded.

mod format;

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mse_core::dp::{solve_auto, SolveLimits};
use mse_core::error::{Error as CoreError, WorkBudget};
use mse_core::graph::{verify_routing, CostMode, Instance, Routing};
use mse_core::nice::make_nice_with_edges;
use mse_core::oracle;
use mse_core::pipeline::solve_fpt;
use mse_core::reductions::{
    mcc_to_mse, mse_to_amse, or_cross_compose, setcover_to_mse, KPartiteGraph, MccConfig, SetCover,
};
use mse_core::treedecomp::{heuristic_td, read_pace, validate_td, write_pace};

#[derive(Parser)]
#[command(
    name = "mse",
    about = "Exact solvers and generators for minimum shared edges routing"
)]
struct Cli {
    /// Cap on worker threads for parallel enumeration.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve with the decomposition-based dynamic program.
    Solve(SolveArgs),
    /// Solve through the separator-core reduction pipeline.
    SolveFpt(SolveArgs),
    /// Solve with one of the brute-force reference methods.
    Oracle(OracleArgs),
    /// Check a routing file against an instance.
    Verify(VerifyArgs),
    /// Emit a heuristic tree decomposition for an instance.
    Td(TdArgs),
    /// Generate benchmark instances.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    instance: String,
    /// Use this decomposition file instead of the built-in heuristic
    /// (ignored by solve-fpt).
    #[arg(long)]
    td: Option<String>,
    /// Charge shared edges their weight instead of 1.
    #[arg(long)]
    weighted: bool,
    /// Write the witness routing to this file.
    #[arg(long)]
    emit_routing: Option<String>,
    /// Answer yes/no against this budget instead of reporting the optimum.
    #[arg(short = 'k')]
    bound: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    instance: String,
    /// contraction | paths | searchtree
    #[arg(long)]
    method: String,
    #[arg(long)]
    weighted: bool,
    #[arg(short = 'k')]
    bound: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: String,
    #[arg(long)]
    routing: String,
    #[arg(long)]
    weighted: bool,
}

#[derive(Args)]
struct TdArgs {
    instance: String,
    /// Output file (stdout when omitted).
    #[arg(short = 'o', long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Encode a set-cover question.
    Setcover(GenSetcoverArgs),
    /// Chain instances through the promise construction.
    AmseChain(GenAmseArgs),
    /// Build a clique-selection gadget instance.
    Mcc(GenMccArgs),
    /// A seeded random connected instance.
    Random(GenRandomArgs),
}

#[derive(Args)]
struct GenSetcoverArgs {
    /// Universe size; elements are 1..=N.
    #[arg(long)]
    universe: usize,
    /// A set as comma-separated elements; repeat per set. Use "empty" for
    /// the empty set.
    #[arg(long = "set")]
    sets: Vec<String>,
    /// Maximum number of sets to pick.
    #[arg(long)]
    ell: u64,
    #[arg(short = 'o', long)]
    out: String,
}

#[derive(Args)]
struct GenAmseArgs {
    /// Input instance files; all must share p and k, k > 0.
    #[arg(short = 'i', long = "instance")]
    instances: Vec<String>,
    #[arg(short = 'o', long)]
    out: String,
}

#[derive(Args)]
struct GenMccArgs {
    /// Class sizes, comma separated, e.g. 2,2,1.
    #[arg(long)]
    classes: String,
    /// An edge as class.vertex-class.vertex (1-indexed), e.g. 1.2-3.1;
    /// repeat per edge.
    #[arg(long = "edge")]
    edges: Vec<String>,
    /// Replace the faithful chain-length exponents (10 and 5) by smaller
    /// ones, e.g. 2,1. The output is structurally identical but NOT a
    /// faithful instance.
    #[arg(long)]
    scaled: Option<String>,
    /// Write the construction's own tree decomposition here.
    #[arg(long)]
    emit_td: Option<String>,
    #[arg(short = 'o', long)]
    out: String,
}

#[derive(Args)]
struct GenRandomArgs {
    #[arg(long)]
    n: usize,
    /// Extra edges beyond the random spanning tree.
    #[arg(long, default_value_t = 0)]
    extra: usize,
    #[arg(long)]
    p: usize,
    #[arg(short = 'k', long, default_value_t = 0)]
    k: u64,
    #[arg(long, default_value_t = 1)]
    max_weight: u64,
    #[arg(long)]
    seed: u64,
    #[arg(short = 'o', long)]
    out: String,
}

/// Everything that ends the process with a specific code.
enum Failure {
    Usage(String),
    WorkBound(String),
    No,
}

impl From<format::ParseError> for Failure {
    fn from(e: format::ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::WorkBoundExceeded { .. } | CoreError::SignatureCapExceeded { .. } => {
                Failure::WorkBound(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::No) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::WorkBound(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read_instance(path: &str) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)?;
    Ok(format::parse_instance(&text)?)
}

fn cost_mode(weighted: bool) -> CostMode {
    if weighted {
        CostMode::Weighted
    } else {
        CostMode::Count
    }
}

/// Prints the result line and returns the exit status for an optimum.
fn report(min_shared: Option<u64>, bound: Option<u64>) -> Result<(), Failure> {
    match (min_shared, bound) {
        (Some(v), None) => {
            println!("min_shared={v}");
            Ok(())
        }
        (Some(v), Some(k)) => {
            if v <= k {
                println!("answer=yes");
                Ok(())
            } else {
                println!("answer=no");
                Err(Failure::No)
            }
        }
        (None, None) => {
            println!("min_shared=inf");
            Err(Failure::No)
        }
        (None, Some(_)) => {
            println!("answer=no");
            Err(Failure::No)
        }
    }
}

fn emit_routing_file(path: &Option<String>, routing: Option<&Routing>) -> Result<(), Failure> {
    if let (Some(path), Some(routing)) = (path, routing) {
        fs::write(path, format::write_routing(routing))?;
    }
    Ok(())
}

fn run(cmd: Command) -> Result<(), Failure> {
    let budget = WorkBudget::from_env();
    let limits = SolveLimits::default();
    match cmd {
        Command::Solve(args) => {
            let inst = read_instance(&args.instance)?;
            let mode = cost_mode(args.weighted);
            let sol = match &args.td {
                None => solve_auto(&inst, mode, &limits)?,
                Some(td_path) => {
                    let text = fs::read_to_string(td_path)?;
                    let td = read_pace(&text)?;
                    validate_td(&inst.graph, &td)?;
                    let ntd = make_nice_with_edges(&inst.graph, &td, inst.source, inst.sink)?;
                    mse_core::dp::solve_on(&inst, &ntd, mode, &limits)?
                }
            };
            emit_routing_file(&args.emit_routing, sol.as_ref().map(|s| &s.routing))?;
            report(sol.map(|s| s.min_shared), args.bound)
        }
        Command::SolveFpt(args) => {
            let inst = read_instance(&args.instance)?;
            let mode = cost_mode(args.weighted);
            let sol = solve_fpt(&inst, mode, budget, &limits)?;
            emit_routing_file(&args.emit_routing, sol.as_ref().map(|s| &s.routing))?;
            report(sol.map(|s| s.min_shared), args.bound)
        }
        Command::Oracle(args) => {
            let inst = read_instance(&args.instance)?;
            let mode = cost_mode(args.weighted);
            let min = match args.method.as_str() {
                "contraction" => {
                    oracle::contraction_oracle(&inst, mode, budget)?.map(|r| r.min_shared)
                }
                "paths" => oracle::path_enum_oracle(&inst, mode, budget)?,
                "searchtree" => {
                    if args.weighted {
                        return Err(Failure::Usage(
                            "the search-tree method only counts shared edges; drop --weighted"
                                .into(),
                        ));
                    }
                    oracle::search_tree_solver(&inst)
                }
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown method `{other}` (contraction | paths | searchtree)"
                    )))
                }
            };
            report(min, args.bound)
        }
        Command::Verify(args) => {
            let inst = read_instance(&args.instance)?;
            let text = fs::read_to_string(&args.routing)?;
            let routing = format::parse_routing(&text, &inst.graph)?;
            let mode = cost_mode(args.weighted);
            let out = verify_routing(&inst, &routing.routes, mode);
            if !out.valid {
                println!("invalid reason={:?}", out.defect.unwrap());
                return Err(Failure::No);
            }
            if out.shared_edges != routing.shared_edges {
                println!("invalid reason=SharedListMismatch");
                return Err(Failure::No);
            }
            println!("valid shared={}", out.shared_count);
            Ok(())
        }
        Command::Td(args) => {
            let inst = read_instance(&args.instance)?;
            let td = heuristic_td(&inst.graph);
            let text = write_pace(&td, inst.graph.num_vertices());
            match args.out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Gen(gen) => run_gen(gen),
    }
}

fn write_generated(
    out: &str,
    inst: &Instance,
    report_lines: Vec<(String, String)>,
) -> Result<(), Failure> {
    fs::write(out, format::write_instance(inst))?;
    let mut text = String::new();
    for (k, v) in report_lines {
        text.push_str(&format!("{k}={v}\n"));
    }
    fs::write(format!("{out}.report"), text)?;
    println!("written={out}");
    Ok(())
}

fn base_report(inst: &Instance) -> Vec<(String, String)> {
    vec![
        ("n".into(), inst.graph.num_vertices().to_string()),
        ("m".into(), inst.graph.num_edges().to_string()),
        ("s".into(), (inst.source + 1).to_string()),
        ("t".into(), (inst.sink + 1).to_string()),
        ("p".into(), inst.num_routes.to_string()),
        ("k".into(), inst.budget.to_string()),
    ]
}

fn run_gen(cmd: GenCommand) -> Result<(), Failure> {
    match cmd {
        GenCommand::Setcover(args) => {
            let mut family = Vec::new();
            for entry in &args.sets {
                let mut set = BTreeSet::new();
                if entry != "empty" {
                    for tok in entry.split(',') {
                        let x: usize = tok
                            .trim()
                            .parse()
                            .map_err(|_| Failure::Usage(format!("bad element `{tok}`")))?;
                        if x == 0 || x > args.universe {
                            return Err(Failure::Usage(format!("element {x} outside universe")));
                        }
                        set.insert(x - 1);
                    }
                }
                family.push(set);
            }
            let sc = SetCover {
                universe: args.universe,
                family,
                ell: args.ell,
            };
            let inst = setcover_to_mse(&sc)?;
            let mut lines = base_report(&inst);
            lines.push(("generator".into(), "setcover".into()));
            lines.push(("universe".into(), args.universe.to_string()));
            lines.push(("sets".into(), sc.family.len().to_string()));
            lines.push(("ell".into(), sc.ell.to_string()));
            write_generated(&args.out, &inst, lines)
        }
        GenCommand::AmseChain(args) => {
            if args.instances.is_empty() {
                return Err(Failure::Usage("need at least one -i instance".into()));
            }
            let mut parts = Vec::new();
            for path in &args.instances {
                let inst = read_instance(path)?;
                parts.push(mse_to_amse(&inst)?);
            }
            let composed = or_cross_compose(&parts)?;
            let mut lines = base_report(&composed);
            lines.push(("generator".into(), "amse-chain".into()));
            lines.push(("components".into(), parts.len().to_string()));
            lines.push((
                "component_budget".into(),
                parts[0].instance.budget.to_string(),
            ));
            write_generated(&args.out, &composed, lines)
        }
        GenCommand::Mcc(args) => {
            let class_sizes: Result<Vec<usize>, _> =
                args.classes.split(',').map(|t| t.trim().parse()).collect();
            let Ok(class_sizes) = class_sizes else {
                return Err(Failure::Usage("bad --classes list".into()));
            };
            let mut edges = Vec::new();
            for entry in &args.edges {
                let parse_end = |part: &str| -> Option<(usize, usize)> {
                    let (c, v) = part.split_once('.')?;
                    let c: usize = c.trim().parse().ok()?;
                    let v: usize = v.trim().parse().ok()?;
                    if c == 0 || v == 0 {
                        return None;
                    }
                    Some((c - 1, v - 1))
                };
                let parsed = entry
                    .split_once('-')
                    .and_then(|(a, b)| Some((parse_end(a)?, parse_end(b)?)));
                match parsed {
                    Some(edge) => edges.push(edge),
                    None => {
                        return Err(Failure::Usage(format!(
                            "bad --edge `{entry}`; expected like 1.2-3.1"
                        )))
                    }
                }
            }
            let config = match &args.scaled {
                None => MccConfig::FAITHFUL,
                Some(text) => {
                    let parts: Vec<&str> = text.split(',').collect();
                    let parse = |s: &str| s.trim().parse::<u32>().ok();
                    match (
                        parts.len(),
                        parts.first().and_then(|s| parse(s)),
                        parts.get(1).and_then(|s| parse(s)),
                    ) {
                        (2, Some(a), Some(b)) => MccConfig::scaled(a, b),
                        _ => return Err(Failure::Usage("bad --scaled; expected like 2,1".into())),
                    }
                }
            };
            let input = KPartiteGraph { class_sizes, edges };
            let out = mcc_to_mse(&input, config)?;
            if let Some(td_path) = &args.emit_td {
                fs::write(
                    td_path,
                    write_pace(&out.tree_decomposition, out.instance.graph.num_vertices()),
                )?;
            }
            let r = &out.report;
            let mut lines = base_report(&out.instance);
            lines.push(("generator".into(), "mcc".into()));
            lines.push(("k".into(), r.k.to_string()));
            lines.push(("faithful".into(), r.config.is_faithful().to_string()));
            lines.push(("selector_len".into(), r.selector_len.to_string()));
            lines.push(("relay_len".into(), r.relay_len.to_string()));
            lines.push(("routes".into(), r.routes.to_string()));
            lines.push(("budget".into(), r.budget.to_string()));
            lines.push(("modulus".into(), r.sidon.modulus.to_string()));
            let ids: Vec<String> = r.sidon.ids.iter().map(|x| x.to_string()).collect();
            lines.push(("ids".into(), ids.join(",")));
            lines.push(("td_width".into(), r.td_width.to_string()));
            write_generated(&args.out, &out.instance, lines)
        }
        GenCommand::Random(args) => {
            if args.n < 2 {
                return Err(Failure::Usage("need at least two vertices".into()));
            }
            let mut rng = mse_core::catalog::seeded_rng(args.seed);
            let g = mse_core::catalog::random_connected_graph(
                &mut rng,
                args.n,
                args.extra,
                args.max_weight,
            );
            let inst = Instance::new(g, 0, args.n - 1, args.p, args.k)?;
            let mut lines = base_report(&inst);
            lines.push(("generator".into(), "random".into()));
            lines.push(("seed".into(), args.seed.to_string()));
            write_generated(&args.out, &inst, lines)
        }
    }
}
