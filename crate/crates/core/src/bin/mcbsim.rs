use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use mcbsim::broadcast::{broadcast_over_packing, MessageSet};
use mcbsim::cobra::{
    coverage_report, run_multi_cobra, AssignmentFile, CobraConfig, MultiCobraAssignment,
};
use mcbsim::embedding::{embed_er_graph, end_to_end_expander_broadcast, EndToEndOptions};
use mcbsim::graph::erdos_renyi;
use mcbsim::hardness::{
    brute_force_set_splitting, build_setsplit_reduction, build_sqrtk_instance,
    decide_saturation_round4, time_expanded_saturation, ReductionInstance,
};
use mcbsim::harness::{run_experiment, write_records_csv, ExperimentConfig};
use mcbsim::io::{read_bandwidth_graph, read_edge_list, read_json, write_edge_list, write_json};
use mcbsim::packing::{build_tree_packing, TreePacking};
use mcbsim::spectral::{mixing_time_empirical, spectral_report, MixingOptions};
use mcbsim::{Graph, Result, RngSeed};

/// Multi-message broadcast simulator.
#[derive(Parser)]
#[command(name = "mcbsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample G(n, p) and write it as an edge list.
    Gen(GenArgs),
    /// λ₂, mixing bounds and conductance as JSON.
    Spectral(SpectralArgs),
    /// Multi-COBRA walk assignment.
    Cobra(CobraArgs),
    /// Tree packing from an assignment.
    Treepack(TreepackArgs),
    /// Broadcast over a packing; writes the send trace as CSV.
    Broadcast(BroadcastArgs),
    /// Embed a virtual random graph into a host.
    Embed(EmbedArgs),
    /// Full pipeline on an arbitrary host.
    E2e(E2eArgs),
    /// Lower-bound and reduction gadgets.
    #[command(subcommand)]
    Hardness(HardnessCommand),
    /// Run a JSON-configured sweep and write CSV records.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Defaults to c_p · ln n / n.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    c_p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    regularize: bool,
    /// Also measure the mixing time, at this tolerance (default n^-2 with --mixing).
    #[arg(long)]
    mixing_tolerance: Option<f64>,
    #[arg(long)]
    mixing: bool,
}

#[derive(Args)]
struct CobraArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    source: usize,
    /// Defaults to δ of the graph.
    #[arg(long)]
    walks: Option<usize>,
    #[arg(long)]
    phases: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TreepackArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long, default_value_t = 0)]
    source: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BroadcastArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    packing: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    host: PathBuf,
    /// Walk length, or `auto` for the empirical mixing time.
    #[arg(long, default_value = "auto")]
    tau: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct E2eArgs {
    #[arg(long)]
    host: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    source: usize,
    #[arg(long, default_value = "auto")]
    tau: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    ledger: PathBuf,
}

#[derive(Subcommand)]
enum HardnessCommand {
    /// Build the √k instance and measure v₁'s saturation rounds.
    Sqrtk {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Set-splitting reduction: split search against brute force.
    Reduce {
        /// JSON `{"ground_set_size": n, "family": [[...], ...]}`, 0-indexed.
        #[arg(long)]
        sets: PathBuf,
        #[arg(long)]
        n1: usize,
    },
    /// Exact single-sink saturation rounds of a bandwidth graph.
    Saturate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        sink: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_csv`; standard output when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(serde::Deserialize)]
struct SetsFile {
    ground_set_size: usize,
    family: Vec<Vec<usize>>,
}

fn print_json<T: Serialize + ?Sized>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// COBRA and the packing run on the regularized graph unless the file
/// already is regular.
fn walk_graph(g: &Graph) -> Result<Graph> {
    let (lo, hi) = g.slot_range();
    if lo == hi {
        Ok(g.clone())
    } else {
        g.regularize()
    }
}

fn parse_tau(text: &str) -> Result<Option<usize>> {
    if text == "auto" {
        return Ok(None);
    }
    text.parse().map(Some).map_err(|_| {
        mcbsim::Error::InvalidArgument(format!("--tau expects an integer or `auto`, got {text:?}"))
    })
}

fn load_assignment(g: &Graph, path: &Path) -> Result<MultiCobraAssignment> {
    let file: AssignmentFile = read_json(path)?;
    MultiCobraAssignment::from_file(g, &file)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => {
            let p =
                a.p.unwrap_or((a.c_p * (a.n as f64).ln() / a.n as f64).min(1.0));
            let g = erdos_renyi(a.n, p, RngSeed(a.seed))?;
            let stats = g.degree_stats();
            match a.out {
                Some(path) => {
                    write_edge_list(&path, &g)?;
                    print_json(&json!({
                        "n": g.node_count(),
                        "m": g.edge_count(),
                        "p": p,
                        "connected": g.is_connected(),
                        "min_degree": stats.min,
                        "max_degree": stats.max,
                    }))?;
                }
                None => print!("{}", mcbsim::io::format_edge_list(&g)),
            }
            if !g.is_connected() {
                log::warn!("sample is disconnected");
            }
        }
        Command::Spectral(a) => {
            let mut g = read_edge_list(&a.graph)?;
            if a.regularize {
                g = g.regularize()?;
            }
            let opts = (a.mixing || a.mixing_tolerance.is_some()).then_some(MixingOptions {
                tolerance: a.mixing_tolerance,
                t_max: None,
            });
            print_json(&spectral_report(&g, opts.as_ref())?)?;
        }
        Command::Cobra(a) => {
            let g = read_edge_list(&a.graph)?;
            let walks = a.walks.unwrap_or(g.degree_stats().min);
            let mut cfg = CobraConfig::new(walks);
            cfg.phases = a.phases;
            let assignment = run_multi_cobra(&walk_graph(&g)?, a.source, &cfg, RngSeed(a.seed))?;
            write_json(&a.out, &assignment.to_file())?;
            let covered = coverage_report(&assignment)
                .iter()
                .filter(|c| c.covered)
                .count();
            print_json(&json!({
                "phases": assignment.phases_run(),
                "walks": walks,
                "covered_walks": covered,
                "max_edge_weight": assignment.max_edge_weight(),
            }))?;
        }
        Command::Treepack(a) => {
            let g = walk_graph(&read_edge_list(&a.graph)?)?;
            let assignment = load_assignment(&g, &a.assignment)?;
            let tp = build_tree_packing(&g, &assignment, a.source)?;
            write_json(&a.out, &tp)?;
            print_json(&json!({
                "S": tp.size,
                "H": tp.diameter,
                "W": tp.weight,
                "build_rounds": tp.build_rounds,
            }))?;
        }
        Command::Broadcast(a) => {
            let g = read_edge_list(&a.graph)?;
            let tp: TreePacking = read_json(&a.packing)?;
            let trace = broadcast_over_packing(&g, &tp, MessageSet::new(a.k)?, true)?;
            trace.write_csv(File::create(&a.out)?)?;
            print_json(&json!({
                "rounds": trace.total_rounds,
                "saturated": trace.is_saturated(),
                "sends": trace.send_count,
                "max_edge_load": trace.max_edge_load,
            }))?;
        }
        Command::Embed(a) => {
            let h = read_edge_list(&a.host)?;
            let tau = match parse_tau(&a.tau)? {
                Some(t) => t,
                None => mixing_time_empirical(&h, &MixingOptions::default())?
                    .t
                    .max(1),
            };
            let (e, ledger) = embed_er_graph(&h, tau, RngSeed(a.seed))?;
            let out_degrees = e.out_degrees();
            let virtual_edges: Vec<(usize, usize, u32)> = e.virtual_graph.edges().collect();
            write_json(
                &a.out,
                &json!({
                    "tau": e.tau_used,
                    "group_size": e.space.group_size,
                    "groups": e.space.group_count(),
                    "host_of": e.space.host_of,
                    "inactive_subnodes": e.space.inactive_count(),
                    "retry_cap": e.retry_cap,
                    "max_retries": e.max_retries(),
                    "attempt_rounds": e.attempt_rounds,
                    "self_walks": e.self_walks,
                    "notifications_checked": e.notifications_checked,
                    "notification_mismatches": e.notification_mismatches,
                    "out_degree_min": out_degrees.iter().min(),
                    "out_degree_max": out_degrees.iter().max(),
                    "ledger": ledger,
                    "virtual_edges": virtual_edges,
                    "walks": e.walks,
                }),
            )?;
            print_json(&json!({
                "tau": e.tau_used,
                "groups": e.space.group_count(),
                "max_retries": e.max_retries(),
                "embed_rounds": ledger.embed_rounds,
            }))?;
        }
        Command::E2e(a) => {
            let h = read_edge_list(&a.host)?;
            let opts = EndToEndOptions {
                tau: parse_tau(&a.tau)?,
                ..EndToEndOptions::default()
            };
            let (trace, report) =
                end_to_end_expander_broadcast(&h, a.source, a.k, &opts, RngSeed(a.seed))?;
            write_json(&a.ledger, &report)?;
            print_json(&json!({
                "total_rounds": report.ledger.total,
                "saturated": trace.is_saturated(),
                "virtual_nodes": report.virtual_nodes,
            }))?;
        }
        Command::Hardness(HardnessCommand::Sqrtk { k, out }) => {
            let inst = build_sqrtk_instance(k)?;
            let sat = time_expanded_saturation(&inst.graph, inst.v1, k)?;
            if let Some(path) = out {
                std::fs::write(path, mcbsim::io::format_bandwidth_graph(&inst.graph))?;
            }
            print_json(&json!({
                "k": k,
                "diameter": inst.diameter,
                "min_cut_s_v1": inst.min_cut_s_v1,
                "residual_cut": inst.residual_cut,
                "v1_saturation_rounds": sat.min_rounds,
            }))?;
        }
        Command::Hardness(HardnessCommand::Reduce { sets, n1 }) => {
            let file: SetsFile = read_json(&sets)?;
            let ri = ReductionInstance::new(file.ground_set_size, file.family, n1)?;
            let red = build_setsplit_reduction(&ri)?;
            let decision = decide_saturation_round4(&red)?;
            print_json(&json!({
                "nodes": red.graph.node_count,
                "edges": red.graph.edges.len(),
                "saturable_in_4_rounds": decision.saturable,
                "witness": decision.witness,
                "splits_tried": decision.splits_tried,
                "brute_force_splittable": brute_force_set_splitting(&ri)?,
            }))?;
        }
        Command::Hardness(HardnessCommand::Saturate { graph, sink, k }) => {
            let bg = read_bandwidth_graph(&graph)?;
            print_json(&time_expanded_saturation(&bg, sink, k)?)?;
        }
        Command::Experiment(a) => {
            let mut cfg: ExperimentConfig = read_json(&a.config)?;
            if a.out.is_some() {
                cfg.output_csv = a.out;
            }
            let records = run_experiment(&cfg)?;
            if cfg.output_csv.is_none() {
                write_records_csv(io::stdout().lock(), &records)?;
            }
            let failed = records.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                log::warn!("{failed} trials failed");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
