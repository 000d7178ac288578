//! Command-line front end: parse graphs, run rigidity analyses, emit
//! deterministic JSON reports and realization dumps.
//!
//! Exit codes: 0 success, 2 parse error, 3 realization budget exhaustion,
//! 4 decompose on a non-minimal input, 5 molecule precondition violation,
//! 1 other errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rigidkit_core::decomposition::{
    classify, find_proper_rigid_subgraph, inductive_sequence, StepKind,
};
use rigidkit_core::error::Error;
use rigidkit_core::molecular::molecular_prediction;
use rigidkit_core::multigraph::{Dimension, Multigraph};
use rigidkit_core::realization::{
    dump_body_realization, dump_panel_realization, generic_body_hinge, realize_panel_hinge,
};
use rigidkit_core::tree_packing::{deficiency, deficiency_bruteforce};

#[derive(Parser)]
#[command(name = "rigidkit", version, about = "Body-and-hinge rigidity toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deficiency, rigidity and minimality analysis of a graph file.
    Analyze {
        path: PathBuf,
        /// Ambient dimension; defaults to the file header.
        #[arg(long)]
        dim: Option<usize>,
        /// Also compute the brute-force witness partition (|V| <= 10).
        #[arg(long)]
        witness: bool,
        /// Write the JSON report to a file instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Construct a realization attaining the predicted rank.
    Realize {
        path: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        /// Seed for all random draws; RIGIDKIT_SEED applies when absent.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the realization dump to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Panel)]
        mode: Mode,
    },
    /// Print the reduction sequence of a minimally rigid graph.
    Decompose {
        path: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Square-graph rank prediction (d = 3) with an optional exact oracle.
    Molecule {
        path: PathBuf,
        /// Cross-check the prediction against the exact bar-joint rank.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Body,
    Panel,
}

#[derive(Serialize)]
struct AnalysisReport {
    schema: u32,
    d: usize,
    #[serde(rename = "D")]
    screw_dim: usize,
    n: usize,
    m: usize,
    deficiency: usize,
    body_hinge_rigid: bool,
    minimal: bool,
    redundant_edges: Vec<usize>,
    rigid_subgraph: Option<Vec<usize>>,
    construction_sequence: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_partition: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize)]
struct RealizeReport {
    schema: u32,
    d: usize,
    #[serde(rename = "D")]
    screw_dim: usize,
    n: usize,
    m: usize,
    mode: String,
    seed: u64,
    predicted_rank: usize,
    achieved_rank: usize,
    rank_matches: bool,
    dump: Option<String>,
}

#[derive(Serialize)]
struct MoleculeReport {
    schema: u32,
    n: usize,
    edges_of_square: usize,
    deficiency: usize,
    predicted_rank: usize,
    oracle_rank: Option<usize>,
    agree: Option<bool>,
}

fn effective_seed(flag: Option<u64>) -> u64 {
    if let Some(s) = flag {
        return s;
    }
    std::env::var("RIGIDKIT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn load_graph(path: &PathBuf, dim_flag: Option<usize>) -> Result<(Dimension, Multigraph), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (file_d, graph) = Multigraph::parse(&text).map_err(|e| e.to_string())?;
    let d = dim_flag.unwrap_or(file_d);
    let dim = Dimension::new(d).map_err(|e| e.to_string())?;
    Ok((dim, graph))
}

fn emit(json: String, target: Option<&PathBuf>) -> Result<(), String> {
    match target {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn run_analyze(
    path: PathBuf,
    dim_flag: Option<usize>,
    witness: bool,
    json: Option<PathBuf>,
) -> ExitCode {
    let (dim, graph) = match load_graph(&path, dim_flag) {
        Ok(ok) => ok,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let classification = classify(&graph, &dim);
    let rigid = find_proper_rigid_subgraph(&graph, &dim)
        .map(|r| r.vertices.iter().copied().collect::<Vec<_>>());
    let construction = if classification.k == 0 && classification.minimal {
        inductive_sequence(&graph, &dim).ok().map(|seq| {
            seq.steps
                .iter()
                .map(|s| format_step(&s.kind))
                .collect::<Vec<String>>()
        })
    } else {
        None
    };
    let witness_partition = if witness {
        match deficiency_bruteforce(&graph, &dim) {
            Ok(rep) => rep.witness_partition.map(|p| {
                p.blocks()
                    .iter()
                    .map(|b| b.iter().copied().collect())
                    .collect()
            }),
            Err(e) => {
                eprintln!("witness skipped: {e}");
                None
            }
        }
    } else {
        None
    };
    let report = AnalysisReport {
        schema: 1,
        d: dim.d(),
        screw_dim: dim.screw_dim(),
        n: graph.vertex_count(),
        m: graph.edge_count(),
        deficiency: classification.k,
        body_hinge_rigid: classification.k == 0,
        minimal: classification.minimal,
        redundant_edges: classification.redundant_edges.iter().copied().collect(),
        rigid_subgraph: rigid,
        construction_sequence: construction,
        witness_partition,
    };
    match emit(serde_json::to_string_pretty(&report).expect("serializable"), json.as_ref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn format_step(kind: &StepKind) -> String {
    match kind {
        StepKind::Contraction(rigid) => {
            let vs: Vec<String> = rigid.vertices.iter().map(|v| v.to_string()).collect();
            format!("contract rigid subgraph on {{{}}}", vs.join(","))
        }
        StepKind::SplitOff { vertex, neighbors } => format!(
            "split off at {} along {}-{}",
            vertex, neighbors.0, neighbors.1
        ),
    }
}

fn run_realize(
    path: PathBuf,
    dim_flag: Option<usize>,
    seed_flag: Option<u64>,
    out: Option<PathBuf>,
    mode: Mode,
) -> ExitCode {
    let (dim, graph) = match load_graph(&path, dim_flag) {
        Ok(ok) => ok,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let seed = effective_seed(seed_flag);
    let predicted =
        dim.screw_dim() * (graph.vertex_count() - 1) - deficiency(&graph, &dim).k;
    let (achieved, dump) = match mode {
        Mode::Panel => match realize_panel_hinge(&graph, &dim, seed) {
            Ok(outcome) => (
                outcome.rank,
                dump_panel_realization(&graph, &outcome.realization),
            ),
            Err(e) => return realize_failure(e),
        },
        Mode::Body => match generic_body_hinge(&graph, &dim, seed) {
            Ok((realization, rank)) => (rank, dump_body_realization(&graph, &realization)),
            Err(e) => return realize_failure(e),
        },
    };
    let dump_path = out.as_ref().map(|p| p.display().to_string());
    if let Some(target) = &out {
        if let Err(e) = std::fs::write(target, &dump) {
            eprintln!("cannot write {}: {e}", target.display());
            return ExitCode::from(1);
        }
    }
    let report = RealizeReport {
        schema: 1,
        d: dim.d(),
        screw_dim: dim.screw_dim(),
        n: graph.vertex_count(),
        m: graph.edge_count(),
        mode: match mode {
            Mode::Panel => "panel".into(),
            Mode::Body => "body".into(),
        },
        seed,
        predicted_rank: predicted,
        achieved_rank: achieved,
        rank_matches: achieved == predicted,
        dump: dump_path,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializable")
    );
    if achieved == predicted {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn realize_failure(e: Error) -> ExitCode {
    eprintln!("{e}");
    match e {
        Error::BudgetExhausted { .. } => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn run_decompose(path: PathBuf, dim_flag: Option<usize>) -> ExitCode {
    let (dim, graph) = match load_graph(&path, dim_flag) {
        Ok(ok) => ok,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let classification = classify(&graph, &dim);
    if classification.k != 0 || !classification.minimal {
        let redundant: Vec<String> = classification
            .redundant_edges
            .iter()
            .map(|e| e.to_string())
            .collect();
        eprintln!(
            "input is not minimally rigid: deficiency {}, redundant edges [{}]",
            classification.k,
            redundant.join(",")
        );
        return ExitCode::from(4);
    }
    match inductive_sequence(&graph, &dim) {
        Ok(seq) => {
            for (i, step) in seq.steps.iter().enumerate() {
                println!(
                    "step {}: {} ({} vertices -> {})",
                    i + 1,
                    format_step(&step.kind),
                    step.before.vertex_count(),
                    step.after.vertex_count()
                );
            }
            println!(
                "terminal: {} vertices, {} parallel edges",
                seq.terminal.vertex_count(),
                seq.terminal.edge_count()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}

fn run_molecule(path: PathBuf, oracle: bool, seed_flag: Option<u64>) -> ExitCode {
    let (_, graph) = match load_graph(&path, Some(3)) {
        Ok(ok) => ok,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let seed = effective_seed(seed_flag);
    match molecular_prediction(&graph, oracle, seed) {
        Ok(rep) => {
            let report = MoleculeReport {
                schema: 1,
                n: rep.n,
                edges_of_square: rep.edges_of_square,
                deficiency: rep.deficiency,
                predicted_rank: rep.predicted_rank,
                oracle_rank: rep.oracle_rank,
                agree: rep.agree,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serializable")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(5)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            path,
            dim,
            witness,
            json,
        } => run_analyze(path, dim, witness, json),
        Command::Realize {
            path,
            dim,
            seed,
            out,
            mode,
        } => run_realize(path, dim, seed, out, mode),
        Command::Decompose { path, dim } => run_decompose(path, dim),
        Command::Molecule { path, oracle, seed } => run_molecule(path, oracle, seed),
    }
}
