//! `listdefect`: generate instances, run coloring algorithms on them and
//! summarize sweeps.
//!
//! Exit codes: 0 when a validated coloring (or an oracle verdict) was
//! produced, 2 when the algorithm failed fast, 1 on any other error.

mod algo;
mod sweep;

use algo::{execute, Algorithm, Outcome, Params};
use clap::{Args, Parser, Subcommand, ValueEnum};
use listdefect::generate::{generate_graph, generate_lists, Family, ListModel, Target};
use listdefect::io::{instance_from_json, instance_to_json};
use listdefect::reductions::stages_csv;
use listdefect::{Error, Flavor};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "listdefect", version, about = "Distributed list defective coloring simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Generate(GenerateArgs),
    /// Run one algorithm on an instance and write coloring, report and trace.
    Run(RunArgs),
    /// Decide a small instance exhaustively.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run every combination of a JSON matrix and print a CSV summary.
    Sweep {
        #[arg(long)]
        matrix: PathBuf,
        /// Destination CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    DegreePlusOne,
    UniformK,
    DefectBudget,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Eq1,
    Eq2,
    Energy,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Defective,
    Oriented,
    Arbdefective,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Degree cap of random families; ignored by rings and cliques.
    #[arg(long, default_value_t = 4)]
    delta: usize,
    #[arg(long, value_enum, default_value = "degree-plus-one")]
    list_model: Model,
    /// List size of `uniform-k`.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Defect of every color under `uniform-k`.
    #[arg(long, default_value_t = 0)]
    defect: u64,
    /// Condition a `defect-budget` list must meet.
    #[arg(long, value_enum, default_value = "eq1")]
    target: TargetArg,
    /// `Σ(d+1)^exponent ≥ factor·β^exponent` for the energy target.
    #[arg(long, default_value_t = 2)]
    exponent: u32,
    #[arg(long, default_value_t = 1.0)]
    factor: f64,
    /// Colors are drawn from `0..space`.
    #[arg(long, default_value_t = 64)]
    space: u64,
    #[arg(long, value_enum, default_value = "defective")]
    flavor: FlavorArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2)]
    tau_override: u64,
    #[arg(long)]
    taubar_override: Option<u64>,
    /// Branching factor of the space reduction.
    #[arg(long)]
    p: Option<u64>,
    /// Message preset: `p = ⌈|C|^{1/r}⌉` unless `--p` is given.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Per-message bit budget; unbounded when absent (the pipeline then
    /// uses its own default).
    #[arg(long)]
    bits_budget: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    max_rounds: usize,
    /// Recorded in the report; all algorithms are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(&a).map(|()| ExitCode::SUCCESS),
        Command::Run(a) => {
            let params = Params {
                alpha: a.alpha,
                tau: a.tau_override,
                taubar: a.taubar_override,
                p: a.p,
                r: a.r,
                bits: a.bits_budget,
                max_rounds: a.max_rounds,
            };
            run(&a.instance, a.algorithm, &params, a.seed, &a.out_dir)
        }
        Command::Oracle { instance, out_dir } => run(&instance, Algorithm::Oracle, &Params::default(), 0, &out_dir),
        Command::Sweep { matrix, out } => sweep(&matrix, out.as_deref()).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

fn generate(a: &GenerateArgs) -> Result<(), Error> {
    let model = match a.list_model {
        Model::DegreePlusOne => ListModel::DegreePlusOne,
        Model::UniformK => ListModel::UniformK { k: a.k, defect: a.defect },
        Model::DefectBudget => ListModel::DefectBudget {
            target: match a.target {
                TargetArg::Eq1 => Target::Eq1,
                TargetArg::Eq2 => Target::Eq2,
                TargetArg::Energy => Target::Energy { exponent: a.exponent, factor: a.factor },
            },
        },
    };
    let flavor = match a.flavor {
        FlavorArg::Defective => Flavor::Defective,
        FlavorArg::Oriented => Flavor::Oriented,
        FlavorArg::Arbdefective => Flavor::Arbdefective,
    };
    let graph = generate_graph(a.family, a.n, a.delta, a.seed)?;
    let inst = generate_lists(&graph, model, a.space, flavor, a.seed)?;
    let text = instance_to_json(&graph, &inst) + "\n";
    match &a.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Runs one algorithm and writes `report.json`, `trace.csv`, and, when a
/// coloring exists, `coloring.json` (plus `stages.csv` for the framework).
fn run(instance: &Path, algo: Algorithm, params: &Params, seed: u64, out_dir: &Path) -> Result<ExitCode, Error> {
    let (graph, inst) = instance_from_json(&std::fs::read_to_string(instance)?)?;
    std::fs::create_dir_all(out_dir)?;
    let result = execute(algo, &graph, &inst, params);
    let (status, code) = match &result {
        Ok(_) => ("valid", 0),
        Err(e) if e.is_fail_fast() => ("fail-fast", 2),
        Err(_) => ("error", 1),
    };
    let empty = Outcome::default();
    let out = result.as_ref().unwrap_or(&empty);
    let report = json!({
        "algorithm": algo.name(),
        "seed": seed,
        "params": params,
        "status": status,
        "verdict": out.verdict,
        "failure_kind": result.as_ref().err().map(Error::kind),
        "failure": result.as_ref().err().map(ToString::to_string),
        "rounds": out.trace.rounds_elapsed,
        "max_bits": out.trace.overall_max_bits(),
        "violations": out.violations,
        "notes": out.trace.notes,
    });
    std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    std::fs::write(out_dir.join("trace.csv"), out.trace.to_csv())?;
    if let Some(coloring) = &out.output {
        std::fs::write(out_dir.join("coloring.json"), serde_json::to_string_pretty(coloring)? + "\n")?;
    }
    if !out.stages.is_empty() {
        std::fs::write(out_dir.join("stages.csv"), stages_csv(&out.stages))?;
    }
    match (&result, &out.verdict) {
        (Ok(_), Some(v)) => println!("{}: {v}", algo.name()),
        (Ok(_), None) => println!("{}: valid, {} rounds", algo.name(), out.trace.rounds_elapsed),
        (Err(e), _) => eprintln!("{}: {status}: {e}", algo.name()),
    }
    Ok(ExitCode::from(code))
}

fn sweep(matrix: &Path, out: Option<&Path>) -> Result<(), Error> {
    let m: sweep::Matrix = serde_json::from_str(&std::fs::read_to_string(matrix)?)?;
    let rows = sweep::run_matrix(&m);
    let text = sweep::to_csv(&rows).map_err(|e| Error::Io(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
