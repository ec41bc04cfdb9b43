use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mqfi_core::anneal::{anneal, AnnealSchedule, CorrelationTensor};
use mqfi_core::harness::{
    canonical_jsonl, crossings, fss_collapse, parse_observables, persist, power_law_fit, read_rows_from, run_ensemble,
    run_sweep, scaling_points, size_series, AnnealConfig, EnsembleOptions, FitForm, Observable, Parameter,
    SweepConfig,
};
use mqfi_core::rng::seeded;
use mqfi_core::{Backend, Boundary, CircuitSpec, Error, Model};
use serde_json::json;

#[derive(Parser)]
#[command(name = "mqfi", version, about = "Monitored circuits and their quantum Fisher information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble of trajectories and write JSONL rows plus a summary.
    Run(RunArgs),
    /// Maximise the Fisher density for a correlation tensor stored as JSON.
    Anneal(AnnealArgs),
    /// Finite-size-scaling collapse of persisted rows.
    Collapse(CollapseArgs),
    /// Power-law fit of an observable against system size.
    FitPower(FitArgs),
    /// Run every point of a TOML sweep configuration.
    Sweep(SweepArgs),
    /// Print rows in canonical order without timing fields.
    Canonical(CanonicalArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    model: Model,
    #[arg(long = "L")]
    size: usize,
    #[arg(long, default_value_t = 0.0)]
    pz: f64,
    #[arg(long)]
    pxx: Option<f64>,
    #[arg(long)]
    pu: Option<f64>,
    #[arg(long, default_value_t = 4)]
    depth_factor: usize,
    #[arg(long)]
    trajectories: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "qfi")]
    metrics: String,
    #[arg(long)]
    boundary: Option<Boundary>,
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = mqfi_core::anneal::DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = mqfi_core::anneal::DEFAULT_ITERATIONS_PER_RUNG)]
    iters_per_rung: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnnealArgs {
    #[arg(long)]
    correlations: PathBuf,
    #[arg(long, default_value_t = mqfi_core::anneal::DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = mqfi_core::anneal::DEFAULT_ITERATIONS_PER_RUNG)]
    iters_per_rung: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CollapseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "tmi")]
    observable: Observable,
    /// Probability on the horizontal axis; inferred from the rows if absent.
    #[arg(long)]
    param: Option<Parameter>,
    #[arg(long, default_value_t = 0.0)]
    pc_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pc_max: f64,
    #[arg(long, default_value_t = 0.5)]
    nu_min: f64,
    #[arg(long, default_value_t = 3.0)]
    nu_max: f64,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "fq")]
    observable: Observable,
    #[arg(long, default_value = "pure")]
    form: FitForm,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct CanonicalArgs {
    #[arg(long)]
    input: PathBuf,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s {
        "statevector" => Ok(Backend::Statevector),
        "stabilizer" => Ok(Backend::Stabilizer),
        "cluster" => Ok(Backend::Cluster),
        _ => Err(format!("unknown backend '{s}'")),
    }
}

fn run(args: RunArgs) -> Result<serde_json::Value, Error> {
    let mut spec = CircuitSpec::for_model(args.model, args.size, args.pz, args.pu, args.pxx, args.seed)?
        .with_depth(args.depth_factor * args.size);
    if let Some(b) = args.boundary {
        spec = spec.with_boundary(b)?;
    }
    let observables = parse_observables(&args.metrics)?;
    let options = EnsembleOptions {
        backend: args.backend,
        anneal: AnnealConfig { schedule: AnnealSchedule::with_iterations(args.iters_per_rung)?, restarts: args.restarts },
        workers: args.workers,
        tmi_offset: 0,
    };
    let result = run_ensemble(&spec, args.trajectories, &observables, &options)?;
    persist(&result, &args.out)?;
    Ok(json!({ "out": args.out, "trajectories": result.rows.len(), "aggregates": result.aggregates }))
}

fn anneal_cmd(args: AnnealArgs) -> Result<serde_json::Value, Error> {
    let tensor = CorrelationTensor::from_json(&std::fs::read_to_string(&args.correlations)?)?;
    let schedule = AnnealSchedule::with_iterations(args.iters_per_rung)?;
    let result = anneal(&tensor, &schedule, args.restarts, &mut seeded(args.seed))?;
    Ok(serde_json::to_value(result)?)
}

fn collapse(args: CollapseArgs) -> Result<serde_json::Value, Error> {
    let rows = read_rows_from(&args.input)?;
    let points = scaling_points(&rows, args.observable, args.param)?;
    let result = fss_collapse(&points, (args.pc_min, args.pc_max), (args.nu_min, args.nu_max))?;
    let crossing = crossings(&points).ok();
    Ok(json!({ "collapse": result, "crossings": crossing, "points": points }))
}

fn fit(args: FitArgs) -> Result<serde_json::Value, Error> {
    let rows = read_rows_from(&args.input)?;
    let series = size_series(&rows, args.observable)?;
    Ok(serde_json::to_value(power_law_fit(&series, args.form)?)?)
}

fn sweep(args: SweepArgs) -> Result<serde_json::Value, Error> {
    let config = SweepConfig::from_path(&args.config)?;
    let done = run_sweep(&config)?;
    let points: Vec<_> = done
        .iter()
        .map(|(path, r)| json!({ "out": path, "L": r.spec.num_qubits, "p_z": r.spec.p_z, "p_u": r.spec.p_u, "p_xx": r.spec.p_xx, "aggregates": r.aggregates }))
        .collect();
    Ok(json!(points))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Anneal(a) => anneal_cmd(a),
        Command::Collapse(a) => collapse(a),
        Command::FitPower(a) => fit(a),
        Command::Sweep(a) => sweep(a),
        Command::Canonical(a) => read_rows_from(&a.input).and_then(|rows| canonical_jsonl(&rows)).map(|text| {
            print!("{text}");
            serde_json::Value::Null
        }),
    };
    match outcome {
        Ok(serde_json::Value::Null) => ExitCode::SUCCESS,
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
