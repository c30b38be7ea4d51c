use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use chronon::harness::{load_config, run_experiment, ExperimentConfig, ExperimentKind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chronon", version, about = "Particle-string circuit Hamiltonians: build, solve, check")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lay out a circuit and write the grid JSON and dual-rail netlist.
    Compile(Common),
    /// Low spectrum of the string Hamiltonian.
    Spectrum(Common),
    /// Effective dynamics from the initial string.
    Evolve(Common),
    /// Gap and overlap along the adiabatic path.
    Adiabatic(Common),
    /// Full model against the first-order effective operator.
    ValidatePt(Common),
    /// Incorrect-logic coupling of a long CNOT region.
    Leakage(Common),
    /// Blocking toy model spectrum.
    DemoToy(Common),
    /// Random circuits against the reference simulator.
    LogicCheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; its `kind` is replaced by the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Circuit file, used when no config is given or to override it.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Grid size for runs without a circuit.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write operators as MatrixMarket files.
    #[arg(long)]
    dump_ops: bool,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::Compile(c) => (ExperimentKind::Netlist, c),
            Command::Spectrum(c) => (ExperimentKind::Spectrum, c),
            Command::Evolve(c) => (ExperimentKind::Evolve, c),
            Command::Adiabatic(c) => (ExperimentKind::Adiabatic, c),
            Command::ValidatePt(c) => (ExperimentKind::ValidatePt, c),
            Command::Leakage(c) => (ExperimentKind::Leakage, c),
            Command::DemoToy(c) => (ExperimentKind::DemoToy, c),
            Command::LogicCheck(c) => (ExperimentKind::LogicCheck, c),
        }
    }
}

fn build_config(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::new(kind),
    };
    cfg.kind = kind;
    if let Some(c) = &args.circuit {
        cfg.circuit = Some(c.clone());
        cfg.source = None;
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.dump_ops |= args.dump_ops;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let (kind, args) = cli.command.split();
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let cfg = build_config(kind, &args)?;
    let report = run_experiment(&cfg).context("experiment failed")?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("report: {}", cfg.out.join("report.json").display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
