//! `su11` — config-driven experiments on the two-mode parametric
//! interferometer: squeezing phase diagram, pulse transients, sensitivity
//! scaling, pump depletion, and the above-threshold growth law. Each
//! subcommand reads a TOML config, runs the simulation, and writes a tidy
//! dataset (CSV + JSON) plus static SVG figures; `replot` re-renders the
//! figures from a stored dataset without re-simulating.

mod config;
mod dataset;
mod experiments;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Experiment, ExperimentConfig, Overrides};
use dataset::DataSet;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration; every problem found, not just the first.
    Validation(Vec<String>),
    /// Numerical or I/O failure during a run.
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(errors) => {
                writeln!(f, "invalid configuration:")?;
                for e in errors {
                    writeln!(f, "  - {e}")?;
                }
                Ok(())
            }
            CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<su11_core::Error> for CliError {
    fn from(e: su11_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "su11",
    version,
    about = "Two-mode parametric interferometer experiments",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed override; reruns with the same seed are bit-identical.
    #[arg(long)]
    seed: Option<u64>,
    /// Ensemble-size override.
    #[arg(long)]
    runs: Option<u64>,
    /// Validate the config and print the plan without simulating.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Steady-state squeezing on both sides of the threshold.
    PhaseDiagram(RunArgs),
    /// Squeezing through one pump pulse and the recovery after it.
    TransientSqueeze(RunArgs),
    /// Phase-sensitivity scaling with signal phonon number.
    HeisenbergScaling(RunArgs),
    /// Pump depletion from coherent seeding.
    PumpDepletion(RunArgs),
    /// Above-threshold growth rate and saturation amplitude.
    GrowthLaw(RunArgs),
    /// Re-render the figures of an existing dataset.
    Replot {
        /// dataset.json, or the directory holding it.
        #[arg(long)]
        data: PathBuf,
        /// Where to write the figures (default: next to the dataset).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::PhaseDiagram(a) => run(Experiment::PhaseDiagram, &a),
        Cmd::TransientSqueeze(a) => run(Experiment::TransientSqueeze, &a),
        Cmd::HeisenbergScaling(a) => run(Experiment::HeisenbergScaling, &a),
        Cmd::PumpDepletion(a) => run(Experiment::PumpDepletion, &a),
        Cmd::GrowthLaw(a) => run(Experiment::GrowthLaw, &a),
        Cmd::Replot { data, out } => replot(&data, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Validation(_)) => {
            eprint!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(kind: Experiment, args: &RunArgs) -> Result<(), CliError> {
    let overrides = Overrides {
        out: args.out.clone(),
        seed: args.seed,
        runs: args.runs,
    };
    let cfg = ExperimentConfig::load(&args.config, kind, &overrides)?;

    if args.dry_run {
        println!("experiment:      {}", kind.name());
        println!("config sha256:   {}", cfg.config_sha256);
        println!("drive grid:      {} point(s)", cfg.mu_grid.len().max(1));
        println!("ensemble:        {} runs", cfg.ensemble);
        println!("base seed:       {}", cfg.base_seed);
        println!("gamma-bar:       {:.6} rad/s", cfg.gamma_bar());
        println!("output dir:      {}", cfg.out_dir.display());
        println!("dry run: nothing written.");
        return Ok(());
    }

    let started = Instant::now();
    let ds = experiments::run(&cfg)?;
    ds.write(&cfg.out_dir)?;
    let figures = write_figures(&ds, &cfg.out_dir)?;

    println!(
        "{}: {} rows in {:.1} s -> {}",
        kind.name(),
        ds.rows.len(),
        started.elapsed().as_secs_f64(),
        cfg.out_dir.display()
    );
    if let Some(line) = headline(kind, &ds) {
        println!("  {line}");
    }
    println!("  {}", cfg.out_dir.join("dataset.csv").display());
    println!("  {}", cfg.out_dir.join("dataset.json").display());
    for f in figures {
        println!("  {}", f.display());
    }
    Ok(())
}

/// One-line takeaway for the finished run.
fn headline(kind: Experiment, ds: &DataSet) -> Option<String> {
    match kind {
        Experiment::PhaseDiagram => None,
        Experiment::TransientSqueeze => ds
            .scalar("min_squeezing_db")
            .map(|v| format!("deepest squeezing: {v:.2} dB")),
        Experiment::HeisenbergScaling => ds
            .scalar("alpha_fit_mc")
            .map(|v| format!("fitted scaling exponent: {v:.3}")),
        Experiment::PumpDepletion => ds
            .rows
            .iter()
            .filter(|r| r.quantity == "eta_measured_det")
            .map(|r| r.value)
            .max_by(f64::total_cmp)
            .map(|v| format!("largest deterministic depletion eta: {v:.5}")),
        Experiment::GrowthLaw => ds
            .scalar("amplitude_exponent_fit")
            .map(|v| format!("steady-amplitude exponent: {v:.3}")),
    }
}

fn replot(data: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let file = if data.is_dir() {
        data.join("dataset.json")
    } else {
        data.to_path_buf()
    };
    let ds = DataSet::read_json(&file)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| file.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    for f in write_figures(&ds, &dir)? {
        println!("{}", f.display());
    }
    Ok(())
}

fn write_figures(ds: &DataSet, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for (stem, figure) in experiments::figures(ds)? {
        let path = dir.join(format!("fig_{stem}.svg"));
        std::fs::write(&path, figure.render())
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
