//! `qrlab`: config-driven experiments on recovery channels for small
//! stabiliser codes. Subcommands: sweep, crossing, ts-grid, certify, and
//! catalogue listings.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qrlab_cli::config::{ExperimentConfig, ExperimentKind, OutputFormat, Overrides};
use qrlab_cli::error::{CliError, CliResult};
use qrlab_cli::records::{
    certify_csv_row, CERTIFY_HEADER, CROSSING_HEADER, SWEEP_HEADER, TS_GRID_HEADER,
};
use qrlab_cli::{emit, run};

#[derive(Parser)]
#[command(
    name = "qrlab",
    version,
    about = "Recovery-channel experiments on small stabiliser codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity and diagnostics over a (code, p, recovery) grid.
    Sweep(RunArgs),
    /// Finite-size crossings of fidelity curves across a code family.
    Crossing(RunArgs),
    /// Teacher-student mismatch grid over (p_student, p_star).
    TsGrid(RunArgs),
    /// Bound certification over a (code, p) grid.
    Certify(RunArgs),
    /// Code catalogue.
    Codes {
        #[command(subcommand)]
        action: CodesAction,
    },
    /// Channel families.
    Channels {
        #[command(subcommand)]
        action: ChannelsAction,
    },
}

#[derive(Subcommand)]
enum CodesAction {
    /// List catalogued codes.
    List,
    /// Export a code's stabiliser/logical bit-matrices as JSON.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ChannelsAction {
    /// List channel families and their parameter meaning.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output path (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json (overrides the config).
    #[arg(long)]
    format: Option<String>,
    /// Random seed for optional Monte Carlo cross-checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for grid points.
    #[arg(long)]
    workers: Option<usize>,
    /// Cap on the tripartite diagnostic dimension.
    #[arg(long = "max-dim")]
    max_dim: Option<usize>,
    /// Record wall-clock timings (JSON output only; breaks byte-level
    /// reproducibility).
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn load(&self, expected: ExperimentKind) -> CliResult<ExperimentConfig> {
        let over = Overrides {
            out: self.out.clone(),
            format: match &self.format {
                Some(f) => Some(f.parse()?),
                None => None,
            },
            seed: self.seed,
            workers: self.workers,
            max_dim: self.max_dim,
            timings: self.timings,
        };
        let config = ExperimentConfig::load(&self.config)?.apply_overrides(&over);
        if config.kind != expected {
            return Err(CliError::Config(format!(
                "config kind {:?} does not match the subcommand",
                config.kind
            )));
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    // Deterministic kernels: identical runs must produce identical bytes.
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Sweep(args) => {
            let config = args.load(ExperimentKind::Sweep)?;
            let outcome = run::run_sweep(&config)?;
            let path = config.output_path();
            match config.format {
                OutputFormat::Csv => {
                    let rows: Vec<String> = outcome.records.iter().map(|r| r.csv_row()).collect();
                    emit::emit_csv(&path, SWEEP_HEADER, &rows)?;
                }
                OutputFormat::Json => emit::emit_json(&path, &outcome.records)?,
            }
            println!(
                "wrote {} sweep records to {}",
                outcome.records.len(),
                path.display()
            );
            if outcome.bounds_violated {
                return Err(CliError::BoundViolation(
                    "one or more certified bounds failed; see the emitted records".into(),
                ));
            }
            Ok(())
        }
        Command::Crossing(args) => {
            let config = args.load(ExperimentKind::Crossing)?;
            let records = run::run_crossing(&config)?;
            let path = config.output_path();
            match config.format {
                OutputFormat::Csv => {
                    let rows: Vec<String> = records.iter().map(|r| r.csv_row()).collect();
                    emit::emit_csv(&path, CROSSING_HEADER, &rows)?;
                }
                OutputFormat::Json => emit::emit_json(&path, &records)?,
            }
            for record in &records {
                match record.crossing {
                    Some(c) => println!(
                        "{} x {} ({}): crossing at p = {:.6}",
                        record.code_a, record.code_b, record.recovery, c
                    ),
                    None => println!(
                        "{} x {} ({}): none found",
                        record.code_a, record.code_b, record.recovery
                    ),
                }
            }
            println!(
                "wrote {} crossing records to {}",
                records.len(),
                path.display()
            );
            Ok(())
        }
        Command::TsGrid(args) => {
            let config = args.load(ExperimentKind::TsGrid)?;
            let records = run::run_ts_grid(&config)?;
            let path = config.output_path();
            match config.format {
                OutputFormat::Csv => {
                    let rows: Vec<String> = records.iter().map(|r| r.csv_row()).collect();
                    emit::emit_csv(&path, TS_GRID_HEADER, &rows)?;
                }
                OutputFormat::Json => emit::emit_json(&path, &records)?,
            }
            println!("wrote {} grid records to {}", records.len(), path.display());
            Ok(())
        }
        Command::Certify(args) => {
            let config = args.load(ExperimentKind::Certify)?;
            let outcome = run::run_certify(&config)?;
            let path = config.output_path();
            match config.format {
                OutputFormat::Csv => {
                    let rows: Vec<String> = outcome.reports.iter().map(certify_csv_row).collect();
                    emit::emit_csv(&path, CERTIFY_HEADER, &rows)?;
                }
                OutputFormat::Json => emit::emit_json(&path, &outcome.reports)?,
            }
            let held = outcome.reports.iter().filter(|r| r.all_hold).count();
            println!(
                "certified {} grid points ({} hold) -> {}",
                outcome.reports.len(),
                held,
                path.display()
            );
            if outcome.bounds_violated {
                for report in outcome.reports.iter().filter(|r| !r.all_hold) {
                    eprintln!(
                        "violation: {} {} p={} min slack {:?}",
                        report.code,
                        report.channel,
                        report.p,
                        report.min_slack()
                    );
                }
                return Err(CliError::BoundViolation(
                    "bound certification failed".into(),
                ));
            }
            Ok(())
        }
        Command::Codes { action } => match action {
            CodesAction::List => {
                for (name, description) in qrlab::codes::CATALOGUE {
                    let code = qrlab::codes::build_code(name)?;
                    println!("{name:<12} [[{},{}]]  {description}", code.n(), code.k());
                }
                Ok(())
            }
            CodesAction::Export { name, out } => {
                let code = qrlab::codes::build_code(&name)?;
                let json = serde_json::to_string_pretty(&code.export())
                    .map_err(|e| CliError::Io(format!("serialisation failed: {e}")))?;
                match out {
                    Some(path) => {
                        std::fs::write(&path, json + "\n").map_err(|e| {
                            CliError::Io(format!("cannot write {}: {e}", path.display()))
                        })?;
                        println!("wrote {name} to {}", path.display());
                    }
                    None => println!("{json}"),
                }
                Ok(())
            }
        },
        Command::Channels { action } => match action {
            ChannelsAction::List => {
                for (name, description) in qrlab::channels::CHANNEL_FAMILIES {
                    println!("{name:<18} {description}");
                }
                Ok(())
            }
        },
    }
}
