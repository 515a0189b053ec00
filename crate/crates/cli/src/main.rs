//! `gch` — run, certify and verify the generalized Camassa–Holm family.
//!
//! Subcommands: `simulate` (CSV + JSON report, exit 0/10/20 by outcome),
//! `certify` (certificates without time stepping), `verify` (exact symbolic
//! identity checks), `sweep` (concurrent parameter scans) and `preset`
//! (rotation-preset constants).  Configuration and exit-code contracts are
//! documented on each subcommand.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gch::config::RunConfig;
use gch::{run, sweep};
use gch_core::model::rotation_preset;
use gch_core::symbolic;

#[derive(Parser)]
#[command(name = "gch", version, about = "Generalized Camassa-Holm solver and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run; writes a trajectory CSV and a JSON report.
    ///
    /// Exit code: 0 if the run reached its horizon, 10 on (expected)
    /// wave breaking, 20 on numerical failure, 2 on configuration errors.
    Simulate {
        /// TOML run configuration.
        config: PathBuf,
        /// Trajectory CSV path (default: report stem + .csv).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON report path (default: gch_report.json).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include the symbolic verdict table in the report.
        #[arg(long)]
        verdicts: bool,
        /// Include wall-clock timing (breaks byte-stability of the report).
        #[arg(long)]
        timings: bool,
    },
    /// Evaluate all certificates on the initial data without time stepping.
    Certify {
        /// TOML run configuration.
        config: PathBuf,
    },
    /// Check the symbolic identities over exact rationals.
    ///
    /// Exit code: 0 iff every requested identity passes; 2 on unknown names.
    Verify {
        /// Identity names (default: all).
        #[arg(value_parser = symbolic::IDENTITY_NAMES)]
        names: Vec<String>,
    },
    /// Run a cartesian product of axes over a base config on a worker pool.
    ///
    /// Worker count defaults to the available parallelism; override with the
    /// GCH_WORKERS environment variable.
    Sweep {
        /// TOML base configuration.
        config: PathBuf,
        /// Axis spec `key=v1,v2,...` or `key=start:end:count`; repeatable.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        /// Output directory for per-run artifacts and summary.csv.
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
    },
    /// Print the rotation-preset constants and mapped parameters as JSON.
    Preset {
        /// Coriolis rotation frequency.
        omega: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, csv, report, verdicts, timings } => {
            let cfg = RunConfig::from_path(&config)?;
            let (run_report, csv_text) = run::simulate(&cfg, verdicts, timings)?;
            let report_path = report.unwrap_or_else(|| PathBuf::from("gch_report.json"));
            let csv_path = csv.unwrap_or_else(|| report_path.with_extension("csv"));
            std::fs::write(&csv_path, csv_text)?;
            std::fs::write(&report_path, serde_json::to_string_pretty(&run_report)?)?;
            println!(
                "{:?} at t = {} ({} steps); report: {}",
                run_report.monitors.classification,
                run_report.t_stop,
                run_report.steps,
                report_path.display()
            );
            Ok(ExitCode::from(
                u8::try_from(run::exit_code(run_report.monitors.classification)).expect("small"),
            ))
        }
        Command::Certify { config } => {
            let cfg = RunConfig::from_path(&config)?;
            let ws = gch_core::spectral::SpectralWorkspace::new(cfg.grid.half_length, cfg.grid.n)?;
            let bundle = run::certificate_bundle(&cfg, &ws)?;
            println!("{}", serde_json::to_string_pretty(&bundle)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { names } => {
            let verdicts = if names.is_empty() {
                symbolic::verify(None)?
            } else {
                let mut all = Vec::new();
                for name in &names {
                    all.extend(symbolic::verify(Some(name))?);
                }
                all
            };
            let mut ok = true;
            println!("{:<18} {:>6} {:>6}  statement", "identity", "terms", "pass");
            for v in &verdicts {
                ok &= v.pass;
                println!("{:<18} {:>6} {:>6}  {}", v.name, v.terms_examined, v.pass, v.statement);
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Sweep { config, axes, out } => {
            let cfg = RunConfig::from_path(&config)?;
            let axes = axes
                .iter()
                .map(|s| sweep::parse_axis(s))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let summary = sweep::run_sweep(&cfg, &axes, &out)?;
            std::fs::write(out.join("summary.csv"), &summary)?;
            print!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset { omega } => {
            let (params, consts) = rotation_preset(omega)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "omega": omega,
                    "constants": consts,
                    "params": params,
                }))?
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
