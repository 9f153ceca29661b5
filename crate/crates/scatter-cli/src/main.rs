//! The `scatter` binary: subcommand parsing and exit-code mapping.
//!
//! * `scatter synth` — draw Poisson counts for a catalog obstacle.
//! * `scatter run` — full experiment from a TOML config.
//! * `scatter validate` — forward-solver diagnostics.
//! * `scatter plot` — re-render figures from a summary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O failure.

use clap::{Parser, Subcommand};
use scatter::curve::Obstacle;
use scatter::forward::FarFieldMap;
use scatter_cli::config::ExperimentConfig;
use scatter_cli::data::DataFile;
use scatter_cli::experiment::{regenerate_figures, run_experiment};
use scatter_cli::validate::validate_forward;
use scatter_cli::{CliError, Result};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "scatter",
    version,
    about = "Bayesian obstacle reconstruction from far-field photon counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize Poisson count data for a catalog obstacle.
    Synth {
        /// Obstacle name: peanut, kite, drop, or cloverleaf.
        #[arg(long)]
        obstacle: String,
        /// Exposure time scaling the intensities.
        #[arg(long, default_value_t = 1000.0)]
        tau: f64,
        /// Number of equispaced far-field detectors.
        #[arg(long, default_value_t = 64)]
        m: usize,
        /// Wavenumber.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Coupling parameter (defaults to the wavenumber).
        #[arg(long)]
        eta: Option<f64>,
        /// Constant detector background added to every intensity.
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        /// Seed for the count draw.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Incident direction as "x,y" (repeatable; normalized; default 1,0).
        #[arg(long = "incident", value_name = "X,Y")]
        incident: Vec<String>,
        /// Output path for the data JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a full experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cross-check the forward solver against analytic references.
    Validate,
    /// Re-render the figures for an existing summary JSON.
    Plot {
        /// Path to a summary.json written by `scatter run`.
        #[arg(long)]
        result: PathBuf,
    },
}

/// Parses "x,y" into a unit vector.
fn parse_direction(raw: &str) -> Result<[f64; 2]> {
    let bad = || {
        CliError::Config(format!(
            "incident direction {raw:?} is not of the form \"x,y\""
        ))
    };
    let (x, y) = raw.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    let len = x.hypot(y);
    if !len.is_finite() || len == 0.0 {
        return Err(CliError::Config(format!(
            "incident direction {raw:?} cannot be normalized"
        )));
    }
    Ok([x / len, y / len])
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            obstacle,
            tau,
            m,
            k,
            eta,
            shift,
            seed,
            incident,
            out,
        } => {
            let obstacle = Obstacle::from_str(&obstacle)?;
            let incident = if incident.is_empty() {
                vec![[1.0, 0.0]]
            } else {
                incident
                    .iter()
                    .map(|s| parse_direction(s))
                    .collect::<Result<Vec<_>>>()?
            };
            let n_incident = incident.len();
            let map = FarFieldMap::new(k, incident, m, tau)?
                .with_eta(eta.unwrap_or(k))?
                .with_shift(vec![shift; m])?;
            let data = DataFile::synthesize(obstacle, &map, seed)?;
            data.write(&out)?;
            println!(
                "wrote {} ({} counts: {} detectors x {} incident directions)",
                out.display(),
                data.y.len(),
                m,
                n_incident
            );
        }
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = run_experiment(&cfg, true)?;
            for path in &out.artifacts {
                println!("wrote {}", path.display());
            }
            let s = &out.summary;
            println!(
                "acceptance rate {:.3}, retained {} samples, forward failures {}",
                s.acceptance_rate, s.n_retained, s.forward_failures
            );
            if let (Some(err), Some(cov)) = (s.rel_l2_error, s.truth_coverage) {
                println!(
                    "relative L2 error {:.4}, truth inside 95% band at {:.1}% of angles",
                    err,
                    100.0 * cov
                );
            }
        }
        Command::Validate => {
            let report = validate_forward()?;
            println!("{report}");
            if !report.all_passed() {
                return Err(CliError::Numerical(format!(
                    "{} forward-solver checks failed",
                    report.failed()
                )));
            }
        }
        Command::Plot { result } => {
            for path in regenerate_figures(&result)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
