//! End-to-end experiment orchestration: data in, chain run, artifacts out.
//!
//! A run leaves exactly these files in the output directory:
//!
//! * `data.json` — the synthetic observations (unless an external data file
//!   was reused),
//! * `samples.csv` — retained latent samples, one row per sample, one column
//!   per grid node,
//! * `summary.json` — posterior summary, metrics, and a config echo,
//! * `data.svg`, `reconstruction.svg`, `trace.svg` — the three figures.
//!
//! All writes go through a temporary file plus atomic rename, and happen only
//! after the chain has completed.

use crate::config::ExperimentConfig;
use crate::data::{write_atomic, DataFile};
use crate::error::{CliError, Result};
use crate::figures;
use crate::workers;
use scatter::mcmc::{run_chain_with, ChainResult, ProgressRecord};
use scatter::posterior::PosteriorPotential;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SUMMARY_FORMAT_VERSION: u32 = 1;

/// Cap on stored trace points; longer traces are decimated.
pub const TRACE_MAX_POINTS: usize = 2000;

/// Progress cadence (iterations) for the terminal stream.
const PROGRESS_EVERY: usize = 2000;

// ---------------------------------------------------------------------------
// summary file
// ---------------------------------------------------------------------------

/// The posterior summary persisted as `summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SummaryFile {
    pub format_version: u32,
    /// Obstacle behind the data (the truth, not necessarily the config's).
    pub obstacle: String,
    /// Echo of the configuration that produced this summary.
    pub config: ExperimentConfig,
    /// Latent grid angles t_i.
    pub angles: Vec<f64>,
    /// Pointwise posterior mean radius.
    pub mean_q: Vec<f64>,
    /// Pointwise 2.5% radius quantile.
    pub band_lo: Vec<f64>,
    /// Pointwise 97.5% radius quantile.
    pub band_hi: Vec<f64>,
    /// Truth radius at `angles`, when the truth is star-shaped.
    pub truth_q: Option<Vec<f64>>,
    /// ‖mean − truth‖₂ / ‖truth‖₂ over the grid, when the truth is radial.
    pub rel_l2_error: Option<f64>,
    /// Fraction of angles with truth inside [band_lo, band_hi].
    pub truth_coverage: Option<f64>,
    pub acceptance_rate: f64,
    pub n_retained: usize,
    pub forward_failures: usize,
    /// Iteration stride of the stored (decimated) trace.
    pub trace_stride: usize,
    /// Potential of the current state, every `trace_stride` iterations.
    pub potential_trace: Vec<f64>,
    /// Path of the data file, relative to this summary when possible.
    pub data_file: String,
}

impl SummaryFile {
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec_pretty(self)
            .map_err(|e| CliError::Io(format!("could not serialize summary: {e}")))?;
        write_atomic(path, &json)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file: SummaryFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if file.format_version != SUMMARY_FORMAT_VERSION {
            return Err(CliError::Config(format!(
                "{}: summary format version {} (this build reads {})",
                path.display(),
                file.format_version,
                SUMMARY_FORMAT_VERSION
            )));
        }
        Ok(file)
    }
}

/// Paths of everything a run produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub output_dir: PathBuf,
    pub summary_path: PathBuf,
    pub artifacts: Vec<PathBuf>,
    pub summary: SummaryFile,
}

// ---------------------------------------------------------------------------
// the run
// ---------------------------------------------------------------------------

/// Runs the experiment a config describes: obtain data, run the chain on a
/// worker (streaming progress to stderr when `verbose`), then write samples,
/// summary, and figures.
pub fn run_experiment(cfg: &ExperimentConfig, verbose: bool) -> Result<ExperimentOutput> {
    let built = cfg.build()?;
    let out_dir = cfg.experiment.output_dir.clone();
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

    // Data: reuse an external file when configured, else synthesize with the
    // config's forward setup. A reused file is authoritative for the forward
    // geometry (it is self-describing).
    let (data, data_file_ref) = match &cfg.experiment.data_file {
        Some(path) => {
            let data = DataFile::read(path)?;
            (data, path.to_string_lossy().into_owned())
        }
        None => {
            let data = DataFile::synthesize(built.obstacle, &built.map, cfg.experiment.data_seed)?;
            data.write(&out_dir.join("data.json"))?;
            (data, "data.json".to_string())
        }
    };
    let map = data.far_field_map()?;
    let observation = data.observation()?;
    let mut potential =
        PosteriorPotential::new(observation, map, built.chain.positivity, built.chain.tv)?;

    let threads = workers::configured_threads()?;
    if verbose {
        eprintln!(
            "chain: {} iterations, burn-in {}, thinning {}, beta {}, seed {}",
            built.chain.n_iters,
            built.chain.burn_in,
            built.chain.thin,
            built.chain.beta,
            built.chain.seed
        );
    }
    let chain_cfg = built.chain.clone();
    let n_iters = chain_cfg.n_iters;
    let result = workers::run_streaming(
        threads,
        move |sink: &mut dyn FnMut(ProgressRecord)| {
            run_chain_with(&chain_cfg, &mut potential, |rec| sink(rec.clone()))
        },
        |rec: ProgressRecord| {
            if !verbose {
                return;
            }
            if let Some(why) = &rec.failure {
                eprintln!("iteration {}: forward solve failed ({why})", rec.iteration);
            } else if rec.iteration % PROGRESS_EVERY == 0 || rec.iteration == n_iters {
                eprintln!(
                    "iteration {}/{}  acceptance {:.3}  potential {:.3}",
                    rec.iteration, n_iters, rec.acceptance_rate, rec.psi
                );
            }
        },
    )?;

    let summary = summarize_run(cfg, &data, &result, &data_file_ref);
    let mut artifacts = Vec::new();

    let samples_path = out_dir.join("samples.csv");
    write_atomic(&samples_path, samples_csv(&result).as_bytes())?;
    artifacts.push(samples_path);

    let summary_path = out_dir.join("summary.json");
    summary.write(&summary_path)?;
    artifacts.push(summary_path.clone());

    artifacts.extend(write_figures(&summary, &data, &out_dir)?);
    if let Some(p) = (cfg.experiment.data_file.is_none()).then(|| out_dir.join("data.json")) {
        artifacts.insert(0, p);
    }

    Ok(ExperimentOutput {
        output_dir: out_dir,
        summary_path,
        artifacts,
        summary,
    })
}

/// Reduces a finished chain to the persisted summary.
fn summarize_run(
    cfg: &ExperimentConfig,
    data: &DataFile,
    result: &ChainResult,
    data_file_ref: &str,
) -> SummaryFile {
    let angles = result.mean_curve.grid.nodes().to_vec();
    let truth = data.truth_obstacle().ok();
    let truth_q: Option<Vec<f64>> =
        truth.and_then(|o| angles.iter().map(|&t| o.radius(t)).collect());

    let (rel_l2_error, truth_coverage) = match &truth_q {
        None => (None, None),
        Some(q) => {
            let num: f64 = result
                .mean_curve
                .q
                .iter()
                .zip(q)
                .map(|(m, t)| (m - t) * (m - t))
                .sum();
            let den: f64 = q.iter().map(|t| t * t).sum();
            let covered = q
                .iter()
                .enumerate()
                .filter(|(i, t)| result.band_lo[*i] <= **t && **t <= result.band_hi[*i])
                .count();
            (
                Some((num / den).sqrt()),
                Some(covered as f64 / q.len() as f64),
            )
        }
    };

    let trace_stride = result
        .potential_trace
        .len()
        .div_ceil(TRACE_MAX_POINTS)
        .max(1);
    let potential_trace: Vec<f64> = result
        .potential_trace
        .iter()
        .step_by(trace_stride)
        .copied()
        .collect();

    SummaryFile {
        format_version: SUMMARY_FORMAT_VERSION,
        obstacle: data.obstacle.clone(),
        config: cfg.clone(),
        angles,
        mean_q: result.mean_curve.q.clone(),
        band_lo: result.band_lo.clone(),
        band_hi: result.band_hi.clone(),
        truth_q,
        rel_l2_error,
        truth_coverage,
        acceptance_rate: result.acceptance_rate,
        n_retained: result.samples.len(),
        forward_failures: result.forward_failures,
        trace_stride,
        potential_trace,
        data_file: data_file_ref.to_string(),
    }
}

/// One row per retained sample, one column per latent grid node.
fn samples_csv(result: &ChainResult) -> String {
    let mut out = String::new();
    for sample in &result.samples {
        let mut first = true;
        for v in &sample.values {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Renders and writes the three figures next to the summary.
fn write_figures(summary: &SummaryFile, data: &DataFile, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let path = dir.join("data.svg");
    write_atomic(&path, figures::data_figure(data)?.as_bytes())?;
    written.push(path);

    let path = dir.join("reconstruction.svg");
    let svg = figures::reconstruction_figure(
        &summary.obstacle,
        &summary.angles,
        &summary.mean_q,
        &summary.band_lo,
        &summary.band_hi,
        &data.truth.points,
    )?;
    write_atomic(&path, svg.as_bytes())?;
    written.push(path);

    let path = dir.join("trace.svg");
    let svg = figures::trace_figure(&summary.potential_trace, summary.trace_stride)?;
    write_atomic(&path, svg.as_bytes())?;
    written.push(path);

    Ok(written)
}

/// Re-renders the three figures from a persisted summary (`scatter plot`).
pub fn regenerate_figures(summary_path: &Path) -> Result<Vec<PathBuf>> {
    let summary = SummaryFile::read(summary_path)?;
    let dir = summary_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    let data_ref = PathBuf::from(&summary.data_file);
    let data_path = if data_ref.is_absolute() {
        data_ref
    } else {
        dir.join(data_ref)
    };
    let data = DataFile::read(&data_path)?;
    write_figures(&summary, &data, &dir)
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
