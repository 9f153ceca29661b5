//! TOML experiment configuration: parsing, defaults, and conversion into
//! the core solver/chain objects.
//!
//! Every field has a default, so a config can be as small as
//!
//! ```toml
//! [experiment]
//! obstacle = "peanut"
//! output_dir = "out/peanut"
//! ```
//!
//! Unknown keys are rejected (typos should fail loudly, not silently fall
//! back to defaults).

use crate::error::{CliError, Result};
use scatter::curve::{ErfMapParams, Obstacle, PeriodicGrid, PositivityMap};
use scatter::forward::FarFieldMap;
use scatter::mcmc::ChainConfig;
use scatter::prior::{KLPriorSpec, PriorSpec, SEPriorSpec, TVSpec};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

// ---------------------------------------------------------------------------
// sections
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub forward: ForwardSection,
    #[serde(default)]
    pub positivity: PositivitySection,
    #[serde(default)]
    pub prior: PriorSection,
    #[serde(default)]
    pub tv: TvSection,
    #[serde(default)]
    pub chain: ChainSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub obstacle: String,
    pub output_dir: PathBuf,
    /// Reuse counts from this file instead of synthesizing fresh ones.
    #[serde(default)]
    pub data_file: Option<PathBuf>,
    /// Seed for data synthesis (independent of the chain seed).
    #[serde(default = "default_data_seed")]
    pub data_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ForwardSection {
    pub k: f64,
    /// Coupling parameter; `None` uses η = k.
    pub eta: Option<f64>,
    /// Boundary quadrature nodes (even, ≥ 8); also the latent grid size.
    pub n_boundary: usize,
    /// Number of equispaced far-field detectors.
    pub n_obs: usize,
    /// Incident plane-wave directions (unit vectors).
    pub incident: Vec<[f64; 2]>,
    /// Exposure time τ scaling the Poisson intensities.
    pub tau: f64,
    /// Detector background shift e ≥ 0, broadcast to all detectors.
    pub shift: f64,
}

impl Default for ForwardSection {
    fn default() -> Self {
        Self {
            k: 1.0,
            eta: None,
            n_boundary: 128,
            n_obs: 64,
            incident: vec![[1.0, 0.0]],
            tau: 1000.0,
            shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PositivitySection {
    /// "erf" (bounded radii) or "exp" (unbounded).
    pub map: String,
    pub a: f64,
    pub b: f64,
}

impl Default for PositivitySection {
    fn default() -> Self {
        Self {
            map: "erf".to_string(),
            a: 2.0,
            b: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PriorSection {
    /// "se" (squared-exponential) or "kl" (Karhunen–Loève).
    pub kind: String,
    pub length_scale: f64,
    pub s: f64,
    pub n_modes: usize,
    pub mean_mode_std: f64,
}

impl Default for PriorSection {
    fn default() -> Self {
        Self {
            kind: "se".to_string(),
            length_scale: 0.5,
            s: 2.0,
            n_modes: 30,
            mean_mode_std: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TvSection {
    pub zeta: f64,
}

impl Default for TvSection {
    fn default() -> Self {
        Self { zeta: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub beta: f64,
    pub n_iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            // Tuned on the peanut benchmark at tau = 1000: ~30% acceptance.
            // Larger steps freeze the chain against this sharp likelihood.
            beta: 0.02,
            n_iters: 50_000,
            burn_in: 10_000,
            thin: 10,
            seed: 7,
        }
    }
}

fn default_data_seed() -> u64 {
    7
}

// ---------------------------------------------------------------------------
// loading, saving, defaults
// ---------------------------------------------------------------------------

impl ExperimentConfig {
    /// The stock configuration for a catalog obstacle.
    pub fn default_for(obstacle: Obstacle, output_dir: &Path) -> Self {
        Self {
            experiment: ExperimentSection {
                obstacle: obstacle.name().to_string(),
                output_dir: output_dir.to_path_buf(),
                data_file: None,
                data_seed: default_data_seed(),
            },
            forward: ForwardSection::default(),
            positivity: PositivitySection::default(),
            prior: PriorSection::default(),
            tv: TvSection::default(),
            chain: ChainSection::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("could not serialize config: {e}")))
    }

    /// Validates the configuration and assembles the solver and chain
    /// objects it describes.
    pub fn build(&self) -> Result<BuiltExperiment> {
        let obstacle = Obstacle::from_str(&self.experiment.obstacle)?;
        let f = &self.forward;
        let map = FarFieldMap::new(f.k, f.incident.clone(), f.n_obs, f.tau)?
            .with_eta(f.eta.unwrap_or(f.k))?
            .with_shift(vec![f.shift; f.n_obs])?;
        let grid = PeriodicGrid::new(f.n_boundary)?;

        let positivity = match self.positivity.map.as_str() {
            "exp" => PositivityMap::Exp,
            "erf" => PositivityMap::Erf(ErfMapParams::new(self.positivity.a, self.positivity.b)?),
            other => {
                return Err(CliError::Config(format!(
                    "unknown positivity map '{other}' (expected \"exp\" or \"erf\")"
                )))
            }
        };
        let prior = match self.prior.kind.as_str() {
            "se" => PriorSpec::Se(SEPriorSpec::new(self.prior.length_scale, grid.clone())?),
            "kl" => PriorSpec::Kl(KLPriorSpec::new(
                self.prior.s,
                self.prior.n_modes,
                self.prior.mean_mode_std,
            )?),
            other => {
                return Err(CliError::Config(format!(
                    "unknown prior kind '{other}' (expected \"se\" or \"kl\")"
                )))
            }
        };
        let tv = TVSpec::new(self.tv.zeta)?;
        let chain = ChainConfig {
            beta: self.chain.beta,
            n_iters: self.chain.n_iters,
            burn_in: self.chain.burn_in,
            thin: self.chain.thin,
            seed: self.chain.seed,
            grid,
            prior,
            positivity,
            tv,
        };
        chain.validate()?;
        Ok(BuiltExperiment {
            obstacle,
            map,
            chain,
        })
    }
}

/// The core objects an [`ExperimentConfig`] describes.
#[derive(Debug, Clone)]
pub struct BuiltExperiment {
    pub obstacle: Obstacle,
    pub map: FarFieldMap,
    pub chain: ChainConfig,
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
