//! Experiment configuration: a strict TOML schema shared by the CLI and the
//! Monte Carlo runner.
//!
//! A config names the model (regime sources and threshold boxes), the
//! innovation law, the prior, and the experiment parameters. Unknown keys
//! are rejected rather than ignored — a typo in `replications` should fail
//! loudly, not silently run the default. A minimal file:
//!
//! ```toml
//! [model]
//! regimes = ["0.5*x", "-0.5*x"]
//! theta_boxes = [[0.1, 0.9]]
//!
//! [noise]
//! family = "gaussian"
//! sigma = 1.0
//!
//! [experiment]
//! theta_true = 0.5
//! master_seed = 20260822
//! ```
//!
//! Everything else (prior, sample sizes, replication counts, truncation
//! tolerance, burn-in, parallelism) has defaults sized so a full run
//! finishes in minutes on a laptop.

use crate::estimators::Prior;
use crate::model::TarModel;
use crate::noise::{NoiseFamily, NoiseModel};
use crate::{Error, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Top-level configuration, one block per concern.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub prior: PriorConfig,
    pub experiment: ExperimentBlock,
}

/// `[model]`: regime function sources (lowest regime first) and the open
/// search box for each threshold.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub regimes: Vec<String>,
    pub theta_boxes: Vec<(f64, f64)>,
}

/// `[noise]`: innovation family and scale.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub family: NoiseFamily,
    pub sigma: f64,
}

/// `[prior]`: prior density for each threshold, uniform unless tabulated.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "kind")]
pub enum PriorConfig {
    #[default]
    Uniform,
    /// Piecewise-linear density through `(knots, values)`; single-threshold
    /// models only, since one table cannot cover several disjoint boxes.
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

/// `[experiment]`: what to run and how.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    /// True threshold(s) for simulation-based runs; omit when estimating an
    /// externally supplied series.
    pub theta_true: Option<ThetaSpec>,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_limit_draws")]
    pub limit_draws: usize,
    /// Root seed every stream in the run is derived from. Required: derived
    /// randomness should never depend on an implicit default.
    pub master_seed: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_truncation_tol")]
    pub truncation_tol: f64,
    /// Output directory; the CLI `--out` flag overrides it.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for replication-parallel stages; 0 means all cores.
    /// Results are bit-identical whatever the value.
    #[serde(default)]
    pub jobs: usize,
    /// Run even when the model-condition check reports a failure.
    #[serde(default)]
    pub force: bool,
}

/// One threshold as a bare number, or several as an array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl ThetaSpec {
    pub fn as_vec(&self) -> Vec<f64> {
        match self {
            ThetaSpec::Scalar(x) => vec![*x],
            ThetaSpec::Vector(v) => v.clone(),
        }
    }
}

fn default_n_list() -> Vec<usize> {
    vec![500, 1000, 2000]
}

fn default_replications() -> usize {
    1000
}

fn default_limit_draws() -> usize {
    10_000
}

fn default_burn_in() -> usize {
    200
}

fn default_truncation_tol() -> f64 {
    1e-6
}

impl ExperimentConfig {
    /// Parse a config from TOML text.
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Read and parse a config file.
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        ExperimentConfig::from_toml_str(&text)
    }

    /// Build the noise model from the `[noise]` block.
    pub fn build_noise(&self) -> Result<NoiseModel> {
        match self.noise.family {
            NoiseFamily::Gaussian => NoiseModel::gaussian(self.noise.sigma),
            NoiseFamily::Laplace => NoiseModel::laplace(self.noise.sigma),
        }
    }

    /// Build the threshold model from the `[model]` and `[noise]` blocks.
    pub fn build_model(&self) -> Result<TarModel> {
        let sources: Vec<&str> = self.model.regimes.iter().map(String::as_str).collect();
        TarModel::from_sources(&sources, self.model.theta_boxes.clone(), self.build_noise()?)
    }

    /// Build one prior per threshold box from the `[prior]` block.
    pub fn build_priors(&self, model: &TarModel) -> Result<Vec<Prior>> {
        match &self.prior {
            PriorConfig::Uniform => model.boxes().iter().map(|&b| Prior::uniform(b)).collect(),
            PriorConfig::Tabulated { knots, values } => {
                if model.boxes().len() != 1 {
                    return Err(Error::Config(format!(
                        "a tabulated prior covers one threshold box, but the model has {}",
                        model.boxes().len()
                    )));
                }
                Ok(vec![Prior::tabulated(
                    model.boxes()[0],
                    knots.clone(),
                    values.clone(),
                )?])
            }
        }
    }

    /// The true threshold vector, or a config error pointing at the missing
    /// field when the operation needs one.
    pub fn theta_true_vec(&self) -> Result<Vec<f64>> {
        self.experiment
            .theta_true
            .as_ref()
            .map(ThetaSpec::as_vec)
            .ok_or_else(|| {
                Error::Config("[experiment] theta_true is required for this operation".into())
            })
    }

    /// Check every cross-field invariant; a config that validates can be
    /// handed to any library entry point without further schema errors.
    pub fn validate(&self) -> Result<()> {
        let model = self.build_model()?;
        self.build_priors(&model)?;
        if let Some(theta) = &self.experiment.theta_true {
            model.validate_theta(&theta.as_vec())?;
        }
        let e = &self.experiment;
        if e.n_list.is_empty() {
            return Err(Error::Config("[experiment] n_list must be nonempty".into()));
        }
        for w in e.n_list.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Config(format!(
                    "[experiment] n_list must be strictly ascending, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if e.n_list[0] == 0 {
            return Err(Error::Config("[experiment] sample sizes must be positive".into()));
        }
        if e.replications == 0 {
            return Err(Error::Config("[experiment] replications must be at least 1".into()));
        }
        if e.limit_draws == 0 {
            return Err(Error::Config("[experiment] limit_draws must be at least 1".into()));
        }
        if !e.truncation_tol.is_finite() || e.truncation_tol <= 0.0 || e.truncation_tol >= 1.0 {
            return Err(Error::Config(format!(
                "[experiment] truncation_tol must be in (0, 1), got {}",
                e.truncation_tol
            )));
        }
        Ok(())
    }
}
