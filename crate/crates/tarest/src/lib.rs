//! Threshold autoregression: simulation, likelihood analysis, Bayes and
//! maximum-likelihood threshold estimation, and the compound-Poisson limit law
//! that governs threshold estimators at rate `n`.
//!
//! A threshold autoregression (TAR) switches its regression function whenever
//! the previous observation crosses an unknown threshold `θ`:
//!
//! ```text
//! X[j+1] = h(X[j])·1{X[j] < θ}  +  g(X[j])·1{X[j] ≥ θ}  +  ε[j+1]
//! ```
//!
//! with i.i.d. noise `ε` and (possibly nonlinear) regimes `h` and `g`. Because
//! the indicator is discontinuous in `θ`, the likelihood is piecewise constant
//! in the threshold, estimation is singular, and the error of the Bayes or
//! maximum-likelihood estimator shrinks at rate `n` instead of the familiar
//! `√n`. The scaled error `n(θ̂ − θ)` converges to a functional of a two-sided
//! compound Poisson process whose jump law and intensity are explicit in the
//! noise density, the regime gap `δ = g − h` at the threshold, and the value of
//! the stationary density there.
//!
//! The crate covers the whole pipeline:
//!
//! * [`noise`] — built-in Gaussian/Laplace noise families with log-density,
//!   sampling, log likelihood-ratio jumps, and the divergence and Hellinger
//!   integrals that control the limit law;
//! * [`model`] — regime expressions parsed from strings, model assembly,
//!   simulation, the stationary density via a transfer-operator fixed point,
//!   and numeric checks of the standing assumptions;
//! * [`likelihood`] — exact piecewise-constant likelihood profiles in `O(n log n)`,
//!   likelihood ratios, and a martingale diagnostic of the simulator;
//! * [`estimators`] — posterior-mean (Bayes) and maximum-likelihood threshold
//!   estimators, posterior densities, and multi-threshold estimation;
//! * [`limit`] — exact sampling of the compound-Poisson limit variable and the
//!   minimax risk bound it induces;
//! * [`harness`] — seeded, reproducible Monte Carlo experiments comparing
//!   finite-`n` estimator errors against the limit law.
//!
//! # Quick start
//!
//! ```
//! use tarest::model::TarModel;
//! use tarest::noise::NoiseModel;
//! use tarest::likelihood::build_profile;
//! use tarest::estimators::{bayes_estimate, ml_estimate, Prior};
//! use tarest::streams;
//!
//! // Contracting two-regime model on the threshold box (0.1, 0.9).
//! let noise = NoiseModel::gaussian(1.0)?;
//! let model = TarModel::two_regime("0.5*x", "-0.5*x", (0.1, 0.9), noise)?;
//!
//! let mut rng = streams::substream(7, streams::Domain::Replication, 500, 0);
//! let traj = model.simulate(&[0.5], 500, 1_000, &mut rng)?;
//!
//! let profile = build_profile(&model, &traj, 0)?;
//! let prior = Prior::uniform((0.1, 0.9))?;
//! let bayes = bayes_estimate(&profile, &prior)?;
//! let ml = ml_estimate(&profile)?;
//! println!("posterior mean {:.4}, ML {:.4}", bayes.theta, ml.theta);
//! # Ok::<(), tarest::Error>(())
//! ```
//!
//! # Examples
//!
//! The `examples/` directory is the guided tour; each file is runnable with
//! `cargo run --release -p tarest --example <name>`:
//!
//! | example | shows |
//! |---|---|
//! | `simulate_trajectory` | building a model and simulating paths |
//! | `likelihood_profile` | the piecewise-constant likelihood in the threshold |
//! | `bayes_vs_ml` | both estimators on one series, with the posterior |
//! | `invariant_density` | stationary density and the crossing intensity `λ` |
//! | `limit_process` | sampling the compound-Poisson limit variable |
//! | `martingale_identity` | the unit-mean martingale diagnostic |
//! | `multi_threshold` | estimating several thresholds at once |
//! | `theorem_rate` | desk-scale Monte Carlo of the rate-`n` convergence |
//!
//! A thin CLI (`cargo run -p tarest --bin tarest -- --help`) exposes the same
//! pipeline for scripted use; see the repository README.

pub mod config;
pub mod estimators;
pub mod expr;
pub mod harness;
pub mod likelihood;
pub mod limit;
pub mod model;
pub mod noise;
pub mod quad;
pub mod streams;

/// Errors shared across the crate.
///
/// Variants distinguish bad input values, violated call contracts, numeric
/// non-convergence, and I/O so callers can branch on the failure class; the
/// CLI maps [`Error::kind`] into its machine-readable stderr record.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Expression text failed to parse; `position` is a byte offset into the source.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// An argument was outside the mathematical domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A call precondition was violated (sizes, orderings, missing data).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A simulated trajectory left the numerically representable range.
    #[error("trajectory diverged at step {step}: |x| = {value:e}")]
    Diverged { step: usize, value: f64 },

    /// An iterative solver stopped at its iteration cap before reaching tolerance.
    #[error("no convergence after {iterations} iterations: residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Adaptive truncation of the limit process hit its cap before the
    /// requested relative tolerance.
    #[error(
        "truncation failed: relative tail {achieved:e} above tolerance {tol:e} at window {window}"
    )]
    Truncation { achieved: f64, tol: f64, window: f64 },

    /// Configuration file problems (syntax or semantic).
    #[error("config: {0}")]
    Config(String),

    /// An I/O failure, tagged with what was being read or written.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    /// A failure inside one Monte Carlo replication, tagged with its coordinates.
    #[error("n={n} replication={rep}: {source}")]
    Replication {
        n: usize,
        rep: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable, machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::InvalidInput(_) => "invalid_input",
            Error::Contract(_) => "contract",
            Error::Diverged { .. } => "diverged",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Truncation { .. } => "truncation",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Replication { .. } => "replication",
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
