//! Threshold estimators computed from a likelihood profile.
//!
//! Both estimators consume only the [`LikelihoodProfile`] — never the raw
//! series — because the likelihood is constant between breakpoints:
//!
//! * the posterior-mean (Bayes) estimator integrates `θ ↦ p(θ)L(θ)` exactly
//!   interval by interval, `θ̃ = Σ_i A_i e^{ℓ_i−ℓ*} / Σ_i B_i e^{ℓ_i−ℓ*}`
//!   with `B_i = ∫_{I_i} p`, `A_i = ∫_{I_i} θ p`, and the max level `ℓ*`
//!   factored out so nothing underflows;
//! * the maximum-likelihood estimator is the interval with the highest
//!   level; since every interior point of that interval is an argmax, the
//!   midpoint is reported alongside the interval itself.
//!
//! With several thresholds the log-likelihood separates across boxes up to a
//! term free of the thresholds — a sample inside box `k` changes regime only
//! when coordinate `k` crosses it — so [`multi_threshold_estimate`] runs the
//! one-dimensional machinery per box and is exactly the joint estimator.

use crate::likelihood::{build_profile, LikelihoodProfile};
use crate::model::{TarModel, Trajectory};
use crate::quad::GaussLegendre;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Nodes for the per-interval moments of a tabulated prior. Intervals sit
/// between adjacent order statistics, so a low fixed order is plenty; the
/// choice is validated against dense-grid oracles in the tests.
const PRIOR_QUAD_NODES: usize = 8;

/// A prior density for one threshold coordinate, supported on its box.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    support: (f64, f64),
    kind: PriorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum PriorKind {
    Uniform,
    /// Piecewise-linear interpolation of `values` at `knots`; stored values
    /// are pre-divided by the integral over the support, so the density is
    /// normalized by construction.
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

impl Prior {
    /// The uniform density on `(alpha, beta)`.
    pub fn uniform(support: (f64, f64)) -> Result<Prior> {
        check_support(support)?;
        Ok(Prior {
            support,
            kind: PriorKind::Uniform,
        })
    }

    /// A piecewise-linear density through `(knots, values)`, normalized over
    /// `support`. The knot range must cover the support and the tabulated
    /// values must be strictly positive, so the density is positive and
    /// continuous where the likelihood lives.
    pub fn tabulated(support: (f64, f64), knots: Vec<f64>, values: Vec<f64>) -> Result<Prior> {
        check_support(support)?;
        if knots.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "tabulated prior needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        if knots.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} knots with {} values",
                knots.len(),
                values.len()
            )));
        }
        for (i, &k) in knots.iter().enumerate() {
            if !k.is_finite() {
                return Err(Error::InvalidInput(format!("knot {i} is not finite")));
            }
            if i > 0 && knots[i - 1] >= k {
                return Err(Error::InvalidInput(format!(
                    "knots must be strictly increasing, got {} then {k}",
                    knots[i - 1]
                )));
            }
        }
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v <= 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "tabulated prior values must be positive and finite, got {v} at index {i}"
            )));
        }
        let (alpha, beta) = support;
        if knots[0] > alpha || *knots.last().unwrap() < beta {
            return Err(Error::InvalidInput(format!(
                "knot range [{}, {}] does not cover the support ({alpha}, {beta})",
                knots[0],
                knots.last().unwrap()
            )));
        }
        let mut prior = Prior {
            support,
            kind: PriorKind::Tabulated { knots, values },
        };
        // Normalize exactly: the density is piecewise linear, so clipped
        // trapezoids integrate it without error.
        let mass = prior.exact_mass(alpha, beta);
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "tabulated prior has non-positive mass {mass} over its support"
            )));
        }
        if let PriorKind::Tabulated { values, .. } = &mut prior.kind {
            for v in values {
                *v /= mass;
            }
        }
        Ok(prior)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Normalized density at `theta`; zero outside the support.
    pub fn density(&self, theta: f64) -> f64 {
        let (alpha, beta) = self.support;
        if !(alpha < theta && theta < beta) {
            return 0.0;
        }
        match &self.kind {
            PriorKind::Uniform => 1.0 / (beta - alpha),
            PriorKind::Tabulated { knots, values } => {
                let i = knots.partition_point(|&k| k < theta).clamp(1, knots.len() - 1);
                let (k0, k1) = (knots[i - 1], knots[i]);
                let t = (theta - k0) / (k1 - k0);
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    /// `(∫ p, ∫ θ p)` over `(a, b) ⊆ support`. Uniform priors use the closed
    /// form; tabulated priors use fixed low-order Gauss–Legendre.
    fn moments(&self, a: f64, b: f64, rule: &GaussLegendre) -> (f64, f64) {
        match &self.kind {
            PriorKind::Uniform => {
                let (alpha, beta) = self.support;
                let width = beta - alpha;
                ((b - a) / width, 0.5 * (a + b) * (b - a) / width)
            }
            PriorKind::Tabulated { .. } => (
                rule.integrate(a, b, |t| self.density(t)),
                rule.integrate(a, b, |t| t * self.density(t)),
            ),
        }
    }

    /// Exact integral of the unnormalized tabulated density over `[a, b]`
    /// (trapezoids on knot segments clipped to the range).
    fn exact_mass(&self, a: f64, b: f64) -> f64 {
        let PriorKind::Tabulated { knots, values } = &self.kind else {
            return 1.0;
        };
        let interp = |x: f64| {
            let i = knots.partition_point(|&k| k < x).clamp(1, knots.len() - 1);
            let t = (x - knots[i - 1]) / (knots[i] - knots[i - 1]);
            values[i - 1] + t * (values[i] - values[i - 1])
        };
        let mut mass = 0.0;
        for i in 0..knots.len() - 1 {
            let lo = knots[i].max(a);
            let hi = knots[i + 1].min(b);
            if lo < hi {
                mass += 0.5 * (interp(lo) + interp(hi)) * (hi - lo);
            }
        }
        mass
    }
}

fn check_support(support: (f64, f64)) -> Result<()> {
    let (alpha, beta) = support;
    if !alpha.is_finite() || !beta.is_finite() || alpha >= beta {
        return Err(Error::InvalidInput(format!(
            "prior support must be a finite nonempty interval, got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

/// Posterior-mean estimate together with the posterior it came from.
#[derive(Debug, Clone)]
pub struct BayesEstimate {
    /// The posterior mean `θ̃`, always strictly inside the box.
    pub theta: f64,
    /// Log posterior mass of each profile interval; the exponentials sum to 1.
    pub posterior_log_masses: Vec<f64>,
    /// Log of the denominator `∫ p(θ)L(θ)dθ` (marginal likelihood up to the
    /// constant factor dropped from the profile).
    pub normalizer: f64,
    /// True when the profile had no breakpoints, in which case `theta` is
    /// just the prior mean.
    pub degenerate: bool,
}

/// Maximizing interval of the profile with its reported midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct MlEstimate {
    /// Midpoint of the maximizing interval.
    pub theta: f64,
    /// The maximizing interval `(left, right]` itself — every interior point
    /// attains the maximum.
    pub interval: (f64, f64),
    /// Index of that interval in the profile.
    pub interval_index: usize,
}

/// Shared exact-integration core: posterior interval masses, their
/// normalizer, and the posterior first moment. Both the Bayes point estimate
/// and the density export read from this, so they can never disagree.
struct PosteriorCore {
    log_masses: Vec<f64>,
    normalizer: f64,
    mean: f64,
}

fn posterior_core(profile: &LikelihoodProfile, prior: &Prior) -> Result<PosteriorCore> {
    if prior.support() != profile.box_bounds() {
        let (pa, pb) = prior.support();
        let (ba, bb) = profile.box_bounds();
        return Err(Error::Contract(format!(
            "prior support ({pa}, {pb}) does not match the profile box ({ba}, {bb})"
        )));
    }
    let rule = GaussLegendre::new(PRIOR_QUAD_NODES);
    let m = profile.interval_count();
    let mut masses = Vec::with_capacity(m);
    let mut moments = Vec::with_capacity(m);
    for i in 0..m {
        let (l, r) = profile.interval_bounds(i).expect("index in range");
        let (mass, moment) = prior.moments(l, r, &rule);
        masses.push(mass);
        moments.push(moment);
    }
    let levels = profile.values();
    let max_level = levels
        .iter()
        .zip(&masses)
        .filter(|(_, &b)| b > 0.0)
        .map(|(&l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max_level.is_finite() {
        return Err(Error::InvalidInput(
            "prior assigns no mass to any profile interval".into(),
        ));
    }
    let mut den = 0.0;
    let mut num = 0.0;
    for i in 0..m {
        let w = masses[i] * (levels[i] - max_level).exp();
        den += w;
        num += moments[i] * (levels[i] - max_level).exp();
    }
    let log_den = den.ln();
    let log_masses = (0..m)
        .map(|i| masses[i].ln() + (levels[i] - max_level) - log_den)
        .collect();
    Ok(PosteriorCore {
        log_masses,
        normalizer: max_level + log_den,
        mean: num / den,
    })
}

/// Posterior mean of the threshold under `prior`.
///
/// A degenerate profile (no sample in the box) carries no information, so
/// the result falls back to the prior mean and says so via the flag.
pub fn bayes_estimate(profile: &LikelihoodProfile, prior: &Prior) -> Result<BayesEstimate> {
    let core = posterior_core(profile, prior)?;
    Ok(BayesEstimate {
        theta: core.mean,
        posterior_log_masses: core.log_masses,
        normalizer: core.normalizer,
        degenerate: profile.is_degenerate(),
    })
}

/// Highest-likelihood interval, ties broken toward smaller thresholds.
pub fn ml_estimate(profile: &LikelihoodProfile) -> Result<MlEstimate> {
    if profile.is_degenerate() {
        return Err(Error::Contract(
            "no sample fell inside the threshold box, so every threshold is a maximizer".into(),
        ));
    }
    let mut best = 0usize;
    for (i, &v) in profile.values().iter().enumerate() {
        if v > profile.values()[best] {
            best = i;
        }
    }
    let interval = profile.interval_bounds(best).expect("index in range");
    Ok(MlEstimate {
        theta: 0.5 * (interval.0 + interval.1),
        interval,
        interval_index: best,
    })
}

/// The posterior as an exportable piecewise-constant density over the box.
#[derive(Debug, Clone)]
pub struct PosteriorDensity {
    edges: Vec<f64>,
    masses: Vec<f64>,
    densities: Vec<f64>,
    mean: f64,
}

impl PosteriorDensity {
    /// Interval edges, `interval_count() + 1` of them, spanning the box.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Posterior probability of each interval; sums to 1.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Average density on each interval (mass over length).
    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    /// Posterior mean — computed from the same interval integrals as
    /// [`bayes_estimate`], hence identical to it.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn interval_count(&self) -> usize {
        self.masses.len()
    }
}

/// Normalized posterior density of the threshold under `prior`.
pub fn posterior_density(profile: &LikelihoodProfile, prior: &Prior) -> Result<PosteriorDensity> {
    let core = posterior_core(profile, prior)?;
    let m = profile.interval_count();
    let mut edges = Vec::with_capacity(m + 1);
    edges.push(profile.box_bounds().0);
    edges.extend_from_slice(profile.breakpoints());
    edges.push(profile.box_bounds().1);
    let masses: Vec<f64> = core.log_masses.iter().map(|lm| lm.exp()).collect();
    let densities = (0..m)
        .map(|i| masses[i] / (edges[i + 1] - edges[i]))
        .collect();
    Ok(PosteriorDensity {
        edges,
        masses,
        densities,
        mean: core.mean,
    })
}

/// Write a posterior as CSV rows `(interval_left, interval_right, density)`.
pub fn write_posterior_csv<W: Write>(posterior: &PosteriorDensity, mut out: W) -> Result<()> {
    let write = |out: &mut W| -> std::io::Result<()> {
        writeln!(out, "interval_left,interval_right,density")?;
        for i in 0..posterior.interval_count() {
            writeln!(
                out,
                "{},{},{}",
                posterior.edges[i],
                posterior.edges[i + 1],
                posterior.densities[i]
            )?;
        }
        Ok(())
    };
    write(&mut out).map_err(|e| Error::io("writing posterior CSV", e))
}

/// Estimates for one threshold coordinate of a multi-threshold model.
#[derive(Debug, Clone)]
pub struct CoordinateEstimate {
    pub box_index: usize,
    pub bayes: BayesEstimate,
    /// `None` when no sample fell in this coordinate's box.
    pub ml: Option<MlEstimate>,
}

/// Estimate every threshold coordinate from one series.
///
/// The log-likelihood splits as a sum of per-box step functions plus a term
/// free of all thresholds, so profiling and estimating coordinate-wise *is*
/// the joint estimator — no K-dimensional grid is ever needed. One prior per
/// box, each supported on its box.
pub fn multi_threshold_estimate(
    model: &TarModel,
    traj: &Trajectory,
    priors: &[Prior],
) -> Result<Vec<CoordinateEstimate>> {
    if priors.len() != model.boxes().len() {
        return Err(Error::Contract(format!(
            "{} priors for {} threshold boxes",
            priors.len(),
            model.boxes().len()
        )));
    }
    let mut out = Vec::with_capacity(priors.len());
    for (k, prior) in priors.iter().enumerate() {
        let profile = build_profile(model, traj, k)?;
        let bayes = bayes_estimate(&profile, prior)?;
        let ml = if profile.is_degenerate() {
            None
        } else {
            Some(ml_estimate(&profile)?)
        };
        out.push(CoordinateEstimate {
            box_index: k,
            bayes,
            ml,
        });
    }
    Ok(out)
}

/// The JSON record a single-series estimation run exports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub bayes: f64,
    pub ml: f64,
    pub ml_interval: (f64, f64),
    pub n: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_true: Option<f64>,
}

/// Serialize an [`EstimateRecord`] as pretty JSON.
pub fn write_estimate_json<W: Write>(record: &EstimateRecord, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, record)
        .map_err(|e| Error::InvalidInput(format!("serializing estimate record: {e}")))?;
    writeln!(out).map_err(|e| Error::io("writing estimate record", e))
}
