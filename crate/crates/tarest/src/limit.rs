//! The limiting likelihood-ratio process and its Bayes functional.
//!
//! At rate `n`, the local likelihood ratio of a threshold model converges to
//! a two-sided compound Poisson process: jumps arrive at the stationary
//! density's value at the threshold, `λ = φ(θ₀, θ₀)`, and each jump
//! multiplies `Z` by a density ratio of the innovation law shifted by the
//! regime gap `δ₀` — `f(ε + δ₀)/f(ε)` on the `u ≥ 0` side, `f(ε − δ₀)/f(ε)`
//! on the `u < 0` side. The scaled Bayes error `n(θ̃ₙ − θ₀)` converges in
//! law (with all moments) to
//!
//! ```text
//! ũ = ∫ u Z(u) du / ∫ Z(u) du,
//! ```
//!
//! and `E ũ²` is the minimax risk bound no estimator sequence can beat.
//!
//! `Z` is piecewise constant between jumps, so both integrals are finite
//! rectangle sums — evaluated exactly, no quadrature. The only approximation
//! anywhere is the truncation window `[−U, U]`, grown by doubling until both
//! integrals stop moving; log-density ratios have negative mean (Jensen), so
//! `Z` decays geometrically in the jump count and the doubling terminates.

use crate::model::{InvariantDensity, TarModel};
use crate::noise::NoiseModel;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Initial truncation window, in units of the mean inter-jump distance.
const INITIAL_WINDOW_JUMPS: f64 = 20.0;
/// Hard cap on the window, same units; reaching it without convergence is an
/// error rather than a silent result.
const MAX_WINDOW_JUMPS: f64 = 1e5;

/// Parameters of the limit process: innovation law, regime gap at the
/// threshold, and jump intensity.
#[derive(Debug, Clone)]
pub struct LimitLaw {
    noise: NoiseModel,
    delta0: f64,
    lambda: f64,
}

impl LimitLaw {
    /// Build a law from explicit parameters. The gap must be nonzero — a
    /// zero gap means the two regimes agree at the threshold and the
    /// rate-`n` asymptotics collapse.
    pub fn new(noise: NoiseModel, delta0: f64, lambda: f64) -> Result<LimitLaw> {
        if !delta0.is_finite() || delta0 == 0.0 {
            return Err(Error::InvalidInput(format!(
                "regime gap at the threshold must be finite and nonzero, got {delta0}"
            )));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "jump intensity must be positive and finite, got {lambda}"
            )));
        }
        Ok(LimitLaw {
            noise,
            delta0,
            lambda,
        })
    }

    /// Read the law off a model at its true threshold: the gap from the
    /// regime functions, the intensity from the stationary density solved by
    /// the model module (the single source of truth for `φ`).
    pub fn from_model(
        model: &TarModel,
        theta: &[f64],
        density: &InvariantDensity,
        box_index: usize,
    ) -> Result<LimitLaw> {
        model.validate_theta(theta)?;
        if box_index >= theta.len() {
            return Err(Error::InvalidInput(format!(
                "box index {box_index} out of range for {} thresholds",
                theta.len()
            )));
        }
        let theta_k = theta[box_index];
        let delta0 = model.regime_gap(box_index, theta_k)?;
        let lambda = crate::model::intensity_at_threshold(density, theta_k)?;
        LimitLaw::new(model.noise().clone(), delta0, lambda)
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// One realization of the truncated limit process, with its functionals.
///
/// Jump times on each side are stored as positive distances from the origin;
/// the negative side lives at `u = −time`. `Z` is right-continuous in that
/// distance: the jump at time `τ` is already in force at `τ` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProcessDraw {
    pub pos_jump_times: Vec<f64>,
    pub pos_log_jumps: Vec<f64>,
    pub neg_jump_times: Vec<f64>,
    pub neg_log_jumps: Vec<f64>,
    /// Final half-width `U` of the window `[−U, U]`.
    pub truncation_u: f64,
    /// `∫ u Z(u) du / ∫ Z(u) du` over the window.
    pub u_tilde: f64,
    /// `∫ Z(u) du` over the window (always positive).
    pub integral_z: f64,
    /// `∫ u Z(u) du` over the window.
    pub weighted_integral: f64,
    /// How many window doublings the draw needed.
    pub doublings: u32,
}

impl LimitProcessDraw {
    /// Assemble a draw from explicit jump data and integrate it exactly.
    /// Times must be strictly increasing in `(0, truncation_u]` per side.
    pub fn from_jumps(
        pos_jump_times: Vec<f64>,
        pos_log_jumps: Vec<f64>,
        neg_jump_times: Vec<f64>,
        neg_log_jumps: Vec<f64>,
        truncation_u: f64,
    ) -> Result<LimitProcessDraw> {
        if !truncation_u.is_finite() || truncation_u <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "truncation window must be positive, got {truncation_u}"
            )));
        }
        check_side(&pos_jump_times, &pos_log_jumps, truncation_u, "positive")?;
        check_side(&neg_jump_times, &neg_log_jumps, truncation_u, "negative")?;
        let mut draw = LimitProcessDraw {
            pos_jump_times,
            pos_log_jumps,
            neg_jump_times,
            neg_log_jumps,
            truncation_u,
            u_tilde: 0.0,
            integral_z: 0.0,
            weighted_integral: 0.0,
            doublings: 0,
        };
        draw.integrate()?;
        Ok(draw)
    }

    /// `ln Z(u)` for `u ∈ [−U, U]`, by counting the jumps in force at `u`.
    pub fn log_z_at(&self, u: f64) -> Result<f64> {
        if !u.is_finite() || u.abs() > self.truncation_u {
            return Err(Error::InvalidInput(format!(
                "u = {u} is outside the simulated window [−{0}, {0}]",
                self.truncation_u
            )));
        }
        let (times, jumps) = if u >= 0.0 {
            (&self.pos_jump_times, &self.pos_log_jumps)
        } else {
            (&self.neg_jump_times, &self.neg_log_jumps)
        };
        let k = times.partition_point(|&t| t <= u.abs());
        Ok(jumps[..k].iter().sum())
    }

    /// Recompute `integral_z`, `weighted_integral`, and `u_tilde` from the
    /// stored jumps over `[−truncation_u, truncation_u]`, exactly.
    fn integrate(&mut self) -> Result<()> {
        let (mass_pos, wt_pos) =
            side_rectangles(&self.pos_jump_times, &self.pos_log_jumps, self.truncation_u);
        let (mass_neg, wt_neg) =
            side_rectangles(&self.neg_jump_times, &self.neg_log_jumps, self.truncation_u);
        let mass = mass_pos + mass_neg;
        let weighted = wt_pos - wt_neg;
        if !mass.is_finite() || !weighted.is_finite() {
            return Err(Error::InvalidInput(
                "limit-process integrals overflowed; jump levels are too extreme".into(),
            ));
        }
        self.integral_z = mass;
        self.weighted_integral = weighted;
        self.u_tilde = weighted / mass;
        Ok(())
    }
}

fn check_side(times: &[f64], jumps: &[f64], window: f64, side: &str) -> Result<()> {
    if times.len() != jumps.len() {
        return Err(Error::InvalidInput(format!(
            "{side} side has {} times but {} jumps",
            times.len(),
            jumps.len()
        )));
    }
    for (i, &t) in times.iter().enumerate() {
        if !t.is_finite() || t <= 0.0 || t > window {
            return Err(Error::InvalidInput(format!(
                "{side} jump time {t} at index {i} is outside (0, {window}]"
            )));
        }
        if i > 0 && times[i - 1] >= t {
            return Err(Error::InvalidInput(format!(
                "{side} jump times must be strictly increasing, got {} then {t}",
                times[i - 1]
            )));
        }
    }
    if let Some(&j) = jumps.iter().find(|j| !j.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{side} side has a non-finite log-jump {j}"
        )));
    }
    Ok(())
}

/// Exact `(∫ Z ds, ∫ s Z ds)` over `[0, window]` for one side, summing one
/// rectangle per constancy interval.
fn side_rectangles(times: &[f64], jumps: &[f64], window: f64) -> (f64, f64) {
    let mut mass = 0.0;
    let mut weighted = 0.0;
    let mut log_level = 0.0_f64;
    let mut prev = 0.0;
    for (&t, &j) in times.iter().zip(jumps) {
        let z = log_level.exp();
        mass += z * (t - prev);
        weighted += z * 0.5 * (t * t - prev * prev);
        log_level += j;
        prev = t;
    }
    let z = log_level.exp();
    mass += z * (window - prev);
    weighted += z * 0.5 * (window * window - prev * prev);
    (mass, weighted)
}

/// Sequential jump generator for one side: inter-arrival times are
/// exponential with the law's intensity, and the first arrival past the
/// current window is kept pending so widening the window never re-rolls
/// history.
struct SideSampler {
    times: Vec<f64>,
    jumps: Vec<f64>,
    pending_time: f64,
    pending_jump: f64,
}

impl SideSampler {
    fn new<R: Rng + ?Sized>(law: &LimitLaw, gap: f64, spacing: Exp<f64>, rng: &mut R) -> Result<Self> {
        let mut s = SideSampler {
            times: Vec::new(),
            jumps: Vec::new(),
            pending_time: 0.0,
            pending_jump: 0.0,
        };
        s.roll_pending(law, gap, spacing, rng)?;
        Ok(s)
    }

    fn roll_pending<R: Rng + ?Sized>(
        &mut self,
        law: &LimitLaw,
        gap: f64,
        spacing: Exp<f64>,
        rng: &mut R,
    ) -> Result<()> {
        self.pending_time += rng.sample(spacing);
        let eps = law.noise.sample_one(rng);
        self.pending_jump = law.noise.log_jump(eps, gap)?;
        Ok(())
    }

    fn extend_to<R: Rng + ?Sized>(
        &mut self,
        window: f64,
        law: &LimitLaw,
        gap: f64,
        spacing: Exp<f64>,
        rng: &mut R,
    ) -> Result<()> {
        while self.pending_time <= window {
            self.times.push(self.pending_time);
            self.jumps.push(self.pending_jump);
            self.roll_pending(law, gap, spacing, rng)?;
        }
        Ok(())
    }
}

/// Draw one realization of the limit process and its functionals.
///
/// The window starts at 20 mean inter-jump distances per side and doubles
/// until the last doubling moved `∫Z` by less than `tol` relative and moved
/// `∫uZ` by less than `tol` relative to `max(|∫uZ|, ∫Z)` — the second
/// denominator guards the near-symmetric draws where `∫uZ` is close to 0.
pub fn sample_limit_draw<R: Rng + ?Sized>(
    law: &LimitLaw,
    tol: f64,
    rng: &mut R,
) -> Result<LimitProcessDraw> {
    if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "truncation tolerance must be in (0, 1), got {tol}"
        )));
    }
    let spacing = Exp::new(law.lambda).expect("validated positive intensity");
    let mut pos = SideSampler::new(law, law.delta0, spacing, rng)?;
    let mut neg = SideSampler::new(law, -law.delta0, spacing, rng)?;

    let cap = MAX_WINDOW_JUMPS / law.lambda;
    let mut window = INITIAL_WINDOW_JUMPS / law.lambda;
    pos.extend_to(window, law, law.delta0, spacing, rng)?;
    neg.extend_to(window, law, -law.delta0, spacing, rng)?;
    let integrals = |pos: &SideSampler, neg: &SideSampler, window: f64| {
        let (mz, mw) = side_rectangles(&pos.times, &pos.jumps, window);
        let (nz, nw) = side_rectangles(&neg.times, &neg.jumps, window);
        (mz + nz, mw - nw)
    };
    let (mut mass, mut weighted) = integrals(&pos, &neg, window);

    let mut doublings = 0u32;
    loop {
        let next = (2.0 * window).min(cap);
        pos.extend_to(next, law, law.delta0, spacing, rng)?;
        neg.extend_to(next, law, -law.delta0, spacing, rng)?;
        let (new_mass, new_weighted) = integrals(&pos, &neg, next);
        doublings += 1;
        let rel_mass = (new_mass - mass).abs() / new_mass;
        let rel_weighted = (new_weighted - weighted).abs() / new_weighted.abs().max(new_mass);
        window = next;
        mass = new_mass;
        weighted = new_weighted;
        if rel_mass < tol && rel_weighted < tol {
            break;
        }
        if window >= cap {
            return Err(Error::Truncation {
                achieved: rel_mass.max(rel_weighted),
                tol,
                window,
            });
        }
    }

    let mut draw = LimitProcessDraw {
        pos_jump_times: pos.times,
        pos_log_jumps: pos.jumps,
        neg_jump_times: neg.times,
        neg_log_jumps: neg.jumps,
        truncation_u: window,
        u_tilde: 0.0,
        integral_z: 0.0,
        weighted_integral: 0.0,
        doublings,
    };
    draw.integrate()?;
    Ok(draw)
}

/// An i.i.d. sample of the limit functional `ũ`.
pub fn limit_sample<R: Rng + ?Sized>(
    law: &LimitLaw,
    draws: usize,
    tol: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if draws == 0 {
        return Err(Error::Contract("limit_sample needs at least one draw".into()));
    }
    let mut out = Vec::with_capacity(draws);
    for _ in 0..draws {
        out.push(sample_limit_draw(law, tol, rng)?.u_tilde);
    }
    Ok(out)
}

/// Monte Carlo estimate of a moment of the limit law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskBound {
    /// Estimated `E|ũ|^p`.
    pub estimate: f64,
    /// Standard error of the estimate.
    pub std_error: f64,
}

/// Estimate `E|ũ|^p`; `p = 2` is the minimax bound on `n²·MSE` that no
/// estimator sequence can beat.
pub fn risk_bound<R: Rng + ?Sized>(
    law: &LimitLaw,
    p: f64,
    draws: usize,
    tol: f64,
    rng: &mut R,
) -> Result<RiskBound> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidInput(format!(
            "moment order must be a nonnegative real, got {p}"
        )));
    }
    if draws < 100 {
        return Err(Error::Contract(format!(
            "risk bound needs at least 100 draws, got {draws}"
        )));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..draws {
        let u = sample_limit_draw(law, tol, rng)?.u_tilde;
        let x = u.abs().powf(p);
        sum += x;
        sum_sq += x * x;
    }
    let estimate = sum / draws as f64;
    let var = (sum_sq / draws as f64 - estimate * estimate).max(0.0);
    Ok(RiskBound {
        estimate,
        std_error: (var / draws as f64).sqrt(),
    })
}

/// Metadata describing how a limit sample was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSampleMeta {
    pub lambda: f64,
    pub delta0: f64,
    pub tol: f64,
    pub draws: usize,
    pub seed: u64,
}

/// Write a limit sample as plain text, one `ũ` per line, in full precision
/// (the shortest representation that round-trips each value bit-exactly).
pub fn write_limit_sample<W: Write>(values: &[f64], mut out: W) -> Result<()> {
    let write = |out: &mut W| -> std::io::Result<()> {
        for v in values {
            writeln!(out, "{v}")?;
        }
        Ok(())
    };
    write(&mut out).map_err(|e| Error::io("writing limit sample", e))
}

/// Read a limit sample written by [`write_limit_sample`].
pub fn read_limit_sample<R: BufRead>(input: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("reading limit sample", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|_| {
            Error::InvalidInput(format!("limit sample line {}: not a number: {trimmed:?}", i + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}
