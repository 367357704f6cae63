//! Likelihood of a threshold autoregression as a function of the threshold.
//!
//! Conditionally on `X[0]`, the log-likelihood of a path is
//!
//! ```text
//! ℓ(θ) = Σ_j ln f( X[j+1] − m(X[j], θ) )
//! ```
//!
//! (the marginal of `X[0]` does not depend on `θ` and is omitted throughout,
//! so values are comparable across `θ` but are not absolute path densities).
//! As `θ` sweeps its box, `m(X[j], θ)` only changes when `θ` passes a sample
//! value, so `ℓ` is a step function: constant on `(b_i, b_{i+1}]` between
//! consecutive in-box sample values, left-continuous at each breakpoint. A
//! [`LikelihoodProfile`] stores that step function exactly — one sorted pass
//! over the samples plus one direct evaluation, `O(n log n)` total — and is
//! the single input every estimator works from.
//!
//! [`martingale_check`] verifies the simulator and the jump functionals
//! against an exact identity: the half-log-likelihood-ratio over a shrinking
//! band above the threshold, once compensated by the Hellinger exponent of
//! the regime gap, has expectation exactly 1 at every sample size.

use crate::model::{TarModel, Trajectory};
use crate::{Error, Result};
use rand::Rng;
use std::io::Write;

/// The exact piecewise-constant log-likelihood in one threshold coordinate.
///
/// Levels are full log-likelihoods: for a multi-threshold model the other
/// coordinates are pinned at their box midpoints, which only shifts every
/// level by the same constant and so changes no estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodProfile {
    box_bounds: (f64, f64),
    box_index: usize,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    sample_size: usize,
    direct_evals: usize,
    crossing_evals: usize,
}

impl LikelihoodProfile {
    /// Assemble a profile from raw parts (used by tests and by callers that
    /// build steps analytically). `values` must have one more entry than
    /// `breakpoints`, and the breakpoints must be strictly increasing inside
    /// the open box.
    pub fn from_parts(
        box_bounds: (f64, f64),
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        sample_size: usize,
    ) -> Result<Self> {
        let (alpha, beta) = box_bounds;
        if !alpha.is_finite() || !beta.is_finite() || alpha >= beta {
            return Err(Error::InvalidInput(format!(
                "profile box must be a finite nonempty interval, got ({alpha}, {beta})"
            )));
        }
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints need {} interval values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        for (i, &b) in breakpoints.iter().enumerate() {
            if !(alpha < b && b < beta) {
                return Err(Error::InvalidInput(format!(
                    "breakpoint {i} at {b} is outside the open box ({alpha}, {beta})"
                )));
            }
            if i > 0 && breakpoints[i - 1] >= b {
                return Err(Error::InvalidInput(format!(
                    "breakpoints must be strictly increasing, got {} then {b}",
                    breakpoints[i - 1]
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "profile values must all be finite".into(),
            ));
        }
        if sample_size == 0 {
            return Err(Error::InvalidInput(
                "profile needs a positive sample size".into(),
            ));
        }
        Ok(LikelihoodProfile {
            box_bounds,
            box_index: 0,
            breakpoints,
            values,
            sample_size,
            direct_evals: 0,
            crossing_evals: 0,
        })
    }

    pub fn box_bounds(&self) -> (f64, f64) {
        self.box_bounds
    }

    /// Which threshold coordinate the profile sweeps.
    pub fn box_index(&self) -> usize {
        self.box_index
    }

    /// Sorted distinct in-box sample values where the likelihood steps.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Log-likelihood level on each interval, left to right.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interval_count(&self) -> usize {
        self.values.len()
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    /// True when no sample fell inside the box, so the likelihood carries no
    /// information about the threshold.
    pub fn is_degenerate(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// `(direct, crossing)` log-density evaluation counts from construction;
    /// the direct count is one per transition and the crossing count two per
    /// in-box sample, which keeps construction `O(n log n)` including the sort.
    pub fn evaluation_counts(&self) -> (usize, usize) {
        (self.direct_evals, self.crossing_evals)
    }

    /// Index of the interval containing `theta`; intervals are `(b_i, b_{i+1}]`,
    /// so a query exactly at a breakpoint lands in the interval ending there.
    pub fn interval_of(&self, theta: f64) -> Result<usize> {
        let (alpha, beta) = self.box_bounds;
        if !theta.is_finite() || theta <= alpha || theta >= beta {
            return Err(Error::InvalidInput(format!(
                "threshold {theta} is outside the open box ({alpha}, {beta})"
            )));
        }
        Ok(self.breakpoints.partition_point(|&b| b < theta))
    }

    /// Bounds of interval `i` as a subinterval of the box.
    pub fn interval_bounds(&self, i: usize) -> Result<(f64, f64)> {
        if i >= self.values.len() {
            return Err(Error::InvalidInput(format!(
                "interval index {i} out of range for {} intervals",
                self.values.len()
            )));
        }
        let left = if i == 0 {
            self.box_bounds.0
        } else {
            self.breakpoints[i - 1]
        };
        let right = if i == self.breakpoints.len() {
            self.box_bounds.1
        } else {
            self.breakpoints[i]
        };
        Ok((left, right))
    }

    /// Log-likelihood at `theta` by interval lookup.
    pub fn value_at(&self, theta: f64) -> Result<f64> {
        Ok(self.values[self.interval_of(theta)?])
    }
}

/// Direct log-likelihood `Σ ln f(X[j+1] − m(X[j], θ))`.
pub fn log_likelihood(model: &TarModel, theta: &[f64], traj: &Trajectory) -> Result<f64> {
    model.validate_theta(theta)?;
    sum_log_density(model, theta, &traj.values)
}

fn sum_log_density(model: &TarModel, theta: &[f64], values: &[f64]) -> Result<f64> {
    let noise = model.noise();
    let mut sum = 0.0;
    for j in 0..values.len() - 1 {
        let mean = model.mean_unchecked(values[j], theta);
        if !mean.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regime function evaluated to a non-finite value at x = {}",
                values[j]
            )));
        }
        sum += noise.log_density_raw(values[j + 1] - mean);
    }
    Ok(sum)
}

/// Build the exact likelihood profile for threshold coordinate `box_index`.
///
/// One direct evaluation anchors the leftmost interval; each further level
/// adds, for every sample tied at the next breakpoint `b`, the crossing term
/// `ln f(X[j+1] − h(b)) − ln f(X[j+1] − g(b))` where `h`/`g` are the regimes
/// below/above this threshold — exactly the change in the sample's residual
/// density as the threshold passes above it.
pub fn build_profile(
    model: &TarModel,
    traj: &Trajectory,
    box_index: usize,
) -> Result<LikelihoodProfile> {
    let boxes = model.boxes();
    if box_index >= boxes.len() {
        return Err(Error::InvalidInput(format!(
            "box index {box_index} out of range for {} boxes",
            boxes.len()
        )));
    }
    let (alpha, beta) = boxes[box_index];
    let n = traj.n();

    // Other coordinates sit at their box midpoints; only differences along
    // this coordinate matter downstream.
    let mut theta: Vec<f64> = boxes.iter().map(|&(a, b)| 0.5 * (a + b)).collect();

    // In-box regressor samples, sorted; ties grouped into one breakpoint.
    let mut in_box: Vec<(f64, usize)> = (0..n)
        .filter(|&j| alpha < traj.values[j] && traj.values[j] < beta)
        .map(|j| (traj.values[j], j))
        .collect();
    in_box.sort_by(|a, b| f64::total_cmp(&a.0, &b.0));

    let anchor = if in_box.is_empty() {
        0.5 * (alpha + beta)
    } else {
        0.5 * (alpha + in_box[0].0)
    };
    theta[box_index] = anchor;
    let base = sum_log_density(model, &theta, &traj.values)?;

    let lower = &model.regimes()[box_index];
    let upper = &model.regimes()[box_index + 1];
    let noise = model.noise();

    let mut breakpoints = Vec::new();
    let mut values = Vec::with_capacity(in_box.len() + 1);
    values.push(base);
    let mut level = base;
    let mut crossing_evals = 0usize;
    let mut i = 0usize;
    while i < in_box.len() {
        let b = in_box[i].0;
        let mut increment = 0.0;
        while i < in_box.len() && in_box[i].0 == b {
            let j = in_box[i].1;
            let next = traj.values[j + 1];
            let to_lower = lower.eval(b);
            let to_upper = upper.eval(b);
            if !to_lower.is_finite() || !to_upper.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "regime function evaluated to a non-finite value at x = {b}"
                )));
            }
            increment += noise.log_density_raw(next - to_lower) - noise.log_density_raw(next - to_upper);
            crossing_evals += 2;
            i += 1;
        }
        level += increment;
        breakpoints.push(b);
        values.push(level);
    }

    Ok(LikelihoodProfile {
        box_bounds: (alpha, beta),
        box_index,
        breakpoints,
        values,
        sample_size: n,
        direct_evals: n,
        crossing_evals,
    })
}

/// Likelihood ratio `Z_n(u) = L(θ₀ + u/n) / L(θ₀)` from a profile.
///
/// Both `θ₀` and `θ₀ + u/n` must lie in the open box, matching the local
/// parameter range `u ∈ [n(α − θ₀), n(β − θ₀)]`.
pub fn z_ratio(profile: &LikelihoodProfile, theta0: f64, u: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("z_ratio needs n ≥ 1".into()));
    }
    if !u.is_finite() {
        return Err(Error::InvalidInput(format!("z_ratio needs finite u, got {u}")));
    }
    let base = profile.value_at(theta0)?;
    let shifted = profile.value_at(theta0 + u / n as f64)?;
    Ok((shifted - base).exp())
}

/// Write a profile as CSV rows `(interval_left, interval_right, log_likelihood)`.
pub fn write_profile_csv<W: Write>(profile: &LikelihoodProfile, mut out: W) -> Result<()> {
    let write = |out: &mut W| -> std::io::Result<()> {
        writeln!(out, "interval_left,interval_right,log_likelihood")?;
        for i in 0..profile.interval_count() {
            let (left, right) = profile.interval_bounds(i).expect("index in range");
            writeln!(out, "{left},{right},{}", profile.values()[i])?;
        }
        Ok(())
    };
    write(&mut out).map_err(|e| Error::io("writing profile CSV", e))
}

/// Result of the unit-mean martingale diagnostic.
#[derive(Debug, Clone)]
pub struct MartingaleDiagnostic {
    /// Mean of the compensated half-likelihood-ratio weights (exactly 1 in law).
    pub mean: f64,
    /// Standard error of that mean (zero when no sample ever hits the band).
    pub std_error: f64,
    pub replications: usize,
    /// The band `[θ₀, θ₀ + u/n]` the weights accumulate over.
    pub band: (f64, f64),
    /// Total samples that fell in the band, across replications.
    pub band_hits: u64,
}

/// Simulate `replications` paths and average the compensated weight
///
/// ```text
/// W = exp( ½ Σ_j∈B ln(f(ε + δ(X_j))/f(ε))  +  Σ_j∈B G(δ(X_j)) )
/// ```
///
/// over the band `B = [θ₀, θ₀ + u/n]`, where `G` is the Hellinger exponent.
/// `E W = 1` exactly, for every `n` and every start, so a drifting mean here
/// indicts the simulator, the jump law, or the quadrature.
pub fn martingale_check<R: Rng + ?Sized>(
    model: &TarModel,
    theta0: f64,
    u: f64,
    n: usize,
    replications: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<MartingaleDiagnostic> {
    if model.threshold_count() != 1 {
        return Err(Error::Contract(
            "the martingale diagnostic is defined for the two-regime model".into(),
        ));
    }
    if replications < 100 {
        return Err(Error::Contract(format!(
            "martingale diagnostic needs at least 100 replications, got {replications}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("martingale diagnostic needs n ≥ 1".into()));
    }
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "band width parameter u must be positive, got {u}"
        )));
    }
    let theta = [theta0];
    model.validate_theta(&theta)?;
    let band_top = theta0 + u / n as f64;
    let (alpha, beta) = model.boxes()[0];
    if band_top >= beta {
        return Err(Error::InvalidInput(format!(
            "band [θ₀, θ₀ + u/n] = [{theta0}, {band_top}] leaves the box ({alpha}, {beta})"
        )));
    }

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut band_hits = 0u64;
    for _ in 0..replications {
        let traj = model.simulate(&theta, n, burn_in, rng)?;
        let eps = traj
            .innovations
            .as_ref()
            .expect("simulated trajectories carry innovations");
        let mut half_ratio = 0.0;
        let mut compensator = 0.0;
        for j in 0..n {
            let x = traj.values[j];
            if theta0 <= x && x <= band_top {
                let gap = model.regime_gap(0, x)?;
                half_ratio += model.noise().log_jump(eps[j], gap)?;
                compensator += model.noise().hellinger(gap)?.1;
                band_hits += 1;
            }
        }
        let w = (0.5 * half_ratio + compensator).exp();
        sum += w;
        sum_sq += w * w;
    }
    let mean = sum / replications as f64;
    let var = (sum_sq / replications as f64 - mean * mean).max(0.0);
    let std_error = (var / replications as f64).sqrt();
    Ok(MartingaleDiagnostic {
        mean,
        std_error,
        replications,
        band: (theta0, band_top),
        band_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TarModel;
    use crate::noise::NoiseModel;
    use crate::streams::{substream, Domain};

    fn reference_model() -> TarModel {
        TarModel::two_regime("0.5*x", "-0.5*x", (0.1, 0.9), NoiseModel::gaussian(1.0).unwrap())
            .unwrap()
    }

    fn step_model() -> TarModel {
        // constant regimes make residuals, and hence likelihood levels, easy
        // to compute by hand
        TarModel::two_regime("0", "1", (0.4, 0.6), NoiseModel::gaussian(1.0).unwrap()).unwrap()
    }

    const LOG_NORM: f64 = 0.918_938_533_204_672_7; // ln(√(2π))

    #[test]
    fn log_likelihood_matches_a_hand_computation() {
        let m = step_model();
        let traj = Trajectory::from_values(vec![0.2, 0.7, 1.0]).unwrap();
        // X0 = 0.2 < θ → mean 0, residual 0.7; X1 = 0.7 ≥ θ → mean 1, residual 0
        let want = (-0.5 * 0.49 - LOG_NORM) + (0.0 - LOG_NORM);
        let got = log_likelihood(&m, &[0.5], &traj).unwrap();
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn log_likelihood_rejects_theta_outside_the_box() {
        let m = step_model();
        let traj = Trajectory::from_values(vec![0.2, 0.7, 1.0]).unwrap();
        assert!(log_likelihood(&m, &[0.05], &traj).is_err());
    }

    #[test]
    fn profile_matches_direct_evaluation_everywhere() {
        let m = reference_model();
        let mut rng = substream(13, Domain::Scratch, 20, 0);
        let traj = m.simulate(&[0.5], 200, 100, &mut rng).unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        assert!(!profile.is_degenerate());
        // scan thresholds across the box, including points next to breakpoints
        let mut worst = 0.0_f64;
        for i in 0..=500 {
            let theta = 0.1 + 0.8 * (i as f64 + 0.5) / 501.0;
            let direct = log_likelihood(&m, &[theta], &traj).unwrap();
            let stepped = profile.value_at(theta).unwrap();
            worst = worst.max((stepped - direct).abs());
        }
        assert!(worst <= 1e-9, "worst profile/direct gap {worst:.3e}");
    }

    #[test]
    fn profile_handles_duplicate_sample_values() {
        let m = step_model();
        // 0.5 appears twice as a regressor; both samples must cross together
        let traj =
            Trajectory::from_values(vec![0.5, 0.45, 0.5, 1.3, 0.2]).unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        assert_eq!(profile.breakpoints(), &[0.45, 0.5]);
        for theta in [0.41, 0.44, 0.45, 0.47, 0.5, 0.55, 0.59] {
            let direct = log_likelihood(&m, &[theta], &traj).unwrap();
            let stepped = profile.value_at(theta).unwrap();
            assert!(
                (stepped - direct).abs() <= 1e-9,
                "θ = {theta}: {stepped} vs {direct}"
            );
        }
    }

    #[test]
    fn queries_at_a_breakpoint_take_the_left_interval() {
        let m = step_model();
        let traj = Trajectory::from_values(vec![0.5, 2.0, 0.3]).unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        assert_eq!(profile.breakpoints(), &[0.5]);
        // θ ≤ 0.5 keeps X0 = 0.5 in the upper regime (residual 2 − 1);
        // θ > 0.5 moves it down (residual 2 − 0)
        let left = (-0.5 - LOG_NORM) + (-0.5 * 0.49 - LOG_NORM);
        let right = (-2.0 - LOG_NORM) + (-0.5 * 0.49 - LOG_NORM);
        assert!((profile.value_at(0.5).unwrap() - left).abs() < 1e-12);
        assert!((profile.value_at(0.5000001).unwrap() - right).abs() < 1e-12);
        assert_eq!(profile.interval_of(0.5).unwrap(), 0);
    }

    #[test]
    fn empty_box_profile_is_flagged_and_constant() {
        let m = reference_model();
        // all samples far from the box
        let traj = Trajectory::from_values(vec![3.0, 4.0, 3.5, 4.2]).unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        assert!(profile.is_degenerate());
        assert_eq!(profile.interval_count(), 1);
        let direct = log_likelihood(&m, &[0.3], &traj).unwrap();
        assert_eq!(profile.value_at(0.3).unwrap(), profile.value_at(0.7).unwrap());
        assert!((profile.value_at(0.3).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn likelihood_increments_telescope_over_the_crossing_band() {
        // ln Z_n(u₂) − ln Z_n(u₁) must equal the sum of log-jumps of the
        // samples crossed between the two thresholds.
        let m = reference_model();
        let mut rng = substream(17, Domain::Scratch, 21, 0);
        let n = 400;
        let traj = m.simulate(&[0.5], n, 100, &mut rng).unwrap();
        let eps = traj.innovations.as_ref().unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        let (u1, u2) = (8.0, 60.0);
        let (ta, tb) = (0.5 + u1 / n as f64, 0.5 + u2 / n as f64);
        let lhs = profile.value_at(tb).unwrap() - profile.value_at(ta).unwrap();
        let mut rhs = 0.0;
        for j in 0..n {
            let x = traj.values[j];
            if ta <= x && x < tb {
                let gap = m.regime_gap(0, x).unwrap();
                rhs += m.noise().log_jump(eps[j], gap).unwrap();
            }
        }
        assert!((lhs - rhs).abs() <= 1e-9, "telescoping gap {:.3e}", lhs - rhs);
    }

    #[test]
    fn z_ratio_is_an_exponentiated_profile_difference() {
        let m = reference_model();
        let mut rng = substream(19, Domain::Scratch, 22, 0);
        let traj = m.simulate(&[0.5], 200, 100, &mut rng).unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        let z = z_ratio(&profile, 0.5, 20.0, 200).unwrap();
        let want =
            (profile.value_at(0.6).unwrap() - profile.value_at(0.5).unwrap()).exp();
        assert!((z - want).abs() < 1e-12 * want.max(1.0));
        assert_eq!(z_ratio(&profile, 0.5, 0.0, 200).unwrap(), 1.0);
    }

    #[test]
    fn z_ratio_rejects_arguments_leaving_the_box() {
        let m = reference_model();
        let traj = Trajectory::from_values(vec![0.5, 0.3, 0.6]).unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        assert!(z_ratio(&profile, 0.5, 200.0, 200).is_err());
        assert!(z_ratio(&profile, 0.05, 1.0, 200).is_err());
        assert!(z_ratio(&profile, 0.5, f64::NAN, 200).is_err());
        assert!(z_ratio(&profile, 0.5, 1.0, 0).is_err());
    }

    #[test]
    fn construction_counts_stay_linear() {
        let m = reference_model();
        let mut rng = substream(23, Domain::Scratch, 24, 0);
        let n = 200;
        let traj = m.simulate(&[0.5], n, 100, &mut rng).unwrap();
        let profile = build_profile(&m, &traj, 0).unwrap();
        let (direct, crossing) = profile.evaluation_counts();
        assert_eq!(direct, n);
        assert!(crossing <= 2 * n);
        assert_eq!(crossing, 2 * count_in_box(&traj, 0.1, 0.9));
    }

    fn count_in_box(traj: &Trajectory, alpha: f64, beta: f64) -> usize {
        (0..traj.n())
            .filter(|&j| alpha < traj.values[j] && traj.values[j] < beta)
            .count()
    }

    #[test]
    fn from_parts_validates_shape_and_order() {
        assert!(LikelihoodProfile::from_parts((0.0, 1.0), vec![0.5], vec![0.0, 1.0], 10).is_ok());
        assert!(LikelihoodProfile::from_parts((0.0, 1.0), vec![0.5], vec![0.0], 10).is_err());
        assert!(
            LikelihoodProfile::from_parts((0.0, 1.0), vec![0.7, 0.5], vec![0.0, 1.0, 2.0], 10)
                .is_err()
        );
        assert!(LikelihoodProfile::from_parts((0.0, 1.0), vec![1.5], vec![0.0, 1.0], 10).is_err());
        assert!(
            LikelihoodProfile::from_parts((0.0, 1.0), vec![0.5], vec![0.0, f64::NAN], 10).is_err()
        );
    }

    #[test]
    fn profile_csv_has_the_documented_columns() {
        let profile =
            LikelihoodProfile::from_parts((0.0, 1.0), vec![0.25], vec![-3.5, -3.0], 4).unwrap();
        let mut out = Vec::new();
        write_profile_csv(&profile, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("interval_left,interval_right,log_likelihood"));
        assert_eq!(lines.next(), Some("0,0.25,-3.5"));
        assert_eq!(lines.next(), Some("0.25,1,-3"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn martingale_weight_is_one_when_the_band_is_never_hit() {
        // a contracting chain around zero never reaches a band near 5.5
        let m = TarModel::two_regime("0.5*x", "-0.5*x", (5.0, 6.0), NoiseModel::gaussian(1.0).unwrap())
            .unwrap();
        let mut rng = substream(29, Domain::Martingale, 1, 0);
        let diag = martingale_check(&m, 5.5, 5.0, 200, 100, 0, &mut rng).unwrap();
        assert_eq!(diag.band_hits, 0);
        assert_eq!(diag.mean, 1.0);
        assert_eq!(diag.std_error, 0.0);
    }

    #[test]
    fn martingale_mean_is_one_within_noise() {
        let m = reference_model();
        let mut rng = substream(31, Domain::Martingale, 2, 0);
        let diag = martingale_check(&m, 0.5, 3.0, 200, 600, 50, &mut rng).unwrap();
        assert!(diag.band_hits > 0);
        assert!(diag.std_error > 0.0);
        assert!(
            (diag.mean - 1.0).abs() <= 4.0 * diag.std_error,
            "mean {} ± {}",
            diag.mean,
            diag.std_error
        );
    }

    #[test]
    fn martingale_contract_violations_are_reported() {
        let m = reference_model();
        let mut rng = substream(1, Domain::Martingale, 3, 0);
        assert!(matches!(
            martingale_check(&m, 0.5, 3.0, 200, 50, 0, &mut rng),
            Err(Error::Contract(_))
        ));
        // band escaping the box
        assert!(martingale_check(&m, 0.5, 1_000.0, 200, 100, 0, &mut rng).is_err());
        // u must be positive
        assert!(martingale_check(&m, 0.5, -1.0, 200, 100, 0, &mut rng).is_err());
    }
}
