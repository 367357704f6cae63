//! Threshold autoregression models: assembly, simulation, the stationary
//! density, and numeric checks of the standing assumptions.
//!
//! A model with `K` thresholds `θ_1 < … < θ_K` carries `K + 1` regime
//! functions `h_0, …, h_K` and evolves as
//!
//! ```text
//! X[j+1] = h_k(X[j]) + ε[j+1]   where k = #{ θ_i ≤ X[j] }
//! ```
//!
//! so a sample equal to a threshold belongs to the upper regime — the tie
//! rule is measure-zero under continuous noise but fixed here once and for
//! all so that simulation, likelihood, and estimation agree bit for bit.
//! Each threshold is only known to lie in its own box `(α_k, β_k)`; the boxes
//! are ordered and disjoint, which keeps the regime layout unambiguous no
//! matter where in their boxes the thresholds sit.
//!
//! The stationary density is computed as the fixed point of the transfer
//! operator `(Tφ)(y) = ∫ f(y − m(x)) φ(x) dx` on a uniform grid sized by a
//! pilot simulation; its value at a threshold is the crossing intensity `λ`
//! that drives the compound-Poisson limit law.

use crate::expr::{parse_regime_expression, RegimeFunction};
use crate::noise::NoiseModel;
use crate::streams::{substream, Domain};
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Trajectories whose magnitude passes this bound are reported as divergent.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// A threshold autoregression: regimes, threshold boxes, and the noise law.
#[derive(Debug, Clone)]
pub struct TarModel {
    regimes: Vec<RegimeFunction>,
    boxes: Vec<(f64, f64)>,
    noise: NoiseModel,
}

impl TarModel {
    /// Two-regime model: `h` below the threshold, `g` at or above it, with the
    /// threshold somewhere in `box_` = `(α, β)`.
    pub fn two_regime(h: &str, g: &str, box_: (f64, f64), noise: NoiseModel) -> Result<Self> {
        Self::from_sources(&[h, g], vec![box_], noise)
    }

    /// Build a model from regime expression strings.
    pub fn from_sources(
        regimes: &[&str],
        boxes: Vec<(f64, f64)>,
        noise: NoiseModel,
    ) -> Result<Self> {
        let parsed: Result<Vec<_>> = regimes
            .iter()
            .map(|src| parse_regime_expression(src))
            .collect();
        Self::new(parsed?, boxes, noise)
    }

    /// Build a model from already-parsed regimes.
    pub fn new(
        regimes: Vec<RegimeFunction>,
        boxes: Vec<(f64, f64)>,
        noise: NoiseModel,
    ) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::InvalidInput(
                "a threshold model needs at least one threshold box".into(),
            ));
        }
        if regimes.len() != boxes.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} threshold boxes need {} regimes, got {}",
                boxes.len(),
                boxes.len() + 1,
                regimes.len()
            )));
        }
        for (k, &(a, b)) in boxes.iter().enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::InvalidInput(format!(
                    "threshold box {k} must be a finite nonempty interval, got ({a}, {b})"
                )));
            }
            if k > 0 && boxes[k - 1].1 > a {
                return Err(Error::InvalidInput(format!(
                    "threshold boxes must be ordered and disjoint: box {} ends at {} after \
                     box {k} starts at {a}",
                    k - 1,
                    boxes[k - 1].1
                )));
            }
        }
        Ok(TarModel {
            regimes,
            boxes,
            noise,
        })
    }

    pub fn regimes(&self) -> &[RegimeFunction] {
        &self.regimes
    }

    pub fn boxes(&self) -> &[(f64, f64)] {
        &self.boxes
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    /// Number of thresholds `K`.
    pub fn threshold_count(&self) -> usize {
        self.boxes.len()
    }

    /// Check that `theta` has one coordinate strictly inside each box.
    pub fn validate_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.boxes.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} threshold coordinates, got {}",
                self.boxes.len(),
                theta.len()
            )));
        }
        for (k, (&t, &(a, b))) in theta.iter().zip(&self.boxes).enumerate() {
            if !t.is_finite() || t <= a || t >= b {
                return Err(Error::InvalidInput(format!(
                    "threshold {k} must lie strictly inside ({a}, {b}), got {t}"
                )));
            }
        }
        Ok(())
    }

    /// Regression mean `m(x, θ)`: the regime whose band contains `x`.
    ///
    /// A sample exactly at a threshold uses the upper regime (`1{x ≥ θ}`), so
    /// for the two-regime model this is `h(x)` for `x < θ` and `g(x)` for
    /// `x ≥ θ`.
    pub fn regression_mean(&self, x: f64, theta: &[f64]) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regression mean needs finite x, got {x}"
            )));
        }
        self.validate_theta(theta)?;
        let m = self.mean_unchecked(x, theta);
        if !m.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regime function evaluated to a non-finite value at x = {x}"
            )));
        }
        Ok(m)
    }

    /// Hot-path mean without contract checks; `theta` must already be valid.
    #[inline]
    pub(crate) fn mean_unchecked(&self, x: f64, theta: &[f64]) -> f64 {
        let k = theta.partition_point(|&t| t <= x);
        self.regimes[k].eval(x)
    }

    /// Signed regime gap at threshold `box_index`: upper minus lower regime.
    ///
    /// This is the mean shift felt by a sample at `v` when the threshold
    /// crosses it from below — `g(v) − h(v)` in the two-regime model — and it
    /// is the shift parameter of the limit law's jump distribution.
    pub fn regime_gap(&self, box_index: usize, v: f64) -> Result<f64> {
        if box_index >= self.boxes.len() {
            return Err(Error::InvalidInput(format!(
                "box index {box_index} out of range for {} boxes",
                self.boxes.len()
            )));
        }
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regime gap needs a finite point, got {v}"
            )));
        }
        let gap = self.regimes[box_index + 1].eval(v) - self.regimes[box_index].eval(v);
        if !gap.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regime gap evaluated to a non-finite value at v = {v}"
            )));
        }
        Ok(gap)
    }

    /// Simulate `n` steps after `burn_in` steps from `X = 0`, recording the
    /// innovations alongside the path.
    ///
    /// The stored innovations are the residuals `X[j+1] − m(X[j], θ)` as the
    /// likelihood will recompute them, so reconstruction is bit-exact.
    pub fn simulate<R: Rng + ?Sized>(
        &self,
        theta: &[f64],
        n: usize,
        burn_in: usize,
        rng: &mut R,
    ) -> Result<Trajectory> {
        self.validate_theta(theta)?;
        if n == 0 {
            return Err(Error::InvalidInput("simulation needs n ≥ 1 steps".into()));
        }
        let mut x = 0.0_f64;
        for step in 0..burn_in {
            let mean = self.checked_mean(x, theta, step)?;
            x = mean + self.noise.sample_one(rng);
            Self::check_divergence(x, step)?;
        }
        let mut values = Vec::with_capacity(n + 1);
        let mut innovations = Vec::with_capacity(n);
        values.push(x);
        for j in 0..n {
            let step = burn_in + j;
            let mean = self.checked_mean(x, theta, step)?;
            let next = mean + self.noise.sample_one(rng);
            Self::check_divergence(next, step)?;
            innovations.push(next - mean);
            values.push(next);
            x = next;
        }
        Ok(Trajectory {
            values,
            innovations: Some(innovations),
            theta_true: Some(theta.to_vec()),
            provenance: None,
        })
    }

    /// Deterministic simulation with injected innovations from `x0`.
    pub fn simulate_with_innovations(
        &self,
        theta: &[f64],
        x0: f64,
        innovations: &[f64],
    ) -> Result<Trajectory> {
        self.validate_theta(theta)?;
        if innovations.is_empty() {
            return Err(Error::InvalidInput(
                "injected simulation needs at least one innovation".into(),
            ));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "initial state must be finite, got {x0}"
            )));
        }
        let mut values = Vec::with_capacity(innovations.len() + 1);
        let mut stored = Vec::with_capacity(innovations.len());
        let mut x = x0;
        values.push(x);
        for (j, &eps) in innovations.iter().enumerate() {
            if !eps.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "innovation {j} is not finite: {eps}"
                )));
            }
            let mean = self.checked_mean(x, theta, j)?;
            let next = mean + eps;
            Self::check_divergence(next, j)?;
            stored.push(next - mean);
            values.push(next);
            x = next;
        }
        Ok(Trajectory {
            values,
            innovations: Some(stored),
            theta_true: Some(theta.to_vec()),
            provenance: None,
        })
    }

    fn checked_mean(&self, x: f64, theta: &[f64], step: usize) -> Result<f64> {
        let mean = self.mean_unchecked(x, theta);
        if !mean.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regime function evaluated to a non-finite value at x = {x} (step {step})"
            )));
        }
        Ok(mean)
    }

    fn check_divergence(x: f64, step: usize) -> Result<()> {
        if !x.is_finite() || x.abs() > DIVERGENCE_BOUND {
            return Err(Error::Diverged {
                step,
                value: x.abs(),
            });
        }
        Ok(())
    }
}

/// A simulated or externally supplied path `X_0, …, X_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `n + 1` state values.
    pub values: Vec<f64>,
    /// Residuals `X[j+1] − m(X[j], θ)`, present for simulated paths.
    pub innovations: Option<Vec<f64>>,
    /// Thresholds the path was simulated under, absent for external data.
    pub theta_true: Option<Vec<f64>>,
    /// Stream coordinates for reproducibility, attached by the harness.
    pub provenance: Option<SeedRecord>,
}

/// Coordinates of the stream one trajectory was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedRecord {
    pub master_seed: u64,
    pub n: u64,
    pub replication: u64,
}

impl Trajectory {
    /// Wrap an external series. The series carries no innovations and no
    /// ground truth.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a trajectory needs at least two values, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "trajectory contains a non-finite value: {bad}"
            )));
        }
        Ok(Trajectory {
            values,
            innovations: None,
            theta_true: None,
            provenance: None,
        })
    }

    /// Number of transitions `n` (one less than the number of values).
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }
}

/// Controls for the stationary-density grid.
///
/// The grid range is taken from a pilot simulation (its own fixed stream, so
/// the grid is reproducible) padded by `pad_sigmas` noise standard deviations,
/// unless overridden explicitly.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub points: usize,
    pub pad_sigmas: f64,
    pub pilot_steps: usize,
    pub pilot_seed: u64,
    pub range_override: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 4096,
            pad_sigmas: 6.0,
            pilot_steps: 100_000,
            pilot_seed: 0x7461726573,
            range_override: None,
        }
    }
}

/// The stationary density of a model on a uniform grid.
#[derive(Debug, Clone)]
pub struct InvariantDensity {
    grid_min: f64,
    step: f64,
    values: Vec<f64>,
    iterations: usize,
    residual: f64,
}

impl InvariantDensity {
    /// Grid abscissae.
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.grid_min + self.step * i as f64)
    }

    pub fn grid_bounds(&self) -> (f64, f64) {
        (
            self.grid_min,
            self.grid_min + self.step * (self.values.len() - 1) as f64,
        )
    }

    /// Spacing of the uniform grid.
    pub fn grid_step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Final fixed-point residual (trapezoid `L¹` distance between iterates).
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Density value at `x` by linear interpolation on the grid.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.grid_bounds();
        if !x.is_finite() || x < lo || x > hi {
            return Err(Error::InvalidInput(format!(
                "point {x} is outside the density grid [{lo}, {hi}]"
            )));
        }
        let pos = (x - self.grid_min) / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }

    /// Trapezoid integral of the stored values (1 up to solver tolerance).
    pub fn integral(&self) -> f64 {
        trapezoid_mass(&self.values, self.step)
    }
}

fn trapezoid_mass(values: &[f64], step: f64) -> f64 {
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    step * (inner + 0.5 * (values[0] + values[values.len() - 1]))
}

/// One application of the transfer operator `(Tφ)(y) = ∫ f(y − m(x, θ)) φ(x) dx`
/// on a uniform grid, by trapezoid quadrature.
///
/// Exposed so the quadrature-consistency of the operator (mass preservation
/// before renormalization) can be observed directly.
pub fn transfer_operator_apply(
    model: &TarModel,
    theta: &[f64],
    grid_min: f64,
    step: f64,
    phi: &[f64],
) -> Result<Vec<f64>> {
    model.validate_theta(theta)?;
    if phi.len() < 2 || !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidInput(
            "transfer operator needs a uniform grid with at least two points".into(),
        ));
    }
    let means: Vec<f64> = (0..phi.len())
        .map(|i| model.mean_unchecked(grid_min + step * i as f64, theta))
        .collect();
    if let Some(bad) = means.iter().find(|m| !m.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "regime function evaluated to a non-finite value on the grid: {bad}"
        )));
    }
    let noise = model.noise();
    let last = phi.len() - 1;
    let out: Vec<f64> = (0..phi.len())
        .into_par_iter()
        .map(|j| {
            let y = grid_min + step * j as f64;
            let mut acc = 0.0;
            for i in 0..phi.len() {
                let w = if i == 0 || i == last { 0.5 } else { 1.0 };
                acc += w * phi[i] * noise.density_raw(y - means[i]);
            }
            acc * step
        })
        .collect();
    Ok(out)
}

/// Solve for the stationary density at `theta` by fixed-point iteration of the
/// transfer operator, starting from the uniform density on the grid.
pub fn invariant_density(
    model: &TarModel,
    theta: &[f64],
    spec: &GridSpec,
    tol: f64,
    max_iter: usize,
) -> Result<InvariantDensity> {
    let (grid_min, step, points) = build_grid(model, theta, spec)?;
    let start = vec![1.0 / (step * (points - 1) as f64); points];
    solve_fixed_point(model, theta, grid_min, step, start, tol, max_iter)
}

/// Same as [`invariant_density`] but from a caller-supplied start density on
/// the same grid the `GridSpec` would build (used to confirm the fixed point does
/// not depend on the initial guess).
pub fn invariant_density_with_start(
    model: &TarModel,
    theta: &[f64],
    spec: &GridSpec,
    tol: f64,
    max_iter: usize,
    start: &[f64],
) -> Result<InvariantDensity> {
    let (grid_min, step, points) = build_grid(model, theta, spec)?;
    if start.len() != points {
        return Err(Error::InvalidInput(format!(
            "start density has {} values but the grid has {points}",
            start.len()
        )));
    }
    if start.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput(
            "start density must be nonnegative and finite".into(),
        ));
    }
    let mass = trapezoid_mass(start, step);
    if mass <= 0.0 {
        return Err(Error::InvalidInput(
            "start density must have positive mass".into(),
        ));
    }
    let normalized: Vec<f64> = start.iter().map(|v| v / mass).collect();
    solve_fixed_point(model, theta, grid_min, step, normalized, tol, max_iter)
}

fn build_grid(model: &TarModel, theta: &[f64], spec: &GridSpec) -> Result<(f64, f64, usize)> {
    model.validate_theta(theta)?;
    if spec.points < 16 {
        return Err(Error::InvalidInput(format!(
            "stationary-density grid needs at least 16 points, got {}",
            spec.points
        )));
    }
    let (lo, hi) = match spec.range_override {
        Some((lo, hi)) => {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidInput(format!(
                    "grid range override must be a finite interval, got ({lo}, {hi})"
                )));
            }
            (lo, hi)
        }
        None => {
            if spec.pilot_steps < 100 {
                return Err(Error::InvalidInput(format!(
                    "pilot simulation needs at least 100 steps, got {}",
                    spec.pilot_steps
                )));
            }
            let mut rng = substream(spec.pilot_seed, Domain::Pilot, 0, 0);
            let pilot = model.simulate(theta, spec.pilot_steps, 0, &mut rng)?;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &v in &pilot.values {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let pad = spec.pad_sigmas * model.noise().std_dev();
            (lo - pad, hi + pad)
        }
    };
    let step = (hi - lo) / (spec.points - 1) as f64;
    Ok((lo, step, spec.points))
}

fn solve_fixed_point(
    model: &TarModel,
    theta: &[f64],
    grid_min: f64,
    step: f64,
    mut phi: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<InvariantDensity> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "fixed-point tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidInput(
            "fixed-point iteration needs max_iter ≥ 1".into(),
        ));
    }
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let mut next = transfer_operator_apply(model, theta, grid_min, step, &phi)?;
        let mass = trapezoid_mass(&next, step);
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: f64::NAN,
            });
        }
        for v in &mut next {
            *v /= mass;
        }
        residual = phi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * step;
        phi = next;
        if residual <= tol {
            return Ok(InvariantDensity {
                grid_min,
                step,
                values: phi,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Crossing intensity `λ = φ(θ_k)`: the stationary density at a threshold.
pub fn intensity_at_threshold(density: &InvariantDensity, theta_k: f64) -> Result<f64> {
    let lambda = density.value_at(theta_k)?;
    if lambda <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "stationary density vanishes at {theta_k}; the limit law needs λ > 0"
        )));
    }
    Ok(lambda)
}

/// Verdict of one numeric assumption check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

/// One line of the assumption report.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionItem {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub detail: String,
}

/// Numeric report on the standing assumptions of threshold estimation.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub items: Vec<ConditionItem>,
}

impl ConditionReport {
    /// True when no item failed (warnings do not block).
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|item| item.status != Status::Fail)
    }
}

/// Check the model numerically: regime separation over each box, boundedness
/// of the divergence integral over the regime-gap image, convergence of the
/// stationary-density solver (as a stationarity proxy), and a slope heuristic
/// for drift at large `|x|`.
pub fn check_conditions(model: &TarModel) -> Result<ConditionReport> {
    let mut items = Vec::new();

    // Regime separation: inf |gap| over each box on a fine inclusive grid.
    let grid_points = 10_000usize;
    let mut min_gap = f64::INFINITY;
    let mut max_gap_abs = 0.0_f64;
    for (k, &(a, b)) in model.boxes().iter().enumerate() {
        for i in 0..=grid_points {
            let v = a + (b - a) * (i as f64) / (grid_points as f64);
            let gap = model.regime_gap(k, v)?.abs();
            min_gap = min_gap.min(gap);
            max_gap_abs = max_gap_abs.max(gap);
        }
    }
    items.push(ConditionItem {
        name: "regime_separation".into(),
        status: if min_gap > 0.0 { Status::Pass } else { Status::Fail },
        value: min_gap,
        detail: format!("min |upper − lower| over the threshold boxes is {min_gap:.6e}"),
    });

    // Divergence integral bounded over the gap image (coarser grid: each
    // evaluation is a quadrature).
    let j_points = 100usize;
    let mut sup_j = 0.0_f64;
    let mut j_finite = true;
    for (k, &(a, b)) in model.boxes().iter().enumerate() {
        for i in 0..=j_points {
            let v = a + (b - a) * (i as f64) / (j_points as f64);
            let gap = model.regime_gap(k, v)?;
            let j = model.noise().divergence_integral(gap)?;
            if !j.is_finite() {
                j_finite = false;
            }
            sup_j = sup_j.max(j);
        }
    }
    items.push(ConditionItem {
        name: "divergence_bounded".into(),
        status: if j_finite { Status::Pass } else { Status::Fail },
        value: sup_j,
        detail: format!("sup of the mean absolute log-jump over the gap image is {sup_j:.6e}"),
    });

    // Stationarity proxy: a light stationary-density solve at box midpoints.
    let midpoints: Vec<f64> = model.boxes().iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let light = GridSpec {
        points: 1024,
        pilot_steps: 20_000,
        ..GridSpec::default()
    };
    let solve = invariant_density(model, &midpoints, &light, 1e-6, 300);
    match solve {
        Ok(density) => items.push(ConditionItem {
            name: "stationary_density".into(),
            status: Status::Pass,
            value: density.residual(),
            detail: format!(
                "transfer-operator fixed point reached in {} iterations",
                density.iterations()
            ),
        }),
        Err(Error::NoConvergence { residual, .. }) => items.push(ConditionItem {
            name: "stationary_density".into(),
            status: Status::Fail,
            value: residual,
            detail: "transfer-operator iteration did not reach tolerance".into(),
        }),
        Err(Error::Diverged { step, .. }) => items.push(ConditionItem {
            name: "stationary_density".into(),
            status: Status::Fail,
            value: f64::INFINITY,
            detail: format!("pilot simulation diverged at step {step}"),
        }),
        Err(other) => return Err(other),
    }

    // Drift heuristic: regime slopes at large |x| should sit below 1 so the
    // chain pulls back toward the center.
    let mut max_slope = 0.0_f64;
    for regime in model.regimes() {
        for x in [-100.0, -50.0, -20.0, 20.0, 50.0, 100.0] {
            let slope = (regime.eval(x + 1.0) - regime.eval(x)).abs();
            if slope.is_finite() {
                max_slope = max_slope.max(slope);
            } else {
                max_slope = f64::INFINITY;
            }
        }
    }
    items.push(ConditionItem {
        name: "drift".into(),
        status: if max_slope < 1.0 { Status::Pass } else { Status::Warn },
        value: max_slope,
        detail: format!("max regime slope estimate at large |x| is {max_slope:.4}"),
    });

    Ok(ConditionReport { items })
}
