//! Noise families for the innovation sequence.
//!
//! A [`NoiseModel`] is a positive, continuous density `f` with scale `σ`,
//! frozen at construction together with its quadrature setup. Besides the
//! usual density/sampling pair it exposes the three integral functionals that
//! drive threshold estimation:
//!
//! * `log_jump(ε, δ) = ln f(ε + δ) − ln f(ε)` — the log likelihood-ratio jump
//!   incurred when a sample crosses the threshold and its regression mean
//!   shifts by `δ`;
//! * `divergence_integral(z) = ∫ |ln(f(y + z)/f(y))| f(y) dy` — the mean
//!   absolute log-jump, which must stay bounded over the regime gap for the
//!   estimation problem to be regular;
//! * `hellinger(δ) = (H, G)` with `H = ∫ √(f(y + δ) f(y)) dy` and `G = −ln H`
//!   — the Hellinger affinity between the two regimes' conditional laws, which
//!   sets the exponential decay rate of the likelihood ratio.
//!
//! Closed forms for the built-in families (Gaussian: `H = exp(−δ²/8σ²)`,
//! jump `−δ²/2σ² − δε/σ²`; Laplace: jump `(|ε| − |ε + δ|)/σ`) are exercised by
//! the tests; the implementation itself goes through the log-density so any
//! family added later inherits correct functionals automatically.

use crate::quad::GaussLegendre;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

/// Built-in density families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFamily {
    /// `f(y) = exp(−y²/2σ²) / (σ√(2π))`
    Gaussian,
    /// `f(y) = exp(−|y|/σ) / (2σ)` (scale parameter, variance `2σ²`)
    Laplace,
}

impl NoiseFamily {
    /// Default quadrature radius in units of `σ`, chosen so the truncated tail
    /// mass is far below 1e−8: `exp(−72)` for the Gaussian at `12σ`, `exp(−30)`
    /// for the heavier Laplace tail at `30σ`.
    fn default_radius_multiplier(self) -> f64 {
        match self {
            NoiseFamily::Gaussian => 12.0,
            NoiseFamily::Laplace => 30.0,
        }
    }

    /// Points where the log-density is not smooth (kinks), for piecewise quadrature.
    fn kinks(self) -> &'static [f64] {
        match self {
            NoiseFamily::Gaussian => &[],
            NoiseFamily::Laplace => &[0.0],
        }
    }
}

/// Number of quadrature nodes used by the integral functionals when not
/// overridden at construction.
pub const DEFAULT_QUAD_NODES: usize = 2048;

/// An immutable noise model: density family, scale, and quadrature rule.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    family: NoiseFamily,
    sigma: f64,
    log_norm: f64,
    radius: f64,
    rule: GaussLegendre,
}

impl NoiseModel {
    /// Gaussian noise with standard deviation `sigma` and default quadrature.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::with_quadrature(NoiseFamily::Gaussian, sigma, DEFAULT_QUAD_NODES, None)
    }

    /// Laplace noise with scale `sigma` (variance `2σ²`) and default quadrature.
    pub fn laplace(sigma: f64) -> Result<Self> {
        Self::with_quadrature(NoiseFamily::Laplace, sigma, DEFAULT_QUAD_NODES, None)
    }

    /// Build a noise model with explicit quadrature controls.
    ///
    /// `quad_nodes` is the Gauss–Legendre order used for the integral
    /// functionals; `radius_multiplier` overrides the effective support radius
    /// `R = multiplier · σ` (per-family default otherwise). Construction fails
    /// if the density does not integrate to 1 within 1e−8 over `[−R, R]`,
    /// which catches radii set too small for the family's tail.
    pub fn with_quadrature(
        family: NoiseFamily,
        sigma: f64,
        quad_nodes: usize,
        radius_multiplier: Option<f64>,
    ) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "noise scale must be finite and positive, got {sigma}"
            )));
        }
        let mult = radius_multiplier.unwrap_or_else(|| family.default_radius_multiplier());
        if !mult.is_finite() || mult <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "radius multiplier must be finite and positive, got {mult}"
            )));
        }
        if quad_nodes < 16 {
            return Err(Error::InvalidInput(format!(
                "quadrature needs at least 16 nodes, got {quad_nodes}"
            )));
        }
        let log_norm = match family {
            NoiseFamily::Gaussian => -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln(),
            NoiseFamily::Laplace => -(2.0 * sigma).ln(),
        };
        let model = NoiseModel {
            family,
            sigma,
            log_norm,
            radius: mult * sigma,
            rule: GaussLegendre::new(quad_nodes),
        };
        // Positivity on a wide grid: the log-density must be finite wherever
        // the quadrature can evaluate it.
        for i in 0..=1000 {
            let x = -model.radius + 2.0 * model.radius * (i as f64) / 1000.0;
            if !model.log_density_raw(x).is_finite() {
                return Err(Error::InvalidInput(format!(
                    "log-density not finite at x = {x}"
                )));
            }
        }
        let mass = model.integrate_with_kinks(-model.radius, model.radius, family.kinks(), |y| {
            model.log_density_raw(y).exp()
        });
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "density mass over [-R, R] is {mass:.12}, radius multiplier {mult} too small \
                 for the {family:?} tail"
            )));
        }
        Ok(model)
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Effective support radius `R` used by the integral functionals.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Standard deviation of the family (`σ` for Gaussian, `σ√2` for Laplace).
    pub fn std_dev(&self) -> f64 {
        match self.family {
            NoiseFamily::Gaussian => self.sigma,
            NoiseFamily::Laplace => self.sigma * std::f64::consts::SQRT_2,
        }
    }

    /// Log density `ln f(x)`.
    pub fn log_density(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!(
                "log_density requires finite x, got {x}"
            )));
        }
        Ok(self.log_density_raw(x))
    }

    /// Density `f(x)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }

    #[inline]
    pub(crate) fn log_density_raw(&self, x: f64) -> f64 {
        match self.family {
            NoiseFamily::Gaussian => {
                let z = x / self.sigma;
                -0.5 * z * z + self.log_norm
            }
            NoiseFamily::Laplace => -x.abs() / self.sigma + self.log_norm,
        }
    }

    #[inline]
    pub(crate) fn density_raw(&self, x: f64) -> f64 {
        self.log_density_raw(x).exp()
    }

    /// Draw one innovation.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            NoiseFamily::Gaussian => self.sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseFamily::Laplace => {
                // Inverse CDF on the open unit interval; w ∈ (−1/2, 1/2) keeps
                // the logarithm finite on both tails.
                let u: f64 = rng.sample(Open01);
                let w = u - 0.5;
                -self.sigma * w.signum() * (1.0 - 2.0 * w.abs()).ln()
            }
        }
    }

    /// Draw `count` innovations in stream order.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    /// Log likelihood-ratio jump `ln f(ε + δ) − ln f(ε)`.
    pub fn log_jump(&self, eps: f64, delta: f64) -> Result<f64> {
        if !eps.is_finite() || !delta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "log_jump requires finite arguments, got eps={eps}, delta={delta}"
            )));
        }
        Ok(self.log_density_raw(eps + delta) - self.log_density_raw(eps))
    }

    /// Mean absolute log-jump `∫ |ln(f(y + z)/f(y))| f(y) dy`.
    ///
    /// Zero shift is returned as exactly zero. The quadrature splits the
    /// domain at the density's kinks (shifted and unshifted) and at `−z/2`,
    /// where the symmetric built-in families change the sign of the log-ratio,
    /// so every piece is smooth.
    pub fn divergence_integral(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::InvalidInput(format!(
                "divergence_integral requires finite z, got {z}"
            )));
        }
        if z == 0.0 {
            return Ok(0.0);
        }
        let mut cuts: Vec<f64> = vec![-0.5 * z];
        for &k in self.family.kinks() {
            cuts.push(k);
            cuts.push(k - z);
        }
        let value = self.integrate_with_kinks(-self.radius, self.radius, &cuts, |y| {
            (self.log_density_raw(y + z) - self.log_density_raw(y)).abs() * self.density_raw(y)
        });
        Ok(value)
    }

    /// Hellinger affinity between the shifted and unshifted densities.
    ///
    /// Returns `(H, G)` with `H = ∫ √(f(y + δ) f(y)) dy ∈ (0, 1]` and
    /// `G = −ln H ≥ 0`. `δ = 0` returns `(1, 0)` exactly.
    pub fn hellinger(&self, delta: f64) -> Result<(f64, f64)> {
        if !delta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "hellinger requires finite delta, got {delta}"
            )));
        }
        if delta == 0.0 {
            return Ok((1.0, 0.0));
        }
        // The integrand lives where both factors do: [−R, R] ∩ [−R − δ, R − δ].
        let lo = (-self.radius).max(-self.radius - delta);
        let hi = self.radius.min(self.radius - delta);
        if hi <= lo {
            return Err(Error::InvalidInput(format!(
                "shift {delta} exceeds the quadrature support radius {}",
                self.radius
            )));
        }
        let mut cuts: Vec<f64> = Vec::new();
        for &k in self.family.kinks() {
            cuts.push(k);
            cuts.push(k - delta);
        }
        let h = self.integrate_with_kinks(lo, hi, &cuts, |y| {
            (0.5 * (self.log_density_raw(y + delta) + self.log_density_raw(y))).exp()
        });
        if h <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "Hellinger affinity underflowed for delta = {delta}"
            )));
        }
        Ok((h, -h.ln()))
    }

    fn integrate_with_kinks(
        &self,
        lo: f64,
        hi: f64,
        cuts: &[f64],
        f: impl FnMut(f64) -> f64,
    ) -> f64 {
        self.rule.integrate_split(lo, hi, cuts, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{substream, Domain};

    fn gaussian() -> NoiseModel {
        NoiseModel::gaussian(1.0).unwrap()
    }

    fn laplace() -> NoiseModel {
        NoiseModel::laplace(1.0).unwrap()
    }

    #[test]
    fn gaussian_log_density_matches_closed_form() {
        let n = gaussian();
        assert!((n.log_density(0.0).unwrap() - (-0.918_938_533_204_672_7)).abs() < 1e-15);
        let wide = NoiseModel::gaussian(2.0).unwrap();
        assert!((wide.log_density(2.0).unwrap() - (-2.112_085_713_764_618)).abs() < 1e-15);
    }

    #[test]
    fn laplace_log_density_matches_closed_form() {
        let n = laplace();
        assert!((n.log_density(0.0).unwrap() + (2.0_f64).ln()).abs() < 1e-15);
        assert!((n.log_density(-3.0).unwrap() - (-3.0 - (2.0_f64).ln())).abs() < 1e-15);
    }

    #[test]
    fn non_finite_arguments_are_rejected() {
        let n = gaussian();
        assert!(matches!(
            n.log_density(f64::NAN),
            Err(Error::InvalidInput(_))
        ));
        assert!(n.log_jump(f64::INFINITY, 0.0).is_err());
        assert!(n.log_jump(0.0, f64::NAN).is_err());
        assert!(n.divergence_integral(f64::INFINITY).is_err());
        assert!(n.hellinger(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn invalid_scales_are_rejected() {
        assert!(NoiseModel::gaussian(0.0).is_err());
        assert!(NoiseModel::gaussian(-1.0).is_err());
        assert!(NoiseModel::gaussian(f64::NAN).is_err());
    }

    #[test]
    fn too_small_radius_fails_normalization() {
        // 3σ keeps only ~99.7% of the Gaussian mass: nowhere near 1e-8 of 1.
        let err = NoiseModel::with_quadrature(NoiseFamily::Gaussian, 1.0, 512, Some(3.0));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn gaussian_jump_is_linear_in_eps() {
        let n = gaussian();
        // −δ²/2σ² − δε/σ² at ε = 0, δ = 1
        assert!((n.log_jump(0.0, 1.0).unwrap() + 0.5).abs() < 1e-15);
        // and at ε = 1.5, δ = −0.5: −0.125 + 0.75
        assert!((n.log_jump(1.5, -0.5).unwrap() - 0.625).abs() < 1e-12);
    }

    #[test]
    fn laplace_jump_uses_absolute_values() {
        let n = laplace();
        // (|ε| − |ε + δ|)/σ at ε = 0.3, δ = −1
        assert!((n.log_jump(0.3, -1.0).unwrap() + 0.4).abs() < 1e-12);
    }

    #[test]
    fn zero_shift_jump_is_exactly_zero() {
        let n = gaussian();
        for eps in [-2.5, -0.3, 0.0, 0.7, 4.2] {
            assert_eq!(n.log_jump(eps, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn jump_antisymmetry_on_dyadic_grid() {
        // ln f(ε+δ) − ln f(ε) = −(ln f((ε+δ) − δ) − ln f(ε+δ)); with dyadic
        // inputs the float arithmetic is exact, so the identity is bitwise.
        for model in [gaussian(), laplace()] {
            for eps in [-1.5, -0.25, 0.0, 0.5, 2.0] {
                for delta in [-1.0, -0.5, 0.25, 1.5] {
                    let forward = model.log_jump(eps, delta).unwrap();
                    let backward = model.log_jump(eps + delta, -delta).unwrap();
                    assert_eq!(forward, -backward, "eps={eps}, delta={delta}");
                }
            }
        }
    }

    #[test]
    fn divergence_integral_at_zero_is_exact() {
        assert_eq!(gaussian().divergence_integral(0.0).unwrap(), 0.0);
        assert_eq!(laplace().divergence_integral(0.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_divergence_integral_matches_closed_form() {
        // For σ = 1, z = 1 the integral is E|1/2 + Y| with Y standard normal,
        // i.e. 2φ(1/2) + (1/2)(2Φ(1/2) − 1) = 0.89559311480261206.
        let n = gaussian();
        let j = n.divergence_integral(1.0).unwrap();
        assert!((j - 0.895_593_114_802_612_06).abs() < 1e-12, "got {j}");
        // sanity bound z²/2σ² + |z|/σ
        assert!(j <= 1.5);
    }

    #[test]
    fn divergence_integral_is_symmetric_in_z_for_symmetric_noise() {
        for model in [gaussian(), laplace()] {
            for z in [0.25, 0.8, 1.7] {
                let plus = model.divergence_integral(z).unwrap();
                let minus = model.divergence_integral(-z).unwrap();
                assert!((plus - minus).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn laplace_divergence_integral_matches_reference_value() {
        // Exact piecewise integration (the integrand is piecewise-linear ×
        // exponential) gives 0.451070906430176… for σ = 1, z = 1/2; the
        // implementation truncates the tails at 30σ, which costs ~5e-13.
        let j = laplace().divergence_integral(0.5).unwrap();
        assert!((j - 0.451_070_906_430_176_3).abs() < 1e-10, "got {j}");
    }

    #[test]
    fn divergence_integral_matches_monte_carlo() {
        // Brute-force average of |log_jump(ε, z)| over fresh draws.
        let n = laplace();
        let z = 0.5;
        let exact = n.divergence_integral(z).unwrap();
        let mut rng = substream(2026, Domain::Scratch, 1, 0);
        let draws = 10_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..draws {
            let eps = n.sample_one(&mut rng);
            let v = n.log_jump(eps, z).unwrap().abs();
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / draws as f64;
        let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 4.0 * se,
            "MC mean {mean} vs quadrature {exact} (se {se})"
        );
    }

    #[test]
    fn hellinger_at_zero_is_exact() {
        for model in [gaussian(), laplace()] {
            assert_eq!(model.hellinger(0.0).unwrap(), (1.0, 0.0));
        }
    }

    #[test]
    fn gaussian_hellinger_matches_closed_form() {
        let n = gaussian();
        let (h, g) = n.hellinger(1.0).unwrap();
        assert!((h - 0.882_496_902_584_595_4).abs() < 1e-12, "got {h}");
        assert!((g - 0.125).abs() < 1e-12);
    }

    #[test]
    fn laplace_hellinger_matches_closed_form() {
        // H(δ) = e^{−δ/2σ}(1 + δ/2σ) for the Laplace family.
        let n = laplace();
        for delta in [0.25, 1.0, 2.0] {
            let (h, _) = n.hellinger(delta).unwrap();
            let want = (-delta / 2.0).exp() * (1.0 + delta / 2.0);
            assert!((h - want).abs() < 1e-10, "delta {delta}: got {h}, want {want}");
        }
    }

    #[test]
    fn hellinger_is_symmetric_and_bounded() {
        for model in [gaussian(), laplace()] {
            for delta in [0.1, 0.5, 1.0, 2.0, 3.5] {
                let (h, g) = model.hellinger(delta).unwrap();
                let (h_neg, _) = model.hellinger(-delta).unwrap();
                assert!(h > 0.0 && h <= 1.0);
                assert!(g >= 0.0);
                assert!((h - h_neg).abs() < 1e-12, "H(δ) = H(−δ) for any density");
            }
        }
    }

    #[test]
    fn hellinger_difference_obeys_total_variation_bound() {
        // (H(δ) − H(δ+η))² ≤ ∫ |f(y) − f(y+η)| dy: continuity of the affinity
        // in the shift, with the right-hand side evaluated by quadrature.
        for model in [gaussian(), laplace()] {
            for (delta, eta) in [(0.5, 0.3), (1.0, 0.05), (0.2, 1.0)] {
                let (h1, _) = model.hellinger(delta).unwrap();
                let (h2, _) = model.hellinger(delta + eta).unwrap();
                let mut cuts: Vec<f64> = Vec::new();
                for &k in model.family.kinks() {
                    cuts.push(k);
                    cuts.push(k - eta);
                }
                let tv = model.integrate_with_kinks(
                    -model.radius(),
                    model.radius(),
                    &cuts,
                    |y| (model.density_raw(y) - model.density_raw(y + eta)).abs(),
                );
                assert!(
                    (h1 - h2).powi(2) <= tv + 1e-12,
                    "family {:?}, δ={delta}, η={eta}: ({h1} − {h2})² vs {tv}",
                    model.family()
                );
            }
        }
    }

    #[test]
    fn sample_moments_match_the_family() {
        let draws = 1_000_000usize;

        let g = gaussian();
        let mut rng = substream(7, Domain::Scratch, 2, 0);
        let xs = g.sample(draws, &mut rng);
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / draws as f64;
        assert!(mean.abs() < 5.0 / (draws as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "variance {var}");

        let l = laplace();
        let mut rng = substream(7, Domain::Scratch, 3, 0);
        let xs = l.sample(draws, &mut rng);
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / draws as f64;
        assert!(mean.abs() < 5.0 * (2.0f64 / draws as f64).sqrt(), "mean {mean}");
        assert!((var - 2.0).abs() < 0.04, "variance {var}");
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let n = laplace();
        let a = n.sample(100, &mut substream(9, Domain::Scratch, 4, 0));
        let b = n.sample(100, &mut substream(9, Domain::Scratch, 4, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn empty_sample_request_returns_empty() {
        let n = gaussian();
        assert!(n.sample(0, &mut substream(1, Domain::Scratch, 5, 0)).is_empty());
    }

    #[test]
    fn mean_root_likelihood_ratio_equals_hellinger_affinity() {
        // E √(f(ε+δ)/f(ε)) over ε ~ f equals H(δ); ties the sampler, the jump,
        // and the quadrature together through one identity.
        let n = gaussian();
        let delta = 0.8;
        let (h, _) = n.hellinger(delta).unwrap();
        let mut rng = substream(11, Domain::Scratch, 6, 0);
        let draws = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..draws {
            let eps = n.sample_one(&mut rng);
            let v = (0.5 * n.log_jump(eps, delta).unwrap()).exp();
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / draws as f64;
        let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - h).abs() <= 4.0 * se,
            "MC {mean} vs quadrature {h} (se {se})"
        );
    }
}
