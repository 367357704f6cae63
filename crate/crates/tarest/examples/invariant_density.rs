//! Solve the stationary density of a threshold autoregression and read off
//! the quantity the limit law needs from it: the density at the threshold,
//! which is the intensity of threshold crossings.
//!
//! The solver iterates the transfer operator on a grid until the density
//! stops moving. As a sanity anchor, an ordinary AR(1) (both regimes equal)
//! has a known Gaussian stationary law, reproduced below. Run with
//! `cargo run -p tarest --example invariant_density`.

use tarest::model::{intensity_at_threshold, invariant_density, GridSpec, TarModel};
use tarest::noise::NoiseModel;

fn main() -> tarest::Result<()> {
    // AR(1) anchor: X[t+1] = 0.5 X[t] + ε has stationary law N(0, 1/(1−0.25)).
    let ar = TarModel::two_regime("0.5*x", "0.5*x", (0.1, 0.9), NoiseModel::gaussian(1.0)?)?;
    let density = invariant_density(&ar, &[0.5], &GridSpec::default(), 1e-8, 500)?;
    let var = 1.0 / (1.0 - 0.25);
    println!("AR(1) with slope 0.5: stationary variance should be {var:.6}");
    println!("{:>6}  {:>12}  {:>12}", "x", "solved", "exact");
    let mut worst = 0.0_f64;
    for x in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
        let solved = density.value_at(x)?;
        let exact = (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        worst = worst.max((solved - exact).abs());
        println!("{x:>6.2}  {solved:>12.8}  {exact:>12.8}");
    }
    println!("largest pointwise gap: {worst:.2e}  (solver residual {:.2e} after {} iterations)",
        density.residual(), density.iterations());

    // The genuinely two-regime model: the density at the threshold is the
    // jump intensity λ of the compound-Poisson limit process.
    let model = TarModel::two_regime("0.5*x", "-0.5*x", (0.1, 0.9), NoiseModel::gaussian(1.0)?)?;
    let theta = 0.5;
    let density = invariant_density(&model, &[theta], &GridSpec::default(), 1e-8, 500)?;
    let lambda = intensity_at_threshold(&density, theta)?;
    println!();
    println!("two-regime model: density integrates to {:.9}", density.integral());
    println!("crossing intensity λ = φ(θ) = {lambda:.6}");
    Ok(())
}
