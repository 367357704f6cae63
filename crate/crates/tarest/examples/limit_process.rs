//! Sample the two-sided compound-Poisson limit variable ũ exactly.
//!
//! The scaled estimation error n(θ̃ − θ) converges to ũ, a ratio of two
//! integrals of the limit process Z — a jump process with intensity λ on each
//! side of the origin and log-likelihood-ratio jumps. Because Z is piecewise
//! constant, both integrals are finite sums of rectangles and each draw is
//! exact up to an adaptive truncation of the time window. Run with
//! `cargo run -p tarest --example limit_process`.

use tarest::limit::{limit_sample, risk_bound, sample_limit_draw, LimitLaw};
use tarest::noise::NoiseModel;
use tarest::streams::{substream, Domain};

fn main() -> tarest::Result<()> {
    // Gap δ₀ = −0.5 and intensity λ = 0.26 — the values the reference model
    // produces at its threshold.
    let law = LimitLaw::new(NoiseModel::gaussian(1.0)?, -0.5, 0.26)?;

    println!("three draws of the truncated limit process:");
    for i in 0..3 {
        let mut rng = substream(1, Domain::LimitDraw, i, 0);
        let draw = sample_limit_draw(&law, 1e-6, &mut rng)?;
        println!(
            "  window ±{:>7.2}  jumps {:>3}+ / {:>3}−  doublings {}  ũ = {:+.4}",
            draw.truncation_u,
            draw.pos_jump_times.len(),
            draw.neg_jump_times.len(),
            draw.doublings,
            draw.u_tilde
        );
    }

    // A larger sample characterizes the law: symmetric heavy-ish tails whose
    // scale shrinks like 1/λ.
    let mut rng = substream(1, Domain::LimitDraw, 0, 0);
    let sample = limit_sample(&law, 10_000, 1e-6, &mut rng)?;
    let mean = sample.iter().sum::<f64>() / sample.len() as f64;
    let mut sorted = sample.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[(p * (sorted.len() - 1) as f64).round() as usize];
    println!();
    println!("10 000 draws: mean {mean:+.4}, quartiles [{:+.4}, {:+.4}], 99% range [{:+.4}, {:+.4}]",
        q(0.25), q(0.75), q(0.005), q(0.995));

    // E|ũ|^p is the large-n local-minimax risk floor: no estimator beats it
    // at rate n.
    for p in [1.0, 2.0] {
        let mut rng = substream(1, Domain::LimitDraw, 0, 1);
        let bound = risk_bound(&law, p, 10_000, 1e-6, &mut rng)?;
        println!("risk floor E|ũ|^{p}: {:.4} ± {:.4}", bound.estimate, bound.std_error);
    }
    Ok(())
}
