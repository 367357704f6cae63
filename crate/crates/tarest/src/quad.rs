//! Gauss–Legendre quadrature on finite intervals.
//!
//! Rules are generated once (Newton iteration on the Legendre recurrence) and
//! then mapped affinely onto whatever interval an integral needs. For the
//! smooth, rapidly decaying integrands used elsewhere in the crate a single
//! high-order rule is accurate to near machine precision; integrands with
//! isolated kinks are handled by splitting the domain at the kinks and
//! applying the rule piecewise.

/// A Gauss–Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build the `n`-point rule. Exact for polynomials of degree `2n − 1`.
    ///
    /// # Panics
    ///
    /// Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots come in ± pairs; solve the positive half and mirror.
        let half = n.div_ceil(2);
        for i in 0..half {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let scale = 0.5 * (b - a);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + scale * x);
        }
        scale * sum
    }

    /// Integrate `f` over `[a, b]` split at the interior points of `cuts`.
    ///
    /// Points of `cuts` outside `(a, b)` are ignored, so callers can pass kink
    /// locations unconditionally.
    pub fn integrate_split(&self, a: f64, b: f64, cuts: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut interior: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
        interior.sort_by(f64::total_cmp);
        interior.dedup();
        let mut sum = 0.0;
        let mut left = a;
        for c in interior {
            sum += self.integrate(left, c, &mut f);
            left = c;
        }
        sum + self.integrate(left, b, &mut f)
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let k = k as f64;
        let p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_rule_matches_published_nodes() {
        let rule = GaussLegendre::new(5);
        let expected_nodes = [
            -0.906179845938664,
            -0.5384693101056831,
            0.0,
            0.5384693101056831,
            0.906179845938664,
        ];
        let expected_weights = [
            0.23692688505618908,
            0.47862867049936647,
            0.5688888888888889,
            0.47862867049936647,
            0.23692688505618908,
        ];
        for i in 0..5 {
            assert!((rule.nodes[i] - expected_nodes[i]).abs() < 1e-14);
            assert!((rule.weights[i] - expected_weights[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(8);
        // degree 15 on [-2, 3]: exact value of ∫ x^15 dx = (3^16 - 2^16)/16
        let got = rule.integrate(-2.0, 3.0, |x| x.powi(15));
        let want = (3.0_f64.powi(16) - 2.0_f64.powi(16)) / 16.0;
        assert!((got - want).abs() / want.abs() < 1e-14, "got {got}, want {want}");
    }

    #[test]
    fn normal_density_integrates_to_one() {
        let rule = GaussLegendre::new(256);
        let z = (2.0 * std::f64::consts::PI).sqrt();
        let got = rule.integrate(-12.0, 12.0, |x| (-0.5 * x * x).exp() / z);
        assert!((got - 1.0).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn split_handles_kinks_in_laplace_density() {
        // ∫ exp(-|x|)/2 over [-30, 30] = 1 - e^{-30}; a kink at 0 ruins a single
        // rule's convergence but piecewise integration restores it.
        let rule = GaussLegendre::new(128);
        let got = rule.integrate_split(-30.0, 30.0, &[0.0], |x| 0.5 * (-x.abs()).exp());
        assert!((got - 1.0).abs() < 1e-13, "got {got}");
    }

    #[test]
    fn split_ignores_cuts_outside_the_interval() {
        let rule = GaussLegendre::new(32);
        let plain = rule.integrate(0.0, 1.0, |x| x * x);
        let split = rule.integrate_split(0.0, 1.0, &[-5.0, 7.0], |x| x * x);
        assert_eq!(plain, split);
    }

    #[test]
    fn large_rule_still_sums_weights_to_two() {
        let rule = GaussLegendre::new(2048);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
    }
}
