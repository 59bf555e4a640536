//! Quadrature rules used by the integral forms of the BKM metric.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, roots found by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] → [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights for `∫₀^∞ g(t) dt` via `t = e^u` and the trapezoid rule in
/// `u`. For integrands analytic in a strip around the positive axis the error
/// decays like `exp(−2π d / step)`, `d` the strip half-width.
pub fn log_trapezoid(u_min: f64, u_max: f64, step: f64) -> Vec<(f64, f64)> {
    let count = ((u_max - u_min) / step).ceil() as usize;
    (0..=count)
        .map(|k| {
            let t = (u_min + k as f64 * step).exp();
            (t, step * t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        assert!((gl.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // degree 15 is integrated exactly by 8 nodes
        let v = gl.integrate(|x| x.powi(15));
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        let gl64 = GaussLegendre::new(64);
        assert!((gl64.integrate(|x| (5.0 * x).exp()) - (5f64.exp() - 1.0) / 5.0).abs() < 1e-12);
    }

    #[test]
    fn log_trapezoid_resolvent() {
        // ∫₀^∞ dt / ((t+a)(t+b)) = log(a/b)/(a−b)
        let (a, b) = (1e-4_f64, 0.6_f64);
        let rule = log_trapezoid(a.ln() - 40.0, b.ln() + 40.0, 0.25);
        let v: f64 = rule.iter().map(|&(t, w)| w / ((t + a) * (t + b))).sum();
        let want = (a / b).ln() / (a - b);
        assert!((v - want).abs() < 1e-13 * want);
    }
}
