//! Gauss–Legendre rules.

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// n-point Gauss–Legendre rule on [-1, 1], exact for degree 2n - 1.
pub fn gauss_legendre(n: usize) -> Result<Rule> {
    if n == 0 {
        return Err(Error::Domain("quadrature order must be >= 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
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
    Ok(Rule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Legendre rule mapped to [a, b], weights normalized to sum to 1.
pub fn gauss_legendre_probability(n: usize, a: f64, b: f64) -> Result<Rule> {
    let r = gauss_legendre(n)?;
    let nodes = r.nodes.iter().map(|t| a + (b - a) * (t + 1.0) / 2.0).collect();
    let weights = r.weights.iter().map(|w| w / 2.0).collect();
    Ok(Rule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for n in 1..40 {
            let r = gauss_legendre(n).unwrap();
            for deg in 0..(2 * n) {
                let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let expect = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - expect).abs() < 1e-13, "n={n} deg={deg} got={got}");
            }
        }
    }

    #[test]
    fn probability_rule_sums_to_one() {
        let r = gauss_legendre_probability(7, 0.0, 1.0).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(r.nodes.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(gauss_legendre(0).is_err());
    }
}
