//! Gauss rules by Golub–Welsch.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine image on [lo, hi] of a rule on [−1, 1]; weights are scaled by
    /// `weight_scale`.
    pub fn mapped(&self, lo: f64, hi: f64, weight_scale: f64) -> Rule {
        let (c, h) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
        Rule {
            nodes: self.nodes.iter().map(|t| c + h * t).collect(),
            weights: self.weights.iter().map(|w| w * weight_scale).collect(),
        }
    }
}

/// n-point Gauss–Jacobi rule on [−1, 1] for (1 − x)^α (1 + x)^β.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::InvalidParameter("a Gauss rule needs at least one node".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Jacobi exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        *d = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
    }
    for (i, o) in off.iter_mut().enumerate() {
        let k = (i + 1) as f64;
        let s = 2.0 * k + ab;
        *o = if i == 0 {
            (4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt()
        } else {
            (4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        };
    }
    let jm = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jm);
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

pub fn gauss_legendre(n: usize) -> Result<Rule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss rule on (0, 1) for the weight x^a (1 − x)^b.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> Result<Rule> {
    let r = gauss_jacobi(n, b, a)?;
    Ok(r.mapped(0.0, 1.0, 0.5f64.powf(a + b + 1.0)))
}

/// Uniform rule on [0, 2π) with weights summing to 1.
pub fn periodic_uniform(n: usize) -> Rule {
    Rule {
        nodes: (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect(),
        weights: vec![1.0 / n as f64; n],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::beta::beta;

    fn integrate(r: &Rule, f: impl Fn(f64) -> f64) -> f64 {
        r.nodes.iter().zip(&r.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    #[test]
    fn legendre_is_exact_for_polynomials() {
        let r = gauss_legendre(5).unwrap();
        for k in 0..10 {
            let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
            assert!((integrate(&r, |x| x.powi(k)) - exact).abs() < 1e-14, "x^{k}");
        }
        let r = gauss_legendre(3).unwrap();
        assert_relative_eq!(r.nodes[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.weights[1], 8.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_moments() {
        for (a, b) in [(0.5, 0.5), (-0.5, -0.5), (0.5, -0.5), (1.3, 0.2), (-0.5, 2.0)] {
            let r = gauss_jacobi_unit(12, a, b).unwrap();
            for k in 0..20 {
                let exact = beta(a + 1.0 + k as f64, b + 1.0);
                assert_relative_eq!(integrate(&r, |x| x.powi(k)), exact, max_relative = 1e-12);
            }
            assert!(r.nodes.iter().all(|&x| x > 0.0 && x < 1.0));
        }
    }

    #[test]
    fn chebyshev_nodes() {
        // α = β = −1/2 gives the Chebyshev points with equal weights π/n
        let r = gauss_jacobi(7, -0.5, -0.5).unwrap();
        for (i, (&x, &w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let t = ((2 * (7 - i) - 1) as f64 * std::f64::consts::PI / 14.0).cos();
            assert_relative_eq!(x, t, epsilon = 1e-14);
            assert_relative_eq!(w, std::f64::consts::PI / 7.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn single_node_and_errors() {
        let r = gauss_jacobi(1, 0.0, 0.0).unwrap();
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r.weights[0], 2.0, epsilon = 1e-14);
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
    }
}
