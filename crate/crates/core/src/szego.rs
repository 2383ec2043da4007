//! Large-N limits of circular averages of ∏ f(θ_l).
//!
//! For a symbol log f(θ) = Σ_p a_p e^{ipθ} the β-ensemble average tends to
//!
//! ```text
//! exp(N a_0 + (2/β) Σ_{p≥1} p a_p a_{−p})
//! ```
//!
//! provided Σ |p| |a_p|² is finite.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Fourier coefficients of log f.
pub trait FourierSymbol {
    fn coefficient(&self, p: i64) -> Complex64;

    /// Largest |p| with a nonzero coefficient, if finite.
    fn max_order(&self) -> Option<u64> {
        None
    }
}

/// A symbol with finitely many coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteSymbol {
    pub coeffs: BTreeMap<i64, Complex64>,
}

impl FiniteSymbol {
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        FiniteSymbol {
            coeffs: coeffs.into_iter().collect(),
        }
    }
}

impl FourierSymbol for FiniteSymbol {
    fn coefficient(&self, p: i64) -> Complex64 {
        self.coeffs.get(&p).copied().unwrap_or_default()
    }

    fn max_order(&self) -> Option<u64> {
        Some(self.coeffs.keys().map(|p| p.unsigned_abs()).max().unwrap_or(0))
    }
}

/// log |z − e^{iθ}|^{2μ} for |z| < 1:
/// a_p = −μ z̄^p/p, a_{−p} = −μ z^p/p, a_0 = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogModulusSymbol {
    pub mu: f64,
    pub z: Complex64,
}

impl FourierSymbol for LogModulusSymbol {
    fn coefficient(&self, p: i64) -> Complex64 {
        if p == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = p.unsigned_abs();
        let base = if p > 0 { self.z.conj() } else { self.z };
        -self.mu * base.powu(k as u32) / k as f64
    }
}

const MAX_ORDER: u64 = 10_000_000;

fn check(beta: f64, n: usize) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Ok(())
}

fn exponent(sym: &dyn FourierSymbol, beta: f64, n: usize, sum: Complex64) -> f64 {
    let e = n as f64 * sym.coefficient(0) + 2.0 / beta * sum;
    e.re.exp()
}

/// The limit with the p-sum cut at p ≤ `p_max`.
pub fn szego_limit_truncated(sym: &dyn FourierSymbol, beta: f64, n: usize, p_max: u64) -> Result<f64> {
    check(beta, n)?;
    let sum: Complex64 = (1..=p_max as i64)
        .map(|p| p as f64 * sym.coefficient(p) * sym.coefficient(-p))
        .sum();
    Ok(exponent(sym, beta, n, sum))
}

/// The limit; infinite symbols are summed until the terms stop mattering.
pub fn szego_limit(sym: &dyn FourierSymbol, beta: f64, n: usize) -> Result<f64> {
    check(beta, n)?;
    if let Some(m) = sym.max_order() {
        return szego_limit_truncated(sym, beta, n, m);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut quiet = 0;
    let mut norm = 0.0;
    for p in 1..=MAX_ORDER as i64 {
        let (ap, am) = (sym.coefficient(p), sym.coefficient(-p));
        norm += p as f64 * (ap.norm_sqr() + am.norm_sqr());
        let term = p as f64 * ap * am;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) || term.norm() == 0.0 && norm > 0.0 {
            quiet += 1;
            if quiet >= 8 {
                return Ok(exponent(sym, beta, n, sum));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Numerical(format!(
        "Σ|p||a_p|² does not settle within {MAX_ORDER} coefficients (partial {norm})"
    )))
}

/// (1 − |z|²)^{−2μ²/β}, the limit of ⟨∏|z − e^{iθ_l}|^{2μ}⟩.
pub fn circular_limit(beta: f64, mu: f64, absz: f64) -> Result<f64> {
    check(beta, 1)?;
    if !(0.0..1.0).contains(&absz) {
        return Err(Error::InvalidParameter(format!("need 0 <= |z| < 1, got {absz}")));
    }
    Ok((-2.0 * mu * mu / beta * (1.0 - absz * absz).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::circular_moment_toeplitz;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn log_modulus(mu: f64, r: f64) -> LogModulusSymbol {
        LogModulusSymbol {
            mu,
            z: Complex64::new(r, 0.0),
        }
    }

    #[test]
    fn zero_symbol() {
        assert_eq!(szego_limit(&FiniteSymbol::default(), 2.0, 10).unwrap(), 1.0);
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(szego_limit(&log_modulus(1.0, 0.6), 2.0, 5).unwrap(), 1.5625, max_relative = 1e-14);
        assert_relative_eq!(circular_limit(2.0, 1.0, 0.6).unwrap(), 1.5625, max_relative = 1e-15);
        for beta in [0.5, 1.0, 4.0] {
            let sym = LogModulusSymbol {
                mu: -0.7,
                z: Complex64::from_polar(0.45, 1.1),
            };
            assert_relative_eq!(
                szego_limit(&sym, beta, 3).unwrap(),
                circular_limit(beta, -0.7, 0.45).unwrap(),
                max_relative = 1e-13
            );
        }
        assert_eq!(circular_limit(2.0, 0.0, 0.9).unwrap(), 1.0);
        assert!(circular_limit(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn finite_symbol_with_constant_term() {
        let sym = FiniteSymbol::new([(0, Complex64::new(0.1, 0.0)), (2, Complex64::new(0.5, 0.0)), (-2, Complex64::new(0.3, 0.0))]);
        let expect = (3.0f64 * 0.1 + 2.0 * 0.15).exp();
        assert_relative_eq!(szego_limit(&sym, 2.0, 3).unwrap(), expect, max_relative = 1e-15);
    }

    #[test]
    fn divergent_symbol_is_rejected() {
        struct Slow;
        impl FourierSymbol for Slow {
            fn coefficient(&self, p: i64) -> Complex64 {
                Complex64::new(if p == 0 { 0.0 } else { 1.0 / (p.unsigned_abs() as f64).sqrt() }, 0.0)
            }
        }
        assert!(szego_limit(&Slow, 2.0, 1).is_err());
    }

    #[test]
    fn approached_by_the_toeplitz_determinant() {
        let lim = circular_limit(2.0, -1.0, 0.6).unwrap();
        let gaps: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| (circular_moment_toeplitz(-1.0, 0.6, n).unwrap() - lim).abs() / lim)
            .collect();
        assert!(gaps[2] < 0.02, "{gaps:?}");
        // for μ = 1 the finite-N value converges from one side
        let lim = circular_limit(2.0, 1.0, 0.6).unwrap();
        let g: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| (circular_moment_toeplitz(1.0, 0.6, n).unwrap() - lim).abs())
            .collect();
        assert!(g[0] > g[1] && g[1] > g[2], "{g:?}");
    }

    proptest! {
        #[test]
        fn truncations_are_cauchy(mu in -2.0f64..2.0, r in 0.05f64..0.9, beta in 0.5f64..4.0) {
            let sym = log_modulus(mu, r);
            let full = szego_limit(&sym, beta, 4).unwrap().ln();
            let mut prev = f64::INFINITY;
            for p in [5u64, 10, 20, 40] {
                let d = (szego_limit_truncated(&sym, beta, 4, p).unwrap().ln() - full).abs();
                let bound = 2.0 / beta * mu * mu * r.powi(2 * (p as i32 + 1)) / (1.0 - r * r) + 1e-13;
                prop_assert!(d <= bound, "p = {p}: {d} > {bound}");
                prop_assert!(d <= prev + 1e-15);
                prev = d;
            }
        }
    }
}
