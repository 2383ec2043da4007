//! β = 2 circular moments as Toeplitz determinants.
//!
//! The CUE average of ∏ f(θ_l) is det[f̂_{j−k}]_{N×N}. For the symbol
//! f(θ) = |1 − r e^{iθ}|^{2μ} the Fourier coefficients are classical
//!
//! ```text
//! f̂_m = r^m (−μ)_m / m! · ₂F₁(−μ, m − μ; m + 1; r²)
//! ```
//!
//! and for μ < 0 every term of that series is positive.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_ITER: usize = 50_000_000;

/// Fourier coefficient f̂_m of |1 − r e^{iθ}|^{2μ}, 0 ≤ r < 1.
pub fn fourier_coefficient(mu: f64, r: f64, m: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("need 0 <= r < 1, got {r}")));
    }
    let a = -mu;
    let mut lead = 1.0;
    for k in 0..m {
        lead *= (a + k as f64) / (k + 1) as f64 * r;
    }
    if lead == 0.0 {
        return Ok(0.0);
    }
    let r2 = r * r;
    let (b, c) = (m as f64 - mu, m as f64 + 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_ITER {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * r2;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(lead * sum);
        }
        let q = ratio.abs();
        if q < 1.0 && term.abs() * q / (1.0 - q) <= 1e-17 * sum.abs() {
            return Ok(lead * sum);
        }
    }
    Err(Error::Numerical(format!(
        "Fourier coefficient series did not settle (mu = {mu}, r = {r}, m = {m})"
    )))
}

/// log det of the N×N Toeplitz matrix of the symbol at |z| = r < 1.
pub fn log_toeplitz_det(mu: f64, r: f64, n: usize) -> Result<f64> {
    let coef: Vec<f64> = (0..n).map(|m| fourier_coefficient(mu, r, m)).collect::<Result<_>>()?;
    let t = DMatrix::from_fn(n, n, |j, k| coef[j.abs_diff(k)]);
    let chol = t.cholesky().ok_or_else(|| {
        Error::Numerical(format!(
            "Toeplitz matrix not numerically positive definite (mu = {mu}, |z| = {r}, N = {n})"
        ))
    })?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// ⟨∏|z − e^{iθ_l}|^{2μ}⟩ over the CUE of size N.
pub fn circular_moment_toeplitz(mu: f64, absz: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(absz >= 0.0) || absz == 1.0 || !absz.is_finite() {
        return Err(Error::InvalidParameter(format!("|z| must be off the unit circle, got {absz}")));
    }
    if absz > 1.0 {
        let pref = absz.powf(2.0 * mu * n as f64);
        return Ok(pref * circular_moment_toeplitz(mu, 1.0 / absz, n)?);
    }
    Ok(log_toeplitz_det(mu, absz, n)?.exp())
}
