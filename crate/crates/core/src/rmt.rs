//! Characteristic-polynomial moments as hypergeometric series.
//!
//! Circular β-ensemble:
//! ⟨∏|z − e^{iθ_l}|^{2μ}⟩ = ₂F₁^(2/β)(−μ, −μ; (β/2)(N−1)+1; |z|²·1^N).
//!
//! Jacobi β-ensemble on (0,1) with weight x^a (1−x)^b:
//! ⟨∏|x − x_l|^{2μ}⟩ = x^{2μN} ₂F₁^(2/β)(−2μ, (β/2)(N−1)+a+1; β(N−1)+a+b+2; x⁻¹·1^N),
//! the second parameter coming from the Selberg–Kadell integral of a Jack
//! polynomial against the Jacobi weight.
//!
//! The classical groups reduce to the β = 2 Jacobi case through
//! x̃ = (1 + cos θ)/2.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperg::{hyp2f1_equal_with, Hyp2F1Params, SeriesConfig, SeriesResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupFamily {
    /// Sp(2N)
    Sp,
    /// O⁺(2N)
    OPlusEven,
    /// O⁻(2N)
    OMinusEven,
}

impl GroupFamily {
    /// Jacobi weight exponents (a, b) of the reduced ensemble; `b` sits at
    /// x̃ = 1, the end approached as z → 1.
    pub fn jacobi_weights(self) -> (f64, f64) {
        match self {
            GroupFamily::Sp => (0.5, 0.5),
            GroupFamily::OPlusEven => (-0.5, -0.5),
            GroupFamily::OMinusEven => (0.5, -0.5),
        }
    }

    /// Number of free angles.
    pub fn jacobi_dim(self, n: usize) -> usize {
        match self {
            GroupFamily::OMinusEven => n.saturating_sub(1),
            _ => n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupFamily::Sp => "sp",
            GroupFamily::OPlusEven => "o+",
            GroupFamily::OMinusEven => "o-",
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sp" => Ok(GroupFamily::Sp),
            "o+" | "oplus" | "o+even" => Ok(GroupFamily::OPlusEven),
            "o-" | "ominus" | "o-even" => Ok(GroupFamily::OMinusEven),
            other => Err(Error::InvalidParameter(format!("unknown group family '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Circular { beta: f64, n: usize },
    Jacobi { a: f64, b: f64, beta: f64, n: usize },
    Group { family: GroupFamily, n: usize },
}

impl EnsembleSpec {
    pub fn n(&self) -> usize {
        match *self {
            EnsembleSpec::Circular { n, .. }
            | EnsembleSpec::Jacobi { n, .. }
            | EnsembleSpec::Group { n, .. } => n,
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            EnsembleSpec::Circular { beta, .. } | EnsembleSpec::Jacobi { beta, .. } => beta,
            EnsembleSpec::Group { .. } => 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n() == 0 {
            return bad("N must be at least 1".into());
        }
        let beta = self.beta();
        if !(beta > 0.0 && beta.is_finite()) {
            return bad(format!("beta must be positive and finite, got {beta}"));
        }
        match *self {
            EnsembleSpec::Jacobi { a, b, .. } if !(a > -1.0 && b > -1.0) => {
                bad(format!("Jacobi exponents need a, b > -1, got a = {a}, b = {b}"))
            }
            EnsembleSpec::Group {
                family: GroupFamily::OMinusEven,
                n,
            } if n < 2 => bad("O-(2N) needs N >= 2".into()),
            _ => Ok(()),
        }
    }
}

/// An average of ∏|point − λ_l|^{2μ}. The point is |z| for circular
/// ensembles, x for Jacobi ensembles and ε (z = 1 + ε) for groups.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentQuery {
    pub ensemble: EnsembleSpec,
    pub mu: f64,
    pub point: f64,
}

impl MomentQuery {
    pub fn circular(beta: f64, n: usize, mu: f64, absz: f64) -> Self {
        MomentQuery {
            ensemble: EnsembleSpec::Circular { beta, n },
            mu,
            point: absz,
        }
    }

    pub fn jacobi(a: f64, b: f64, beta: f64, n: usize, mu: f64, x: f64) -> Self {
        MomentQuery {
            ensemble: EnsembleSpec::Jacobi { a, b, beta, n },
            mu,
            point: x,
        }
    }

    pub fn group(family: GroupFamily, n: usize, mu: f64, eps: f64) -> Self {
        MomentQuery {
            ensemble: EnsembleSpec::Group { family, n },
            mu,
            point: eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if !self.mu.is_finite() || !self.point.is_finite() {
            return Err(Error::InvalidParameter("mu and point must be finite".into()));
        }
        match self.ensemble {
            EnsembleSpec::Circular { .. } if self.point < 0.0 || self.point == 1.0 => Err(
                Error::InvalidParameter(format!("|z| must be non-negative and off the unit circle, got {}", self.point)),
            ),
            EnsembleSpec::Jacobi { .. } if (0.0..=1.0).contains(&self.point) => Err(Error::InvalidParameter(format!(
                "x must lie outside [0, 1], got {}",
                self.point
            ))),
            EnsembleSpec::Group { .. } if self.point <= 0.0 => {
                Err(Error::InvalidParameter(format!("eps must be positive, got {}", self.point)))
            }
            _ => Ok(()),
        }
    }
}

/// Parameters of the circular series at |z| < 1.
pub fn circular_params(beta: f64, n: usize, mu: f64, absz: f64) -> Hyp2F1Params {
    Hyp2F1Params {
        a: -mu,
        b: -mu,
        c: beta * (n as f64 - 1.0) / 2.0 + 1.0,
        alpha: 2.0 / beta,
        n,
        t: absz * absz,
    }
}

/// Parameters of the Jacobi series at x > 1 (without the x^{2μN} factor).
pub fn jacobi_params(a: f64, b: f64, beta: f64, n: usize, mu: f64, x: f64) -> Hyp2F1Params {
    let nm1 = n as f64 - 1.0;
    Hyp2F1Params {
        a: -2.0 * mu,
        b: beta * nm1 / 2.0 + a + 1.0,
        c: beta * nm1 + a + b + 2.0,
        alpha: 2.0 / beta,
        n,
        t: 1.0 / x,
    }
}

/// For |z| > 1 the average at z equals |z|^{2μN} times the average at 1/z̄.
pub fn circular_reflect(q: &MomentQuery) -> Result<(f64, MomentQuery)> {
    let EnsembleSpec::Circular { n, .. } = q.ensemble else {
        return Err(Error::InvalidParameter("reflection applies to circular queries".into()));
    };
    if !(q.point > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reflection needs |z| > 1, got {}",
            q.point
        )));
    }
    let pref = if q.mu == 0.0 {
        1.0
    } else {
        q.point.powf(2.0 * q.mu * n as f64)
    };
    Ok((
        pref,
        MomentQuery {
            point: 1.0 / q.point,
            ..*q
        },
    ))
}

pub fn circular_moment(q: &MomentQuery, rel_tol: f64) -> Result<SeriesResult> {
    circular_moment_with(q, &SeriesConfig::new(rel_tol))
}

/// Circular moment; points with |z| > 1 go through [`circular_reflect`].
pub fn circular_moment_with(q: &MomentQuery, cfg: &SeriesConfig) -> Result<SeriesResult> {
    q.validate()?;
    let EnsembleSpec::Circular { beta, n } = q.ensemble else {
        return Err(Error::InvalidParameter("expected a circular query".into()));
    };
    if q.point > 1.0 {
        let (pref, inner) = circular_reflect(q)?;
        return Ok(circular_moment_with(&inner, cfg)?.scaled(pref));
    }
    hyp2f1_equal_with(&circular_params(beta, n, q.mu, q.point), cfg)
}

pub fn jacobi_moment(q: &MomentQuery, rel_tol: f64) -> Result<SeriesResult> {
    jacobi_moment_with(q, &SeriesConfig::new(rel_tol))
}

/// Jacobi moment for x > 1; x < 0 is handled through x_l ↦ 1 − x_l, which
/// swaps a and b.
pub fn jacobi_moment_with(q: &MomentQuery, cfg: &SeriesConfig) -> Result<SeriesResult> {
    q.validate()?;
    let EnsembleSpec::Jacobi { a, b, beta, n } = q.ensemble else {
        return Err(Error::InvalidParameter("expected a Jacobi query".into()));
    };
    if q.point < 0.0 {
        let swapped = MomentQuery::jacobi(b, a, beta, n, q.mu, 1.0 - q.point);
        return jacobi_moment_with(&swapped, cfg);
    }
    let x = q.point;
    let series = hyp2f1_equal_with(&jacobi_params(a, b, beta, n, q.mu, x), cfg)?;
    Ok(series.scaled(x.powf(2.0 * q.mu * n as f64)))
}

/// Deterministic pieces of the group reduction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupReduction {
    /// Point handed to the Jacobi moment.
    pub x_tilde: f64,
    /// Product of all prefactors.
    pub prefactor: f64,
    pub jacobi: MomentQuery,
}

pub fn group_reduction(family: GroupFamily, n: usize, mu: f64, eps: f64) -> Result<GroupReduction> {
    let q = MomentQuery::group(family, n, mu, eps);
    q.validate()?;
    let z = 1.0 + eps;
    let xc = (z * z + 1.0) / (2.0 * z);
    let x_tilde = (1.0 + xc) / 2.0;
    let m = family.jacobi_dim(n);
    let mf = m as f64;
    let mut prefactor = (2.0 * z).powf(2.0 * mu * mf) * 2f64.powf(2.0 * mu * mf);
    if family == GroupFamily::OMinusEven {
        prefactor *= (z * z - 1.0).abs().powf(2.0 * mu);
    }
    let (a, b) = family.jacobi_weights();
    Ok(GroupReduction {
        x_tilde,
        prefactor,
        jacobi: MomentQuery::jacobi(a, b, 2.0, m, mu, x_tilde),
    })
}

pub fn group_moment(family: GroupFamily, n: usize, mu: f64, eps: f64, rel_tol: f64) -> Result<SeriesResult> {
    group_moment_with(family, n, mu, eps, &SeriesConfig::new(rel_tol))
}

/// ⟨|det((1+ε)I − U)|^{2μ}⟩ over Sp(2N), O⁺(2N) or O⁻(2N).
pub fn group_moment_with(
    family: GroupFamily,
    n: usize,
    mu: f64,
    eps: f64,
    cfg: &SeriesConfig,
) -> Result<SeriesResult> {
    let red = group_reduction(family, n, mu, eps)?;
    Ok(jacobi_moment_with(&red.jacobi, cfg)?.scaled(red.prefactor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circular_examples() {
        for (beta, n, mu) in [(2.0, 3, -1.3), (0.5, 5, 0.7), (4.0, 1, -0.2)] {
            let r = circular_moment(&MomentQuery::circular(beta, n, mu, 0.0), 1e-12).unwrap();
            assert_eq!(r.value, 1.0);
        }
        let r = circular_moment(&MomentQuery::circular(2.0, 1, -1.0, 0.5), 1e-13).unwrap();
        assert_relative_eq!(r.value, 4.0 / 3.0, max_relative = 1e-12);
        // β = 2, μ = −1: the average is 1/(1 − |z|²) for every N
        for n in [2, 7, 30] {
            let r = circular_moment(&MomentQuery::circular(2.0, n, -1.0, 0.8), 1e-13).unwrap();
            assert_relative_eq!(r.value, 1.0 / 0.36, max_relative = 1e-11);
        }
    }

    #[test]
    fn reflection_examples() {
        let (pref, refl) = circular_reflect(&MomentQuery::circular(2.0, 3, -1.0, 2.0)).unwrap();
        assert_relative_eq!(pref, 1.0 / 64.0, max_relative = 1e-15);
        assert_eq!(refl.point, 0.5);
        assert!(circular_reflect(&MomentQuery::circular(2.0, 3, -1.0, 1.0)).is_err());
        assert!(circular_reflect(&MomentQuery::circular(2.0, 3, -1.0, 0.5)).is_err());
        let (pref, _) = circular_reflect(&MomentQuery::circular(1.0, 4, 0.0, 3.0)).unwrap();
        assert_eq!(pref, 1.0);
        // N = 1, β = 2, μ = −1 at |z| = 2: 1/(|z|² − 1)
        let r = circular_moment(&MomentQuery::circular(2.0, 1, -1.0, 2.0), 1e-13).unwrap();
        assert_relative_eq!(r.value, 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn jacobi_examples() {
        let r = jacobi_moment(&MomentQuery::jacobi(0.3, 1.2, 1.5, 3, 0.0, 1.7), 1e-12).unwrap();
        assert_eq!(r.value, 1.0);
        let r = jacobi_moment(&MomentQuery::jacobi(0.0, 0.0, 2.0, 1, -1.0, 2.0), 1e-13).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-12);
        // ∫₀¹ (t + 1)^{−2} dt = 1/2 at x = −1 by reflection
        let r = jacobi_moment(&MomentQuery::jacobi(0.0, 0.0, 2.0, 1, -1.0, -1.0), 1e-13).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-12);
        // N = 1, a = 1, b = 0, μ = 1/2 at x = 2: 2∫ t(2 − t) dt = 4/3
        let r = jacobi_moment(&MomentQuery::jacobi(1.0, 0.0, 2.0, 1, 0.5, 2.0), 1e-13).unwrap();
        assert_relative_eq!(r.value, 4.0 / 3.0, max_relative = 1e-12);
        assert!(jacobi_moment(&MomentQuery::jacobi(0.0, 0.0, 2.0, 1, -1.0, 0.5), 1e-10).is_err());
        assert!(jacobi_moment(&MomentQuery::jacobi(0.0, 0.0, 2.0, 1, -1.0, 1.0), 1e-10).is_err());
        assert!(jacobi_moment(&MomentQuery::jacobi(-1.0, 0.0, 2.0, 1, -1.0, 2.0), 1e-10).is_err());
    }

    #[test]
    fn group_examples() {
        for fam in [GroupFamily::Sp, GroupFamily::OPlusEven, GroupFamily::OMinusEven] {
            let r = group_moment(fam, 3, 0.0, 0.4, 1e-12).unwrap();
            assert_relative_eq!(r.value, 1.0, max_relative = 1e-15);
        }
        assert!(group_moment(GroupFamily::Sp, 2, -0.6, 0.0, 1e-10).is_err());
        assert!(group_moment(GroupFamily::OMinusEven, 1, -0.6, 0.5, 1e-10).is_err());
    }

    #[test]
    fn sp_pipeline_identity() {
        let (n, mu, eps) = (2, -0.6, 0.5);
        let z: f64 = 1.0 + eps;
        let xt = (1.0 + (z * z + 1.0) / (2.0 * z)) / 2.0;
        let jac = jacobi_moment(&MomentQuery::jacobi(0.5, 0.5, 2.0, n, mu, xt), 1e-12).unwrap();
        let grp = group_moment(GroupFamily::Sp, n, mu, eps, 1e-12).unwrap();
        let expect = 2f64.powf(2.0 * mu * n as f64) * (2.0 * z).powf(2.0 * mu * n as f64) * jac.value;
        assert_relative_eq!(grp.value, expect, max_relative = 1e-14);
    }

    #[test]
    fn monotone_towards_the_circle() {
        let mut prev = 0.0;
        for absz in [0.1, 0.3, 0.5, 0.7, 0.8] {
            let v = circular_moment(&MomentQuery::circular(1.0, 3, -0.6, absz), 1e-12)
                .unwrap()
                .value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("sp".parse::<GroupFamily>().unwrap(), GroupFamily::Sp);
        assert_eq!("O+".parse::<GroupFamily>().unwrap(), GroupFamily::OPlusEven);
        assert_eq!("o-".parse::<GroupFamily>().unwrap(), GroupFamily::OMinusEven);
        assert!("u".parse::<GroupFamily>().is_err());
    }
}
