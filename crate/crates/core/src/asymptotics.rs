//! Divergence regimes of ₂F₁^(α)(a, b; c; t·1^N) as t → 1 and the
//! exponents they induce for the moment averages.
//!
//! With β = 2/α and γ = a + b − c, put s = γ/β + (N − 1)/2. Then
//!
//! * s < 0: bounded;
//! * s = j − 1 for j ∈ {1..N}: (1−t)^{−(j−1)jβ/2} log(1/(1−t));
//! * j − 1 < s < j, j ∈ {1..N−1}: (1−t)^{−j(γ + (N−j)β/2)};
//! * s > N − 1: each variable contributes (1−x_i)^{−γ}, so δ = Nγ at
//!   equal arguments.
//!
//! Lattice tests on s run through [`Param`], exact for rational input.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::param::Param;
use crate::rmt::GroupFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Bounded,
    Power,
    Log,
}

/// Which clause of the classification produced the form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PropCase {
    /// γ above the top lattice point
    I,
    /// bounded
    II,
    /// on a lattice point
    III,
    /// strictly between lattice points
    IV,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticForm {
    pub regime: Regime,
    pub case: PropCase,
    /// Divergence exponent in ε^{−δ}.
    pub delta: f64,
    pub log_flag: bool,
    /// Window index; 0 in the bounded regime.
    pub j: i64,
    pub gamma: f64,
}

impl AsymptoticForm {
    fn bounded(gamma: f64) -> Self {
        AsymptoticForm {
            regime: Regime::Bounded,
            case: PropCase::II,
            delta: 0.0,
            log_flag: false,
            j: 0,
            gamma,
        }
    }
}

/// Which reading of the Jacobi and group exponent formulas to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Thresholds 2|μ| = β(j−1) + b + 2 and the O⁻ offset δ − 1, as usually
    /// quoted.
    #[default]
    Printed,
    /// Classification of the series that is actually summed: thresholds
    /// 2|μ| = β(j−1) + b + 1, and the O⁻ factor |z²−1|^{2μ} adds 2|μ|.
    Exact,
}

fn half() -> Param {
    Param::ratio(1, 2)
}

fn check_positive(name: &str, v: &Param) -> Result<()> {
    if !v.is_positive() || !v.to_f64().is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Regime of ₂F₁^(α)(a, b; c; t·1^N) as t → 1.
pub fn classify_2f1(a: &Param, b: &Param, c: &Param, alpha: &Param, n: usize) -> Result<AsymptoticForm> {
    check_positive("alpha", alpha)?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let beta = Param::int(2) / alpha.clone();
    let gamma = a + b;
    let gamma = gamma - c.clone();
    let nm1 = Param::int(n as i64 - 1);
    let s = &gamma / &beta + nm1.clone() * half();
    let g = gamma.to_f64();
    if s.is_negative() {
        return Ok(AsymptoticForm::bounded(g));
    }
    if let Some(m) = s.as_integer() {
        if m < n as i64 {
            let j = m + 1;
            return Ok(AsymptoticForm {
                regime: Regime::Log,
                case: PropCase::III,
                delta: (Param::int((j - 1) * j) * beta.clone() * half()).to_f64(),
                log_flag: true,
                j,
                gamma: g,
            });
        }
    }
    if s.cmp_value(&nm1) == std::cmp::Ordering::Greater {
        return Ok(AsymptoticForm {
            regime: Regime::Power,
            case: PropCase::I,
            delta: (Param::int(n as i64) * gamma.clone()).to_f64(),
            log_flag: false,
            j: n as i64,
            gamma: g,
        });
    }
    let j = s.floor() + 1;
    Ok(AsymptoticForm {
        regime: Regime::Power,
        case: PropCase::IV,
        delta: (Param::int(j) * (gamma.clone() + Param::int(n as i64 - j) * beta.clone() * half())).to_f64(),
        log_flag: false,
        j,
        gamma: g,
    })
}

/// Shared form of the circular and Jacobi exponent rules: `shifted` is
/// 2|μ| minus the threshold offset (1 for circular, b + 2 or b + 1 for
/// Jacobi), and windows run over j = 1..=n.
fn window_rule(shifted: &Param, beta: &Param, n: usize) -> Result<AsymptoticForm> {
    let s = shifted / beta;
    let bf = beta.to_f64();
    let kf = shifted.to_f64();
    let nf = n as f64;
    let gamma = kf - (nf - 1.0) * bf / 2.0;
    if s.is_negative() {
        return Ok(AsymptoticForm::bounded(gamma));
    }
    if s.cmp_value(&Param::int(n as i64)) == std::cmp::Ordering::Greater {
        return Err(Error::OutOfRange(format!(
            "exponent outside the windows j = 1..{n} (window coordinate {s})"
        )));
    }
    if let Some(m) = s.as_integer() {
        if m < n as i64 {
            let j = m + 1;
            return Ok(AsymptoticForm {
                regime: Regime::Log,
                case: PropCase::III,
                delta: (Param::int((j - 1) * j) * beta.clone() * half()).to_f64(),
                log_flag: true,
                j,
                gamma,
            });
        }
    }
    // s = n is the closed upper end of window n
    let j = (s.floor() + 1).min(n as i64);
    let case = if s.cmp_value(&Param::int(n as i64 - 1)) == std::cmp::Ordering::Greater {
        PropCase::I
    } else {
        PropCase::IV
    };
    Ok(AsymptoticForm {
        regime: Regime::Power,
        case,
        delta: (Param::int(j) * (shifted.clone() - Param::int(j - 1) * beta.clone() * half())).to_f64(),
        log_flag: false,
        j,
        gamma,
    })
}

fn two_abs_mu(mu: &Param) -> Result<Param> {
    if !mu.is_negative() {
        return Err(Error::InvalidParameter(format!("exponents need mu < 0, got {mu}")));
    }
    Ok(Param::int(2) * mu.abs())
}

/// Exponent of the circular average as |z| → 1⁻, in (1 − |z|)^{−δ}.
pub fn circular_exponent(mu: &Param, beta: &Param, n: usize) -> Result<AsymptoticForm> {
    check_positive("beta", beta)?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let k = two_abs_mu(mu)?;
    window_rule(&(k - Param::int(1)), beta, n)
}

/// δ = int[(k−1)/β + 1] · (k − 1 + β/2 − (β/2) int[(k−1)/β + 1]), k = 2|μ|.
pub fn bk_delta(k: f64, beta: f64) -> Result<f64> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("need k >= 1, got {k}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let j = ((k - 1.0) / beta + 1.0).floor();
    Ok(j * (k - 1.0 + beta / 2.0 - beta / 2.0 * j))
}

/// Exponent of x^{−2μN}⟨∏|x − x_l|^{2μ}⟩ as x → 1⁺, in (1 − 1/x)^{−δ}.
pub fn jacobi_exponent(mu: &Param, b: &Param, beta: &Param, n: usize) -> Result<AsymptoticForm> {
    jacobi_exponent_with(mu, b, beta, n, Convention::Printed)
}

pub fn jacobi_exponent_exact(mu: &Param, b: &Param, beta: &Param, n: usize) -> Result<AsymptoticForm> {
    jacobi_exponent_with(mu, b, beta, n, Convention::Exact)
}

pub fn jacobi_exponent_with(
    mu: &Param,
    b: &Param,
    beta: &Param,
    n: usize,
    conv: Convention,
) -> Result<AsymptoticForm> {
    check_positive("beta", beta)?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let k = two_abs_mu(mu)?;
    let offset = match conv {
        Convention::Printed => Param::int(2),
        Convention::Exact => Param::int(1),
    };
    window_rule(&(k - b.clone() - offset), beta, n)
}

/// Parameters (a, b, c, α) of the Jacobi series under a convention; the
/// printed form omits the +1 in the second parameter.
pub fn jacobi_series_params(
    mu: &Param,
    a: &Param,
    b: &Param,
    beta: &Param,
    n: usize,
    conv: Convention,
) -> (Param, Param, Param, Param) {
    let nm1 = Param::int(n as i64 - 1);
    let half_beta = beta * &half();
    let mut second = &half_beta * &nm1 + a.clone();
    if conv == Convention::Exact {
        second = second + Param::int(1);
    }
    let third = beta * &nm1 + a.clone() + b.clone() + Param::int(2);
    (
        Param::int(-2) * mu.clone(),
        second,
        third,
        Param::int(2) / beta.clone(),
    )
}

/// Exponent of ⟨|det((1+ε)I − U)|^{2μ}⟩ as ε → 0⁺ (Printed convention).
pub fn group_exponent(family: GroupFamily, n: usize, mu: &Param) -> Result<AsymptoticForm> {
    group_exponent_with(family, n, mu, Convention::Printed)
}

pub fn group_exponent_exact(family: GroupFamily, n: usize, mu: &Param) -> Result<AsymptoticForm> {
    group_exponent_with(family, n, mu, Convention::Exact)
}

pub fn group_exponent_with(
    family: GroupFamily,
    n: usize,
    mu: &Param,
    conv: Convention,
) -> Result<AsymptoticForm> {
    let m = family.jacobi_dim(n);
    if m == 0 {
        return Err(Error::InvalidParameter(format!("{family} needs more angles (N = {n})")));
    }
    let (_, b) = family.jacobi_weights();
    let b = Param::ratio((2.0 * b) as i64, 2);
    let jac = jacobi_exponent_with(mu, &b, &Param::int(2), m, conv)?;
    // 1 − 1/x̃ ~ ε²/4, so exponents in ε double
    let mut form = AsymptoticForm {
        delta: 2.0 * jac.delta,
        ..jac
    };
    match conv {
        Convention::Printed => {
            if form.regime == Regime::Bounded {
                return Err(Error::OutOfRange(format!(
                    "2|mu| = {} lies below the first window for {family}",
                    2.0 * mu.to_f64().abs()
                )));
            }
            if form.case == PropCase::I && form.j as usize == m && !jac.log_flag {
                // the printed windows are open at the top of window m
                let upper = b.to_f64() + 2.0 + 2.0 * m as f64;
                if 2.0 * mu.to_f64().abs() >= upper {
                    return Err(Error::OutOfRange(format!(
                        "2|mu| = {} lies above the last window for {family}",
                        2.0 * mu.to_f64().abs()
                    )));
                }
            }
            if family == GroupFamily::OMinusEven {
                form.delta -= 1.0;
            }
        }
        Convention::Exact => {
            if family == GroupFamily::OMinusEven {
                form.delta += 2.0 * mu.to_f64().abs();
                if form.regime == Regime::Bounded {
                    form.regime = Regime::Power;
                }
            }
        }
    }
    Ok(form)
}
