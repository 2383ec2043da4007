//! Hook products, generalized Pochhammer symbols and principal
//! specializations of Jack polynomials.
//!
//! Everything is generic over [`Scalar`] so the same code runs in `f64` and
//! in exact rational arithmetic. For large partitions the `f64` values
//! overflow; the `log_*` variants accumulate in [`SignedLog`] form.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Above this weight the `f64` helpers switch to log accumulation.
pub const LOG_WEIGHT_THRESHOLD: usize = 40;

/// Arithmetic needed by the Jack kernels.
pub trait Scalar: Clone + Debug + Num + Signed + PartialOrd {
    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test used for lattice poles and vanishing cells. Exact for
    /// rationals; relative to `scale` for floats.
    fn near_zero(&self, scale: &Self) -> bool;

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near_zero(&self, scale: &Self) -> bool {
        self.abs() <= 1e-12 * scale.abs().max(1.0)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn near_zero(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

/// Jack parameter α > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Alpha<T>(T);

impl<T: Scalar> Alpha<T> {
    pub fn new(alpha: T) -> Result<Self> {
        let f = alpha.to_f64();
        if !(alpha > T::zero()) || !f.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha:?}"
            )));
        }
        Ok(Alpha(alpha))
    }

    /// α = 2/β.
    pub fn from_beta(beta: T) -> Result<Self> {
        if !(beta > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta:?}"
            )));
        }
        Self::new(T::from_i64(2) / beta)
    }

    pub fn value(&self) -> &T {
        &self.0
    }
}

fn check_len(kappa: &Partition, n: usize) -> Result<()> {
    if kappa.len() > n {
        return Err(Error::TooManyParts {
            partition: kappa.to_string(),
            len: kappa.len(),
            n,
        });
    }
    Ok(())
}

/// Arm and leg of every cell, in row order.
fn hooks(kappa: &Partition) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
    let conj = kappa.conjugate();
    kappa.cells().map(move |(i, j)| {
        let a = kappa.part(i) - j;
        let l = conj.part(j) - i;
        (i, j, a, l)
    })
}

/// d'_κ = ∏ (α(a+1) + l).
pub fn dprime<T: Scalar>(kappa: &Partition, alpha: &Alpha<T>) -> T {
    let al = alpha.value();
    hooks(kappa).fold(T::one(), |acc, (_, _, a, l)| {
        acc * (al.clone() * T::from_usize(a + 1) + T::from_usize(l))
    })
}

/// One cell factor u − (i−1)/α + j − 1.
fn poch_cell<T: Scalar>(u: &T, alpha: &T, i: usize, j: usize) -> T {
    u.clone() - T::from_usize(i - 1) / alpha.clone() + T::from_usize(j - 1)
}

/// [u]_κ^(α) as the cell product ∏ (u − (i−1)/α + j − 1).
pub fn gen_pochhammer<T: Scalar>(u: &T, kappa: &Partition, alpha: &Alpha<T>, n: usize) -> Result<T> {
    check_len(kappa, n)?;
    let al = alpha.value();
    Ok(kappa
        .cells()
        .fold(T::one(), |acc, (i, j)| acc * poch_cell(u, al, i, j)))
}

/// First cell (row-major) at which [u]_κ has a vanishing factor.
pub fn pochhammer_zero_cell<T: Scalar>(
    u: &T,
    kappa: &Partition,
    alpha: &Alpha<T>,
) -> Option<(usize, usize)> {
    let al = alpha.value();
    kappa.cells().find(|&(i, j)| {
        let scale = u.abs() + T::from_usize(i) / al.clone() + T::from_usize(j);
        poch_cell(u, al, i, j).near_zero(&scale)
    })
}

/// P_κ^(α)(1^N) = ∏ (N − (i−1) + α(j−1)) / (αa + l + 1).
///
/// Partitions longer than N are rejected rather than mapped to zero.
pub fn p_principal<T: Scalar>(kappa: &Partition, alpha: &Alpha<T>, n: usize) -> Result<T> {
    check_len(kappa, n)?;
    let al = alpha.value();
    Ok(hooks(kappa).fold(T::one(), |acc, (i, j, a, l)| {
        let num = T::from_usize(n + 1 - i) + al.clone() * T::from_usize(j - 1);
        let den = al.clone() * T::from_usize(a) + T::from_usize(l + 1);
        acc * num / den
    }))
}

fn factorial<T: Scalar>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, m| acc * T::from_usize(m))
}

fn pow<T: Scalar>(x: &T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, _| acc * x.clone())
}

/// C_κ^(α)(1^N) = α^|κ| |κ|! / d'_κ · P_κ^(α)(1^N).
pub fn c_principal<T: Scalar>(kappa: &Partition, alpha: &Alpha<T>, n: usize) -> Result<T> {
    let k = kappa.weight();
    let p = p_principal(kappa, alpha, n)?;
    Ok(pow(alpha.value(), k) * factorial::<T>(k) / dprime(kappa, alpha) * p)
}

/// C_κ^(α)(t, …, t) = t^|κ| C_κ^(α)(1^N).
pub fn c_principal_term<T: Scalar>(kappa: &Partition, alpha: &Alpha<T>, n: usize, t: &T) -> Result<T> {
    Ok(pow(t, kappa.weight()) * c_principal(kappa, alpha, n)?)
}

/// A real number stored as sign and log-magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    /// -1, 0 or 1
    pub sign: f64,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog {
        sign: 1.0,
        log_abs: 0.0,
    };
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: x.signum(),
                log_abs: x.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.log_abs.exp()
        }
    }

    pub fn mul_f64(self, x: f64) -> SignedLog {
        self * SignedLog::from_f64(x)
    }

    pub fn div_f64(self, x: f64) -> SignedLog {
        self / SignedLog::from_f64(x)
    }
}

impl std::ops::Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, other: SignedLog) -> SignedLog {
        if self.sign == 0.0 || other.sign == 0.0 {
            return Self::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            log_abs: self.log_abs + other.log_abs,
        }
    }
}

impl std::ops::Div for SignedLog {
    type Output = SignedLog;

    fn div(self, other: SignedLog) -> SignedLog {
        SignedLog {
            sign: self.sign * other.sign,
            log_abs: self.log_abs - other.log_abs,
        }
    }
}

pub fn log_dprime(kappa: &Partition, alpha: f64) -> f64 {
    hooks(kappa)
        .map(|(_, _, a, l)| (alpha * (a as f64 + 1.0) + l as f64).ln())
        .sum()
}

pub fn log_gen_pochhammer(u: f64, kappa: &Partition, alpha: f64) -> SignedLog {
    kappa.cells().fold(SignedLog::ONE, |acc, (i, j)| {
        acc.mul_f64(u - (i - 1) as f64 / alpha + (j - 1) as f64)
    })
}

pub fn log_p_principal(kappa: &Partition, alpha: f64, n: usize) -> Result<f64> {
    check_len(kappa, n)?;
    Ok(hooks(kappa)
        .map(|(i, j, a, l)| {
            let num = (n + 1 - i) as f64 + alpha * (j - 1) as f64;
            let den = alpha * a as f64 + (l + 1) as f64;
            num.ln() - den.ln()
        })
        .sum())
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|m| (m as f64).ln()).sum()
}

pub fn log_c_principal_term(kappa: &Partition, alpha: f64, n: usize, t: f64) -> Result<SignedLog> {
    let k = kappa.weight();
    let log_c = k as f64 * alpha.ln() + ln_factorial(k) - log_dprime(kappa, alpha)
        + log_p_principal(kappa, alpha, n)?;
    let tk = SignedLog::from_f64(t);
    let tpow = if k == 0 {
        SignedLog::ONE
    } else if tk.sign == 0.0 {
        SignedLog::ZERO
    } else {
        SignedLog {
            sign: if k.is_multiple_of(2) { 1.0 } else { tk.sign },
            log_abs: k as f64 * tk.log_abs,
        }
    };
    Ok(tpow
        * SignedLog {
            sign: 1.0,
            log_abs: log_c,
        })
}

/// `f64` evaluation of C_κ(t·1^N), switching to log accumulation for
/// weights above [`LOG_WEIGHT_THRESHOLD`].
pub fn c_principal_term_f64(kappa: &Partition, alpha: f64, n: usize, t: f64) -> Result<f64> {
    if kappa.weight() > LOG_WEIGHT_THRESHOLD {
        Ok(log_c_principal_term(kappa, alpha, n, t)?.to_f64())
    } else {
        c_principal_term(kappa, &Alpha::new(alpha)?, n, &t)
    }
}

/// Exact rational helper: p/q.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl Alpha<BigRational> {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        Alpha::new(rat(p, q))
    }
}

impl Alpha<f64> {
    pub fn real(alpha: f64) -> Result<Self> {
        Alpha::new(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn dprime_examples() {
        let a2 = Alpha::rational(2, 1).unwrap();
        assert_eq!(dprime(&Partition::empty(), &a2), rat(1, 1));
        assert_eq!(dprime(&p(&[2, 1]), &a2), rat(20, 1));
        assert_eq!(dprime(&p(&[1]), &Alpha::rational(1, 1).unwrap()), rat(1, 1));
    }

    #[test]
    fn dprime_at_one_is_hook_product() {
        let one = Alpha::rational(1, 1).unwrap();
        // hooks of (3,2,1): 5,3,1,3,1,1
        assert_eq!(dprime(&p(&[3, 2, 1]), &one), rat(45, 1));
        for kappa in enumerate_partitions(7, 7) {
            let conj = kappa.conjugate();
            let hooks: usize = kappa
                .cells()
                .map(|(i, j)| kappa.part(i) - j + conj.part(j) - i + 1)
                .product();
            assert_eq!(dprime(&kappa, &one), rat(hooks as i64, 1));
        }
    }

    #[test]
    fn pochhammer_examples() {
        let a2 = Alpha::rational(2, 1).unwrap();
        assert_eq!(gen_pochhammer(&rat(5, 3), &Partition::empty(), &a2, 1).unwrap(), rat(1, 1));
        assert_eq!(gen_pochhammer(&rat(2, 1), &p(&[3]), &a2, 1).unwrap(), rat(24, 1));
        assert_eq!(gen_pochhammer(&rat(3, 1), &p(&[1, 1]), &a2, 2).unwrap(), rat(15, 2));
        assert!(gen_pochhammer(&rat(3, 1), &p(&[1, 1]), &a2, 1).is_err());
        // vanishing cell (2,1) at u = 1/2
        assert_eq!(gen_pochhammer(&rat(1, 2), &p(&[2, 1]), &a2, 2).unwrap(), rat(0, 1));
        assert_eq!(pochhammer_zero_cell(&rat(1, 2), &p(&[2, 1]), &a2), Some((2, 1)));
    }

    #[test]
    fn principal_examples() {
        for (num, den) in [(1, 2), (1, 1), (2, 1), (3, 1)] {
            let al = Alpha::rational(num, den).unwrap();
            for n in 1..5 {
                assert_eq!(p_principal(&p(&[1]), &al, n).unwrap(), rat(n as i64, 1));
            }
        }
        let one = Alpha::rational(1, 1).unwrap();
        assert_eq!(p_principal(&p(&[2]), &one, 3).unwrap(), rat(6, 1));
        let two = Alpha::rational(2, 1).unwrap();
        assert_eq!(p_principal(&p(&[1, 1]), &two, 2).unwrap(), rat(1, 1));
        assert!(matches!(
            p_principal(&p(&[1, 1, 1]), &two, 2),
            Err(Error::TooManyParts { .. })
        ));
    }

    #[test]
    fn c_term_examples() {
        let al = Alpha::real(0.7).unwrap();
        assert_eq!(c_principal_term(&Partition::empty(), &al, 3, &0.4).unwrap(), 1.0);
        assert_relative_eq!(
            c_principal_term(&p(&[1]), &al, 5, &0.3).unwrap(),
            1.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn c_sum_rule() {
        for (num, den) in [(1, 2), (1, 1), (2, 1), (3, 1)] {
            let al = Alpha::rational(num, den).unwrap();
            for n in 1..=4usize {
                for k in 0..=6usize {
                    let total = enumerate_partitions(k, n)
                        .map(|kappa| c_principal(&kappa, &al, n).unwrap())
                        .fold(rat(0, 1), |a, b| a + b);
                    assert_eq!(total, rat((n as i64).pow(k as u32), 1));
                }
            }
        }
    }

    #[test]
    fn log_path_matches_direct() {
        for kappa in enumerate_partitions(12, 4) {
            let direct = c_principal_term(&kappa, &Alpha::real(1.3).unwrap(), 4, &-0.8).unwrap();
            let logged = log_c_principal_term(&kappa, 1.3, 4, -0.8).unwrap().to_f64();
            assert_relative_eq!(direct, logged, max_relative = 1e-12);
            let lp = log_gen_pochhammer(-2.25, &kappa, 1.3).to_f64();
            let dp = gen_pochhammer(&-2.25, &kappa, &Alpha::real(1.3).unwrap(), 4).unwrap();
            assert_relative_eq!(lp, dp, max_relative = 1e-12);
        }
        // large weights stay finite
        let big = p(&[60, 40, 20]);
        let v = c_principal_term_f64(&big, 0.5, 3, 0.9).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(Alpha::real(0.0).is_err());
        assert!(Alpha::real(-1.0).is_err());
        assert!(Alpha::real(f64::INFINITY).is_err());
        assert_eq!(Alpha::from_beta(4.0).unwrap().value(), &0.5);
    }

    fn gamma_ratio(u: f64, kappa: &Partition, alpha: f64, n: usize) -> f64 {
        use statrs::function::gamma::gamma;
        (1..=n)
            .map(|j| {
                let s = u - (j - 1) as f64 / alpha;
                gamma(s + kappa.part(j) as f64) / gamma(s)
            })
            .product()
    }

    fn small_partition() -> impl Strategy<Value = Partition> {
        proptest::collection::vec(0usize..5, 1..5).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Partition::new(v).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn pochhammer_matches_gamma_ratio(
            u in -6.0f64..8.0,
            kappa in small_partition(),
            alpha in 0.3f64..4.0,
            extra in 0usize..3,
        ) {
            let n = kappa.len().max(1) + extra;
            let args_ok = (1..=n).all(|j| {
                let s = u - (j - 1) as f64 / alpha;
                (0..=kappa.part(j)).all(|m| {
                    let x = s + m as f64;
                    x > 0.0 || (x - x.round()).abs() > 1e-3
                })
            });
            prop_assume!(args_ok);
            let cell = gen_pochhammer(&u, &kappa, &Alpha::real(alpha).unwrap(), n).unwrap();
            let gr = gamma_ratio(u, &kappa, alpha, n);
            prop_assert!((cell - gr).abs() <= 1e-12 * gr.abs().max(1e-300),
                "cell {} gamma {}", cell, gr);
        }

        #[test]
        fn dprime_positive(kappa in small_partition(), alpha in 0.01f64..50.0) {
            let d = dprime(&kappa, &Alpha::real(alpha).unwrap());
            prop_assert!(d > 0.0 && d.is_finite());
        }
    }
}
