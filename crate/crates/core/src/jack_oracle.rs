//! Exact Jack polynomials in the monomial basis, for small degree.
//!
//! Coefficients come from the eigenoperator recursion
//!
//! ```text
//! (ρ_κ − ρ_μ) c_κμ = (2/α) Σ_{λ} (μ_i − μ_j + 2t) c_κλ
//! ```
//!
//! where λ runs over the partitions obtained from μ by moving `t` boxes
//! from row `j` up to row `i < j`, and ρ_κ = Σ κ_i (κ_i − 1 − (2/α)(i − 1)).
//! Partitions are visited in reverse-lexicographic order, which refines
//! dominance, so every λ on the right is already known.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::jack::{dprime, gen_pochhammer, Alpha};
use crate::partitions::{dominance_leq, enumerate_partitions, Partition};

pub const DEFAULT_DEGREE_CAP: usize = 8;

/// P_κ^(α) = Σ_μ c_κμ m_μ.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialExpansion {
    pub kappa: Partition,
    pub alpha: BigRational,
    pub coefficients: BTreeMap<Partition, BigRational>,
}

impl MonomialExpansion {
    pub fn coefficient(&self, mu: &Partition) -> BigRational {
        self.coefficients
            .get(mu)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Text dump, one `κ;μ;p/q` line per nonzero coefficient, in
    /// reverse-lexicographic order of μ.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (mu, c) in self.coefficients.iter().rev() {
            let _ = writeln!(out, "{};{};{}/{}", self.kappa, mu, c.numer(), c.denom());
        }
        out
    }
}

fn rho(kappa: &Partition, alpha: &BigRational) -> BigRational {
    let two_over = BigRational::from_integer(BigInt::from(2)) / alpha;
    kappa
        .parts()
        .iter()
        .enumerate()
        .map(|(r, &k)| {
            let k = BigRational::from_integer(BigInt::from(k));
            let shift = two_over.clone() * BigRational::from_integer(BigInt::from(r));
            k.clone() * (k - BigRational::one() - shift)
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Partitions reached from μ by one raising move, with the move weight
/// μ_i − μ_j + 2t.
fn raisings(mu: &Partition) -> Vec<(Partition, i64)> {
    let parts = mu.parts();
    let mut out = Vec::new();
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            for t in 1..=parts[j] {
                let mut v = parts.to_vec();
                v[i] += t;
                v[j] -= t;
                v.sort_unstable_by(|a, b| b.cmp(a));
                let lam = Partition::new(v).expect("sorted parts");
                out.push((lam, parts[i] as i64 - parts[j] as i64 + 2 * t as i64));
            }
        }
    }
    out
}

pub fn jack_monomial_expansion(kappa: &Partition, alpha: &BigRational) -> Result<MonomialExpansion> {
    jack_monomial_expansion_capped(kappa, alpha, DEFAULT_DEGREE_CAP)
}

pub fn jack_monomial_expansion_capped(
    kappa: &Partition,
    alpha: &BigRational,
    cap: usize,
) -> Result<MonomialExpansion> {
    let k = kappa.weight();
    if k > cap {
        return Err(Error::DegreeCap { weight: k, cap });
    }
    if !alpha.is_positive() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let two_over = BigRational::from_integer(BigInt::from(2)) / alpha;
    let rho_k = rho(kappa, alpha);
    let mut coeffs: BTreeMap<Partition, BigRational> = BTreeMap::new();
    coeffs.insert(kappa.clone(), BigRational::one());
    for mu in enumerate_partitions(k, k.max(1)) {
        if &mu >= kappa || !dominance_leq(&mu, kappa)? {
            continue;
        }
        let diff = rho_k.clone() - rho(&mu, alpha);
        if diff.is_zero() {
            return Err(Error::DegenerateAlpha {
                kappa: kappa.to_string(),
                mu: mu.to_string(),
                alpha: alpha.to_string(),
            });
        }
        let mut sum = BigRational::zero();
        for (lam, w) in raisings(&mu) {
            if let Some(c) = coeffs.get(&lam) {
                sum += c * BigRational::from_integer(BigInt::from(w));
            }
        }
        let c = two_over.clone() * sum / diff;
        if !c.is_zero() {
            coeffs.insert(mu, c);
        }
    }
    Ok(MonomialExpansion {
        kappa: kappa.clone(),
        alpha: alpha.clone(),
        coefficients: coeffs,
    })
}

/// Distinct permutations of `v`, starting from its sorted order.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Monomial symmetric polynomial m_μ(x).
pub fn monomial_evaluate(mu: &Partition, x: &[BigRational]) -> BigRational {
    let n = x.len();
    if mu.len() > n {
        return BigRational::zero();
    }
    let mut exps: Vec<usize> = (1..=n).map(|i| mu.part(i)).collect();
    exps.sort_unstable();
    let mut total = BigRational::zero();
    loop {
        let mut term = BigRational::one();
        for (xi, &e) in x.iter().zip(&exps) {
            if e > 0 {
                term *= num_traits::pow(xi.clone(), e);
            }
        }
        total += term;
        if !next_permutation(&mut exps) {
            break;
        }
    }
    total
}

pub fn jack_evaluate(exp: &MonomialExpansion, x: &[BigRational]) -> BigRational {
    exp.coefficients
        .iter()
        .map(|(mu, c)| c * monomial_evaluate(mu, x))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Number of semistandard tableaux of shape λ and content μ.
pub fn kostka(lambda: &Partition, mu: &Partition) -> u64 {
    if lambda.weight() != mu.weight() {
        return 0;
    }
    // Fill letters 1, 2, … as successive horizontal strips.
    fn go(shape: &[usize], lambda: &[usize], content: &[usize]) -> u64 {
        let Some((&m, rest)) = content.split_first() else {
            return u64::from(shape == lambda);
        };
        let mut count = 0;
        let rows = lambda.len();
        let mut next = shape.to_vec();
        next.resize(rows, 0);
        strips(&mut next, shape, lambda, 0, m, rest, &mut count);
        count
    }
    fn strips(
        next: &mut Vec<usize>,
        shape: &[usize],
        lambda: &[usize],
        row: usize,
        left: usize,
        rest: &[usize],
        count: &mut u64,
    ) {
        if row == lambda.len() {
            if left == 0 {
                *count += go(next, lambda, rest);
            }
            return;
        }
        let base = shape.get(row).copied().unwrap_or(0);
        // horizontal strip: new row end may not pass the old end of the row above
        let above = if row == 0 { usize::MAX } else { shape.get(row - 1).copied().unwrap_or(0) };
        let hi = lambda[row].min(above);
        for end in base..=hi.max(base) {
            let add = end - base;
            if add > left || end > lambda[row] {
                break;
            }
            next[row] = end;
            strips(next, shape, lambda, row + 1, left - add, rest, count);
        }
        next[row] = base;
    }
    let content: Vec<usize> = mu.parts().to_vec();
    go(&vec![0; lambda.len()], lambda.parts(), &content)
}

/// s_λ in the monomial basis, via Kostka numbers.
pub fn schur_monomial_expansion(lambda: &Partition) -> BTreeMap<Partition, BigRational> {
    let k = lambda.weight();
    enumerate_partitions(k, k.max(1))
        .filter_map(|mu| {
            let c = kostka(lambda, &mu);
            (c > 0).then(|| (mu, BigRational::from_integer(BigInt::from(c))))
        })
        .collect()
}

/// Both sides of Σ_κ [a]_κ C_κ(x)/|κ|! = ∏ (1 − x_j)^(−a), the left side
/// truncated at `weight_cap`.
pub fn binomial_identity_check(
    a: &BigRational,
    alpha: &BigRational,
    x: &[BigRational],
    weight_cap: usize,
) -> Result<(f64, f64)> {
    if x.iter().any(|xi| xi.abs() >= BigRational::one()) {
        return Err(Error::InvalidParameter("all |x_i| must be below 1".into()));
    }
    if weight_cap > DEFAULT_DEGREE_CAP {
        return Err(Error::DegreeCap {
            weight: weight_cap,
            cap: DEFAULT_DEGREE_CAP,
        });
    }
    let n = x.len();
    let al = Alpha::new(alpha.clone())?;
    let mut lhs = BigRational::zero();
    for k in 0..=weight_cap {
        let alpha_k = num_traits::pow(alpha.clone(), k);
        for kappa in enumerate_partitions(k, n.max(1)) {
            let poch = gen_pochhammer(a, &kappa, &al, n.max(1))?;
            if poch.is_zero() {
                continue;
            }
            let p = jack_evaluate(&jack_monomial_expansion(&kappa, alpha)?, x);
            // C_κ(x)/|κ|! = α^k P_κ(x) / d'_κ
            lhs += poch * alpha_k.clone() * p / dprime(&kappa, &al);
        }
    }
    let af = a.to_f64().unwrap_or(f64::NAN);
    let rhs = x
        .iter()
        .map(|xi| (1.0 - xi.to_f64().unwrap_or(f64::NAN)).powf(-af))
        .product();
    Ok((lhs.to_f64().unwrap_or(f64::NAN), rhs))
}

/// Bound on the truncation error of [`binomial_identity_check`] for a ≥ 0:
/// the Taylor mass above degree `cap` of ∏ (1 − |x_j|)^(−a).
pub fn binomial_truncation_bound(a: f64, x: &[f64], cap: usize) -> f64 {
    let mut poly = vec![0.0; cap + 1];
    poly[0] = 1.0;
    for &xj in x {
        let y = xj.abs();
        let mut coef = vec![1.0; cap + 1];
        for m in 1..=cap {
            coef[m] = coef[m - 1] * (a + m as f64 - 1.0) / m as f64 * y;
        }
        let mut next = vec![0.0; cap + 1];
        for (i, pi) in poly.iter().enumerate() {
            for (m, cm) in coef.iter().enumerate().take(cap + 1 - i) {
                next[i + m] += pi * cm;
            }
        }
        poly = next;
    }
    let full: f64 = x.iter().map(|v| (1.0 - v.abs()).powf(-a)).product();
    full - poly.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jack::{p_principal, rat};
    use proptest::prelude::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn ones(n: usize) -> Vec<BigRational> {
        vec![rat(1, 1); n]
    }

    const ALPHAS: [(i64, i64); 4] = [(1, 2), (1, 1), (2, 1), (3, 1)];

    #[test]
    fn low_degree_expansions() {
        let a = rat(7, 3);
        let e1 = jack_monomial_expansion(&p(&[1]), &a).unwrap();
        assert_eq!(e1.coefficients.len(), 1);
        let e11 = jack_monomial_expansion(&p(&[1, 1]), &a).unwrap();
        assert_eq!(e11.coefficients.len(), 1);
        let e2 = jack_monomial_expansion(&p(&[2]), &a).unwrap();
        assert_eq!(e2.coefficient(&p(&[1, 1])), rat(2, 1) / (rat(1, 1) + a.clone()));
        let s2 = jack_monomial_expansion(&p(&[2]), &rat(1, 1)).unwrap();
        assert_eq!(s2.coefficient(&p(&[1, 1])), rat(1, 1));
    }

    #[test]
    fn degree_three_closed_forms() {
        let a = rat(5, 2);
        let one = rat(1, 1);
        let e21 = jack_monomial_expansion(&p(&[2, 1]), &a).unwrap();
        assert_eq!(e21.coefficient(&p(&[1, 1, 1])), rat(6, 1) / (a.clone() + rat(2, 1)));
        let e3 = jack_monomial_expansion(&p(&[3]), &a).unwrap();
        let d = one.clone() + rat(2, 1) * a.clone();
        assert_eq!(e3.coefficient(&p(&[2, 1])), rat(3, 1) / d.clone());
        assert_eq!(
            e3.coefficient(&p(&[1, 1, 1])),
            rat(6, 1) / ((one + a) * d)
        );
    }

    #[test]
    fn degree_cap_enforced() {
        assert!(matches!(
            jack_monomial_expansion(&p(&[5, 4]), &rat(1, 1)),
            Err(Error::DegreeCap { weight: 9, cap: 8 })
        ));
        assert!(jack_monomial_expansion_capped(&p(&[5, 4]), &rat(1, 1), 9).is_ok());
    }

    #[test]
    fn triangular_with_unit_leading_coefficient() {
        for &(n, d) in &ALPHAS {
            let a = rat(n, d);
            for k in 1..=8 {
                for kappa in enumerate_partitions(k, k) {
                    let e = jack_monomial_expansion(&kappa, &a).unwrap();
                    assert_eq!(e.coefficient(&kappa), rat(1, 1));
                    for mu in e.coefficients.keys() {
                        assert!(dominance_leq(mu, &kappa).unwrap(), "{kappa} {mu}");
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_one_is_schur() {
        for k in 1..=6 {
            for lambda in enumerate_partitions(k, k) {
                let e = jack_monomial_expansion(&lambda, &rat(1, 1)).unwrap();
                assert_eq!(e.coefficients, schur_monomial_expansion(&lambda), "{lambda}");
            }
        }
    }

    #[test]
    fn kostka_examples() {
        assert_eq!(kostka(&p(&[2, 1]), &p(&[1, 1, 1])), 2);
        assert_eq!(kostka(&p(&[3, 2]), &p(&[2, 2, 1])), 2);
        assert_eq!(kostka(&p(&[2, 2]), &p(&[1, 1, 1, 1])), 2);
        assert_eq!(kostka(&p(&[2, 1]), &p(&[3])), 0);
    }

    #[test]
    fn evaluation_examples() {
        let e1 = jack_monomial_expansion(&p(&[1]), &rat(2, 1)).unwrap();
        assert_eq!(jack_evaluate(&e1, &[rat(2, 3), rat(5, 7)]), rat(2, 3) + rat(5, 7));
        let s2 = jack_monomial_expansion(&p(&[2]), &rat(1, 1)).unwrap();
        assert_eq!(jack_evaluate(&s2, &ones(3)), rat(6, 1));
        // two-row partition in one variable vanishes
        let e11 = jack_monomial_expansion(&p(&[1, 1]), &rat(1, 1)).unwrap();
        assert_eq!(jack_evaluate(&e11, &[rat(3, 1)]), rat(0, 1));
    }

    #[test]
    fn principal_specialization_lock() {
        for &(num, den) in &ALPHAS {
            let a = rat(num, den);
            let al = Alpha::new(a.clone()).unwrap();
            for k in 0..=6 {
                for kappa in enumerate_partitions(k, k.max(1)) {
                    let e = jack_monomial_expansion(&kappa, &a).unwrap();
                    for n in kappa.len().max(1)..=4 {
                        assert_eq!(
                            p_principal(&kappa, &al, n).unwrap(),
                            jack_evaluate(&e, &ones(n)),
                            "kappa {kappa} n {n} alpha {a}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dump_format() {
        let e = jack_monomial_expansion(&p(&[2]), &rat(2, 1)).unwrap();
        assert_eq!(e.dump(), "(2);(2);1/1\n(2);(1,1);2/3\n");
    }

    #[test]
    fn binomial_examples() {
        let (l, r) = binomial_identity_check(&rat(5, 2), &rat(2, 1), &vec![rat(0, 1); 3], 8).unwrap();
        assert_eq!((l, r), (1.0, 1.0));
        let (_, r) = binomial_identity_check(&rat(2, 1), &rat(1, 1), &[rat(1, 2), rat(1, 2)], 1).unwrap();
        assert_eq!(r, 16.0);
        let partials: Vec<f64> = (0..3)
            .map(|cap| binomial_identity_check(&rat(1, 1), &rat(3, 1), &[rat(1, 2)], cap).unwrap().0)
            .collect();
        assert_eq!(partials, vec![1.0, 1.5, 1.75]);
    }

    #[test]
    fn binomial_distinct_arguments() {
        let x = [rat(1, 4), rat(-1, 5), rat(1, 10)];
        let bound = binomial_truncation_bound(1.5, &[0.25, -0.2, 0.1], 8);
        for &(num, den) in &ALPHAS {
            let (l, r) = binomial_identity_check(&rat(3, 2), &rat(num, den), &x, 8).unwrap();
            assert!((l - r).abs() <= bound * (1.0 + 1e-9), "alpha {num}/{den}: {l} vs {r}, bound {bound}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn symmetric_and_homogeneous(
            parts in proptest::collection::vec(1usize..3, 1..4),
            xs in proptest::collection::vec((-9i64..10, 1i64..6), 3),
            c in (-4i64..5, 1i64..4),
            ai in 0usize..4,
            perm in 0usize..6,
        ) {
            let mut parts = parts;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let kappa = Partition::new(parts).unwrap();
            let (n, d) = ALPHAS[ai];
            let e = jack_monomial_expansion(&kappa, &rat(n, d)).unwrap();
            let x: Vec<BigRational> = xs.iter().map(|&(p, q)| rat(p, q)).collect();
            let v = jack_evaluate(&e, &x);
            let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let y: Vec<BigRational> = orders[perm].iter().map(|&i| x[i].clone()).collect();
            prop_assert_eq!(jack_evaluate(&e, &y), v.clone());
            let c = rat(c.0, c.1);
            let cx: Vec<BigRational> = x.iter().map(|xi| xi * &c).collect();
            prop_assert_eq!(jack_evaluate(&e, &cx), num_traits::pow(c, kappa.weight()) * v);
        }
    }
}
