//! Cross-checks between the series, the exact oracles, quadrature and
//! Monte Carlo, grouped into suites.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{bk_delta, circular_exponent, classify_2f1};
use crate::error::{Error, Result};
use crate::fit::{fit_divergence, log_spaced_grid, Evaluator, FitReport, MomentFamily};
use crate::hyperg::{hyp1f0_equal, series_term, Hyp2F1Params};
use crate::integrate::mcmc::{linear_statistic_check, mc_moment, ChainConfig, LinearStatistic};
use crate::integrate::quadrature::quadrature_auto;
use crate::jack::{p_principal, rat, Alpha};
use crate::jack_oracle::{binomial_identity_check, binomial_truncation_bound, jack_evaluate, jack_monomial_expansion};
use crate::param::Param;
use crate::partitions::{enumerate_partitions, Partition};
use crate::rmt::{circular_moment, group_moment, jacobi_moment, GroupFamily, MomentQuery};
use crate::szego::circular_limit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Jack,
    Binomial,
    Quadrature,
    Mc,
    Exponents,
    /// ε-sweep fits of the divergence exponent
    Fit,
    Limit,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Jack => "jack",
            Suite::Binomial => "binomial",
            Suite::Quadrature => "quadrature",
            Suite::Mc => "mc",
            Suite::Exponents => "exponents",
            Suite::Fit => "fit",
            Suite::Limit => "limit",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "jack" => Suite::Jack,
            "binomial" => Suite::Binomial,
            "quadrature" => Suite::Quadrature,
            "mc" => Suite::Mc,
            "exponents" => Suite::Exponents,
            "fit" => Suite::Fit,
            "limit" => Suite::Limit,
            "all" => Suite::All,
            _ => return Err(Error::InvalidParameter(format!("unknown suite '{s}'"))),
        })
    }
}

/// Outcome of one check. `measured` and `tolerance` share units, stated in
/// `detail`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    fn new(name: &str, measured: f64, tolerance: f64, passed: bool, detail: String, start: Instant) -> Self {
        Check {
            name: name.into(),
            passed,
            measured,
            tolerance,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn failed(name: &str, err: Error) -> Self {
        Check {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            tolerance: f64::NAN,
            detail: format!("error: {err}"),
            seconds: 0.0,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// ₁F₀ at equal arguments against (1 − t)^{−aN}.
pub fn binomial_grid() -> Result<Check> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut all_conv = true;
    for a in [0.7, 2.0] {
        for alpha in [0.5, 1.0, 2.0] {
            for n in 1..=4 {
                for t in [0.2, 0.6] {
                    let r = hyp1f0_equal(a, alpha, n, t, 1e-12)?;
                    all_conv &= r.converged;
                    worst = worst.max(rel(r.value, (1.0 - t).powf(-a * n as f64)));
                }
            }
        }
    }
    Ok(Check::new(
        "binomial_equal_arguments",
        worst,
        1e-10,
        all_conv && worst <= 1e-10,
        format!("max relative error over 96 points (all converged: {all_conv})"),
        start,
    ))
}

/// Exact truncated expansion at distinct arguments against the product.
pub fn binomial_distinct() -> Result<Check> {
    let start = Instant::now();
    let x = [rat(1, 4), rat(-1, 5), rat(1, 10)];
    let bound = binomial_truncation_bound(1.5, &[0.25, -0.2, 0.1], 8);
    let mut worst: f64 = 0.0;
    for (p, q) in [(1, 2), (1, 1), (2, 1), (3, 1)] {
        let (l, r) = binomial_identity_check(&rat(3, 2), &rat(p, q), &x, 8)?;
        worst = worst.max((l - r).abs());
    }
    Ok(Check::new(
        "binomial_distinct_arguments",
        worst,
        bound,
        worst <= bound * (1.0 + 1e-9),
        "max |truncated expansion - product| at degree 8 vs the majorant tail".into(),
        start,
    ))
}

/// Principal specialisation against the exact monomial expansion at 1^N.
pub fn jack_lock() -> Result<Check> {
    let start = Instant::now();
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    for (p, q) in [(1, 2), (1, 1), (2, 1), (3, 1)] {
        let alpha = rat(p, q);
        let al = Alpha::new(alpha.clone())?;
        for k in 0..=6 {
            for kappa in enumerate_partitions(k, k.max(1)) {
                let exp = jack_monomial_expansion(&kappa, &alpha)?;
                for n in kappa.len().max(1)..=4 {
                    let ones = vec![BigRational::one(); n];
                    compared += 1;
                    if jack_evaluate(&exp, &ones) != p_principal(&kappa, &al, n)? {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    Ok(Check::new(
        "jack_principal_specialisation",
        mismatches as f64,
        0.0,
        mismatches == 0,
        format!("exact mismatches among {compared} (kappa, N, alpha) cases"),
        start,
    ))
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.random_range(-20..=20), rng.random_range(1..=7))
}

/// N = 1 terms against the classical Gauss series, exactly.
pub fn n1_reduction(seed: u64) -> Result<Check> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..50 {
        let a = random_rational(&mut rng);
        let b = random_rational(&mut rng);
        let c = loop {
            let c = random_rational(&mut rng);
            let bad = c.is_integer() && c <= BigRational::zero();
            if !bad {
                break c;
            }
        };
        let alpha = rat(rng.random_range(1..=9), rng.random_range(1..=4));
        let t = rat(rng.random_range(-9..=9), 10);
        let params = Hyp2F1Params {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
            alpha,
            n: 1,
            t: t.clone(),
        };
        let mut classical = BigRational::one();
        for k in 0..20usize {
            let term = series_term(&Partition::new(vec![k])?, &params)?.value;
            if term != classical {
                mismatches += 1;
            }
            let kk = rat(k as i64, 1);
            classical = classical * (&a + &kk) * (&b + &kk) / ((&c + &kk) * (kk + BigRational::one())) * &t;
        }
    }
    Ok(Check::new(
        "n1_classical_terms",
        mismatches as f64,
        0.0,
        mismatches == 0,
        "exact mismatches among 50 parameter triples x 20 terms".into(),
        start,
    ))
}

/// Circular series against quadrature, N ∈ {2, 3}.
pub fn circular_vs_quadrature() -> Result<Check> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for n in [2, 3] {
        for beta in [1.0, 2.0, 4.0] {
            for mu in [-1.0, -0.75, 0.5] {
                for r in [0.3, 0.6] {
                    let q = MomentQuery::circular(beta, n, mu, r);
                    let s = circular_moment(&q, 1e-14)?.value;
                    let quad = quadrature_auto(&q)?.value;
                    let e = rel(s, quad);
                    if e > worst {
                        worst = e;
                        at = format!("N={n} beta={beta} mu={mu} |z|={r}");
                    }
                }
            }
        }
    }
    Ok(Check::new(
        "circular_series_vs_quadrature",
        worst,
        1e-8,
        worst <= 1e-8,
        format!("max relative error over 36 points (worst at {at})"),
        start,
    ))
}

fn mc_cfg(seed: u64, total: usize) -> ChainConfig {
    ChainConfig {
        n_samples: total / 4,
        burn_in: 2000,
        thinning: 1,
        seed,
        chains: 4,
        initial_step: 0.5,
    }
}

/// Circular series against Monte Carlo at N = 8, β = 2.
pub fn circular_vs_mc(seed: u64, samples: usize) -> Result<Check> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut flagged = 0;
    for mu in [-1.0, -0.75, 0.5] {
        for r in [0.3, 0.6] {
            let q = MomentQuery::circular(2.0, 8, mu, r);
            let s = circular_moment(&q, 1e-12)?.value;
            let m = mc_moment(&q, &mc_cfg(seed, samples))?;
            flagged += m.flagged as usize;
            worst = worst.max((m.estimate - s).abs() / m.std_error);
        }
    }
    Ok(Check::new(
        "circular_series_vs_mc",
        worst,
        3.0,
        worst <= 3.0,
        format!("max |MC - series| in standard errors over 6 points, {samples} samples each ({flagged} flagged)"),
        start,
    ))
}

/// Jacobi series against Monte Carlo at N = 4.
pub fn jacobi_vs_mc(seed: u64, samples: usize) -> Result<Check> {
    let start = Instant::now();
    let q = MomentQuery::jacobi(0.5, 0.5, 2.0, 4, -0.6, 1.5);
    let s = jacobi_moment(&q, 1e-12)?.value;
    let m = mc_moment(&q, &mc_cfg(seed, samples))?;
    let z = (m.estimate - s).abs() / m.std_error;
    Ok(Check::new(
        "jacobi_series_vs_mc",
        z,
        3.0,
        z <= 3.0,
        format!("|MC - series| in standard errors (series {s:.10}, MC {:.6} +- {:.2e})", m.estimate, m.std_error),
        start,
    ))
}

/// Jacobi series against endpoint-weighted quadrature, N = 2.
pub fn jacobi_vs_quadrature() -> Result<Check> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.0, 0.0), (0.5, 0.5), (0.5, -0.5)] {
        let q = MomentQuery::jacobi(a, b, 2.0, 2, -0.6, 1.5);
        worst = worst.max(rel(jacobi_moment(&q, 1e-13)?.value, quadrature_auto(&q)?.value));
    }
    Ok(Check::new(
        "jacobi_series_vs_quadrature",
        worst,
        1e-6,
        worst <= 1e-6,
        "max relative error over (a,b) in {(0,0),(1/2,1/2),(1/2,-1/2)}".into(),
        start,
    ))
}

/// Group moments through the Jacobi reduction against direct quadrature
/// over the angles.
pub fn group_vs_quadrature() -> Result<Check> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (fam, n, label) in [
        (GroupFamily::Sp, 1, "Sp(2)"),
        (GroupFamily::OPlusEven, 2, "O+(4)"),
        (GroupFamily::OMinusEven, 2, "O-(4)"),
    ] {
        let s = group_moment(fam, n, -0.6, 0.5, 1e-13)?.value;
        let d = quadrature_auto(&MomentQuery::group(fam, n, -0.6, 0.5))?.value;
        let e = rel(s, d);
        parts.push(format!("{label} {e:.1e}"));
        worst = worst.max(e);
    }
    Ok(Check::new(
        "group_pipeline_vs_quadrature",
        worst,
        1e-6,
        worst <= 1e-6,
        format!("relative errors: {}", parts.join(", ")),
        start,
    ))
}

/// bk_delta and the classification of the circular series against the
/// circular exponent rule on 500 non-lattice points.
pub fn exponent_identity() -> Result<Check> {
    let start = Instant::now();
    let n = 30;
    let mut worst: f64 = 0.0;
    let mut disagreements = 0;
    for (bp, bq) in [(1, 2), (1, 1), (2, 1), (3, 1), (4, 1)] {
        let beta = Param::ratio(bp, bq);
        let bf = beta.to_f64();
        for i in 0..100i64 {
            // k = 1 + 7(2i+1)/200: odd numerator, so (k − 1)/β is never an integer
            let k = Param::int(1) + Param::ratio(7 * (2 * i + 1), 200);
            let mu = -(k.clone() * Param::ratio(1, 2));
            let circ = circular_exponent(&mu, &beta, n)?;
            worst = worst.max((bk_delta(k.to_f64(), bf)? - circ.delta).abs());
            let al = Param::int(2) / beta.clone();
            let c = Param::int(1) + beta.clone() * Param::ratio(n as i64 - 1, 2);
            let g = classify_2f1(&-mu.clone(), &-mu, &c, &al, n)?;
            if (g.regime, g.j, g.log_flag) != (circ.regime, circ.j, circ.log_flag) || g.delta != circ.delta {
                disagreements += 1;
            }
        }
    }
    Ok(Check::new(
        "exponent_identities",
        worst,
        1e-12,
        worst <= 1e-12 && disagreements == 0,
        format!("max |bk_delta - delta| over 500 points; classification disagreements: {disagreements}"),
        start,
    ))
}

fn circular_fit(mu: Param, eps: (f64, f64), evaluator: Evaluator) -> Result<FitReport> {
    let n = 30;
    let pred = circular_exponent(&mu, &Param::int(2), n)?;
    let fam = MomentFamily::Circular {
        beta: 2.0,
        n,
        mu: mu.to_f64(),
    };
    fit_divergence(&fam, &log_spaced_grid(eps.0, eps.1, 10)?, &pred, 1e-12, evaluator)
}

fn unconverged(r: &FitReport) -> usize {
    r.points.iter().filter(|p| !p.converged).count()
}

/// ε-sweeps at β = 2, N = 30 on ten points in [1e−3, 1e−2].
pub fn divergence_fits() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let start = Instant::now();
    let series = circular_fit(Param::int(-1), (1e-2, 1e-3), Evaluator::Series)?;
    let toep = circular_fit(Param::int(-1), (1e-2, 1e-3), Evaluator::Toeplitz)?;
    let worst = rel(series.fitted_delta, 1.0).max(rel(toep.fitted_delta, 1.0));
    out.push(Check::new(
        "fit_power_mu_-1",
        worst,
        0.03,
        worst <= 0.03,
        format!(
            "relative error of fitted delta vs 1 (series {:.5}, {} unconverged; toeplitz {:.5})",
            series.fitted_delta,
            unconverged(&series),
            toep.fitted_delta
        ),
        start,
    ));

    let start = Instant::now();
    let lg = circular_fit(Param::ratio(-3, 2), (1e-2, 1e-3), Evaluator::Auto)?;
    let e = rel(lg.fitted_delta, 2.0);
    let deeper = circular_fit(Param::ratio(-3, 2), (1e-3, 1e-4), Evaluator::Auto)
        .map(|r| format!("{:.4}", r.fitted_delta))
        .unwrap_or_else(|err| err.to_string());
    out.push(Check::new(
        "fit_log_mu_-3/2",
        e,
        0.05,
        e <= 0.05 && lg.fitted_log_coeff > 0.0,
        format!(
            "relative error of fitted delta vs 2 (delta {:.4}, log coefficient {:.4}, {} unconverged); same fit on [1e-4, 1e-3] gives {deeper}",
            lg.fitted_delta,
            lg.fitted_log_coeff,
            unconverged(&lg)
        ),
        start,
    ));

    let start = Instant::now();
    let bd = circular_fit(Param::ratio(-1, 4), (1e-2, 1e-3), Evaluator::Auto)?;
    out.push(Check::new(
        "fit_bounded_mu_-1/4",
        bd.fitted_delta.abs(),
        0.05,
        bd.fitted_delta.abs() <= 0.05,
        format!("|fitted delta| ({} unconverged)", unconverged(&bd)),
        start,
    ));
    Ok(out)
}

/// Finite-N circular moments against (1 − |z|²)^{−2μ²/β}.
pub fn macroscopic_limit() -> Result<Check> {
    let start = Instant::now();
    let (beta, mu, r) = (2.0, -1.0, 0.6);
    let lim = circular_limit(beta, mu, r)?;
    let mut gaps = Vec::new();
    for n in [8, 16, 32] {
        let v = circular_moment(&MomentQuery::circular(beta, n, mu, r), 1e-14)?.value;
        gaps.push(rel(v, lim));
    }
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let lim1 = circular_limit(beta, 1.0, r)?;
    let gaps1: Vec<String> = [8, 16, 32]
        .iter()
        .map(|&n| {
            circular_moment(&MomentQuery::circular(beta, n, 1.0, r), 1e-14)
                .map(|v| format!("{:.2e}", rel(v.value, lim1)))
                .unwrap_or_else(|e| e.to_string())
        })
        .collect();
    Ok(Check::new(
        "macroscopic_limit",
        gaps[2],
        0.02,
        monotone && gaps[2] < 0.02,
        format!(
            "relative gap at N=32; gaps at N=8,16,32: {:.2e}, {:.2e}, {:.2e} (non-increasing within 1e-12: {monotone}); mu=+1 gaps {}",
            gaps[0],
            gaps[1],
            gaps[2],
            gaps1.join(", ")
        ),
        start,
    ))
}

/// Variance of A(z) = Σ log|z − e^{iθ}|² at β = 2 and β = 4.
pub fn fluctuations(seed: u64, samples: usize) -> Result<(Check, Check)> {
    let start = Instant::now();
    let (n, r) = (32, 0.5);
    let run = |beta: f64, s: u64| -> Result<LinearStatistic> { linear_statistic_check(beta, n, r, &mc_cfg(s, samples)) };
    let s2 = run(2.0, seed)?;
    let e2 = rel(s2.variance, s2.predicted_variance);
    let s2_beta = 2.0;
    let alt_a = (1.0 - r * r).ln().powi(2);
    let alt_b = -(2.0 / s2_beta) * (1.0 - r * r).ln();
    let first = Check::new(
        "fluctuation_variance_beta_2",
        e2,
        0.10,
        e2 <= 0.10,
        format!(
            "relative error of empirical variance {:.4} (+- {:.4}) vs -(4/beta)log(1-|z|^2) = {:.4}; alternatives log(1-|z|^2)^2 = {alt_a:.4}, -(2/beta)log(1-|z|^2) = {alt_b:.4}",
            s2.variance, s2.variance_std_error, s2.predicted_variance
        ),
        start,
    );
    let start = Instant::now();
    let s4 = run(4.0, seed.wrapping_add(1))?;
    let ratio = s2.variance / s4.variance;
    let se = ratio * ((s2.variance_std_error / s2.variance).powi(2) + (s4.variance_std_error / s4.variance).powi(2)).sqrt();
    let z = (ratio - 2.0).abs() / se;
    let second = Check::new(
        "fluctuation_scaling_beta_4",
        z,
        3.0,
        z <= 3.0,
        format!(
            "|var(beta=2)/var(beta=4) - 2| in standard errors (ratio {ratio:.4} +- {se:.4}; beta=4 variance {:.4} vs predicted {:.4})",
            s4.variance, s4.predicted_variance
        ),
        start,
    );
    Ok((first, second))
}

/// Options for [`run_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Monte Carlo samples per estimate.
    pub mc_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 20240601,
            mc_samples: 100_000,
        }
    }
}

fn collect(out: &mut Vec<Check>, name: &str, r: Result<Check>) {
    out.push(r.unwrap_or_else(|e| Check::failed(name, e)));
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Jack) {
        collect(&mut out, "jack_principal_specialisation", jack_lock());
        collect(&mut out, "n1_classical_terms", n1_reduction(opts.seed));
    }
    if want(Suite::Binomial) {
        collect(&mut out, "binomial_equal_arguments", binomial_grid());
        collect(&mut out, "binomial_distinct_arguments", binomial_distinct());
    }
    if want(Suite::Quadrature) {
        collect(&mut out, "circular_series_vs_quadrature", circular_vs_quadrature());
        collect(&mut out, "jacobi_series_vs_quadrature", jacobi_vs_quadrature());
        collect(&mut out, "group_pipeline_vs_quadrature", group_vs_quadrature());
    }
    if want(Suite::Mc) {
        collect(&mut out, "circular_series_vs_mc", circular_vs_mc(opts.seed, opts.mc_samples));
        collect(&mut out, "jacobi_series_vs_mc", jacobi_vs_mc(opts.seed, opts.mc_samples));
        match fluctuations(opts.seed, opts.mc_samples) {
            Ok((a, b)) => out.extend([a, b]),
            Err(e) => out.push(Check::failed("fluctuations", e)),
        }
    }
    if want(Suite::Exponents) {
        collect(&mut out, "exponent_identities", exponent_identity());
    }
    if want(Suite::Fit) {
        match divergence_fits() {
            Ok(v) => out.extend(v),
            Err(e) => out.push(Check::failed("divergence_fits", e)),
        }
    }
    if want(Suite::Limit) {
        collect(&mut out, "macroscopic_limit", macroscopic_limit());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Jack, Suite::Binomial, Suite::Quadrature, Suite::Mc, Suite::Exponents, Suite::Fit, Suite::Limit, Suite::All] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn quick_suites_pass() {
        for c in run_suite(Suite::Jack, &VerifyOptions::default())
            .into_iter()
            .chain(run_suite(Suite::Limit, &VerifyOptions::default()))
        {
            assert!(c.passed, "{c:?}");
        }
    }
}
