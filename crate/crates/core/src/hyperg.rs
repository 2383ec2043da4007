//! ₂F₁^(α) and ₁F₀^(α) at equal arguments, summed layer by layer in |κ|.
//!
//! A term factorizes over rows and pairs of rows. With 0-based rows and
//! (x)_k the rising factorial,
//!
//! ```text
//! T(κ) = ∏_i R_i(κ_i) · ∏_{i<j<N} Q_{j−i}(κ_i − κ_j)
//! R_i(k) = t^k ∏_num (u − i/α)_k / ∏_den (v − i/α)_k / (1 + (N−1−i)/α)_k
//! Q_g(d) = (1 + g/α)_d ((g+1)/α)_d / ((1 + (g−1)/α)_d (g/α)_d)
//! ```
//!
//! R and Q are tabulated in log form and grown as the weight increases, so
//! a term costs O(ℓ(κ)·N) additions. A numerator factor that vanishes at
//! column k of row i caps κ_i below k and the enumerator skips everything
//! beyond it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jack::{
    c_principal_term, gen_pochhammer, log_c_principal_term, log_gen_pochhammer, pochhammer_zero_cell,
    Alpha, Scalar, SignedLog, LOG_WEIGHT_THRESHOLD,
};
use crate::partitions::{enumerate_partitions_capped, Partition};

/// Truncation and safety settings for a series evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesConfig {
    pub rel_tol: f64,
    /// Consecutive small layers required before stopping.
    pub stop_layers: usize,
    pub max_weight: usize,
    pub max_terms: u64,
    /// Abort when layer magnitudes grow for `guard_run` consecutive weights
    /// past `guard_start`.
    pub divergence_guard: bool,
    pub guard_start: usize,
    pub guard_run: usize,
    /// Layers with more terms than this are evaluated on the rayon pool.
    pub parallel_threshold: usize,
}

impl SeriesConfig {
    pub fn new(rel_tol: f64) -> Self {
        SeriesConfig {
            rel_tol,
            stop_layers: 3,
            max_weight: 200_000,
            max_terms: 50_000_000,
            divergence_guard: true,
            guard_start: 50,
            guard_run: 10,
            parallel_threshold: 4096,
        }
    }

    pub fn without_divergence_guard(mut self) -> Self {
        self.divergence_guard = false;
        self
    }

    pub fn with_max_weight(mut self, w: usize) -> Self {
        self.max_weight = w;
        self
    }

    pub fn with_max_terms(mut self, m: u64) -> Self {
        self.max_terms = m;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    /// Largest |κ| summed.
    pub trunc_weight: usize,
    pub tail_estimate: f64,
    pub converged: bool,
    pub terms_summed: u64,
}

impl SeriesResult {
    pub fn exact_one() -> Self {
        SeriesResult {
            value: 1.0,
            trunc_weight: 0,
            tail_estimate: 0.0,
            converged: true,
            terms_summed: 1,
        }
    }

    /// Multiplies value and tail by a positive-or-negative constant.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self.tail_estimate *= factor.abs();
        self
    }
}

/// Parameters of ₂F₁^(α)(a, b; c; t·1^N).
#[derive(Clone, Debug, PartialEq)]
pub struct Hyp2F1Params<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub alpha: T,
    pub n: usize,
    pub t: T,
}

/// One series summand with its partition.
#[derive(Clone, Debug, PartialEq)]
pub struct TermValue<T> {
    pub value: T,
    pub kappa: Partition,
}

fn factorial<T: Scalar>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, m| acc * T::from_usize(m))
}

/// [a]_κ [b]_κ / ([c]_κ |κ|!) · C_κ^(α)(t·1^N), from the cell products.
pub fn series_term<T: Scalar>(kappa: &Partition, p: &Hyp2F1Params<T>) -> Result<TermValue<T>> {
    let al = Alpha::new(p.alpha.clone())?;
    let pa = gen_pochhammer(&p.a, kappa, &al, p.n)?;
    let pb = gen_pochhammer(&p.b, kappa, &al, p.n)?;
    if let Some((row, col)) = pochhammer_zero_cell(&p.c, kappa, &al) {
        return Err(Error::PochhammerPole { row, col });
    }
    let pc = gen_pochhammer(&p.c, kappa, &al, p.n)?;
    let cterm = c_principal_term(kappa, &al, p.n, &p.t)?;
    Ok(TermValue {
        value: pa * pb / pc / factorial::<T>(kappa.weight()) * cterm,
        kappa: kappa.clone(),
    })
}

/// `f64` variant of [`series_term`] that stays finite for large weights.
pub fn series_term_f64(kappa: &Partition, p: &Hyp2F1Params) -> Result<TermValue<f64>> {
    if kappa.weight() <= LOG_WEIGHT_THRESHOLD {
        return series_term(kappa, p);
    }
    let al = Alpha::new(p.alpha)?;
    if let Some((row, col)) = pochhammer_zero_cell(&p.c, kappa, &al) {
        return Err(Error::PochhammerPole { row, col });
    }
    let ln_fact: f64 = (2..=kappa.weight()).map(|m| (m as f64).ln()).sum();
    let v = log_gen_pochhammer(p.a, kappa, p.alpha) * log_gen_pochhammer(p.b, kappa, p.alpha)
        / log_gen_pochhammer(p.c, kappa, p.alpha)
        * log_c_principal_term(kappa, p.alpha, p.n, p.t)?
        / SignedLog {
            sign: 1.0,
            log_abs: ln_fact,
        };
    Ok(TermValue {
        value: v.to_f64(),
        kappa: kappa.clone(),
    })
}

/// Generic equal-argument series Σ_κ ∏[num]_κ / ∏[den]_κ · C_κ(t·1^N)/|κ|!.
#[derive(Clone, Debug)]
pub(crate) struct SeriesSpec {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub alpha: f64,
    pub n: usize,
    pub t: f64,
}

fn near_zero(x: f64, scale: f64) -> bool {
    x.abs() <= 1e-12 * scale.abs().max(1.0)
}

/// Smallest k ≥ 1 with u − i/α + k − 1 = 0, if any.
fn first_zero_column(u: f64, shift: f64) -> Option<usize> {
    let k = 1.0 - u + shift;
    let kr = k.round();
    (kr >= 1.0 && near_zero(k - kr, u.abs() + shift + kr)).then_some(kr as usize)
}

struct Engine {
    spec: SeriesSpec,
    /// Row caps from vanishing numerator cells, made non-increasing.
    caps: Vec<usize>,
    /// Column of a vanishing denominator cell per row.
    poles: Vec<Option<usize>>,
    row_log: Vec<Vec<f64>>,
    row_sign: Vec<Vec<f64>>,
    /// pair_log[g][d], g ≥ 1
    pair_log: Vec<Vec<f64>>,
}

impl Engine {
    fn new(spec: SeriesSpec) -> Self {
        let n = spec.n;
        let mut caps = vec![usize::MAX; n];
        let mut poles = vec![None; n];
        for i in 0..n {
            let shift = i as f64 / spec.alpha;
            for &u in &spec.num {
                if let Some(k) = first_zero_column(u, shift) {
                    caps[i] = caps[i].min(k - 1);
                }
            }
            for &v in &spec.den {
                if let Some(k) = first_zero_column(v, shift) {
                    poles[i] = Some(poles[i].map_or(k, |p: usize| p.min(k)));
                }
            }
        }
        for i in 1..n {
            caps[i] = caps[i].min(caps[i - 1]);
        }
        Engine {
            caps,
            poles,
            row_log: vec![vec![0.0]; n],
            row_sign: vec![vec![1.0]; n],
            pair_log: vec![vec![0.0]; n],
            spec,
        }
    }

    /// Largest weight any admissible partition can reach.
    fn capacity(&self) -> Option<usize> {
        self.caps.iter().try_fold(0usize, |acc, &c| {
            if c == usize::MAX {
                None
            } else {
                Some(acc + c)
            }
        })
    }

    fn grow(&mut self, w: usize) {
        let SeriesSpec {
            ref num,
            ref den,
            alpha,
            n,
            t,
        } = self.spec;
        let (lt, st) = (t.abs().ln(), t.signum());
        for i in 0..n {
            let top = w.min(self.caps[i]);
            let shift = i as f64 / alpha;
            let third = 1.0 + (n - 1 - i) as f64 / alpha;
            while self.row_log[i].len() <= top {
                let k = self.row_log[i].len();
                let km = (k - 1) as f64;
                let mut lg = lt - (third + km).ln();
                let mut sg = st;
                for &u in num {
                    let f = u - shift + km;
                    lg += f.abs().ln();
                    sg *= f.signum();
                }
                for &v in den {
                    let f = v - shift + km;
                    // a pole cell is never reached: terms past it are rejected
                    if f != 0.0 {
                        lg -= f.abs().ln();
                        sg *= f.signum();
                    }
                }
                let prev_l = self.row_log[i][k - 1];
                let prev_s = self.row_sign[i][k - 1];
                self.row_log[i].push(prev_l + lg);
                self.row_sign[i].push(prev_s * sg);
            }
        }
        for g in 1..n {
            let gf = g as f64;
            while self.pair_log[g].len() <= w {
                let d = (self.pair_log[g].len() - 1) as f64;
                let f = (1.0 + gf / alpha + d).ln() + ((gf + 1.0) / alpha + d).ln()
                    - (1.0 + (gf - 1.0) / alpha + d).ln()
                    - (gf / alpha + d).ln();
                let prev = *self.pair_log[g].last().unwrap();
                self.pair_log[g].push(prev + f);
            }
        }
    }

    fn term(&self, parts: &[usize]) -> Result<f64> {
        let n = self.spec.n;
        let mut lg = 0.0;
        let mut sg = 1.0;
        for (i, &k) in parts.iter().enumerate() {
            if let Some(p) = self.poles[i] {
                if k >= p {
                    return Err(Error::PochhammerPole { row: i + 1, col: p });
                }
            }
            lg += self.row_log[i][k];
            sg *= self.row_sign[i][k];
            for j in (i + 1)..n {
                let kj = parts.get(j).copied().unwrap_or(0);
                lg += self.pair_log[j - i][k - kj];
            }
        }
        Ok(sg * lg.exp())
    }

    fn layer(&mut self, w: usize, cfg: &SeriesConfig) -> Result<(f64, u64)> {
        self.grow(w);
        let mut iter = enumerate_partitions_capped(w, &self.caps);
        let mut sum = 0.0;
        let mut count = 0u64;
        let chunk = cfg.parallel_threshold.max(1);
        loop {
            let batch: Vec<Partition> = iter.by_ref().take(chunk).collect();
            if batch.is_empty() {
                break;
            }
            count += batch.len() as u64;
            let terms: Vec<f64> = if batch.len() >= chunk {
                batch
                    .par_iter()
                    .map(|k| self.term(k.parts()))
                    .collect::<Result<_>>()?
            } else {
                batch
                    .iter()
                    .map(|k| self.term(k.parts()))
                    .collect::<Result<_>>()?
            };
            for v in terms {
                sum += v;
            }
        }
        Ok((sum, count))
    }
}

fn validate(spec: &SeriesSpec, cfg: &SeriesConfig) -> Result<()> {
    if spec.n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Alpha::new(spec.alpha)?;
    if !(cfg.rel_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must be positive, got {}",
            cfg.rel_tol
        )));
    }
    if !spec.t.is_finite() || spec.t.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "series needs |t| < 1, got t = {}",
            spec.t
        )));
    }
    if spec.num.iter().chain(&spec.den).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("series parameters must be finite".into()));
    }
    Ok(())
}

pub(crate) fn sum_series(spec: SeriesSpec, cfg: &SeriesConfig) -> Result<SeriesResult> {
    sum_series_traced(spec, cfg, |_, _| {})
}

/// Sums the series, reporting each weight and partial sum to `trace`.
pub(crate) fn sum_series_traced(
    spec: SeriesSpec,
    cfg: &SeriesConfig,
    mut trace: impl FnMut(usize, f64),
) -> Result<SeriesResult> {
    validate(&spec, cfg)?;
    if spec.t == 0.0 {
        return Ok(SeriesResult::exact_one());
    }
    let mut eng = Engine::new(spec);
    let capacity = eng.capacity();
    let mut total = 1.0;
    let mut terms = 1u64;
    let mut prev_layer = 1.0f64;
    let mut small_run = 0usize;
    let mut grow_run = 0usize;
    let mut tail = f64::INFINITY;
    let mut w = 0usize;
    trace(0, total);
    loop {
        if capacity.is_some_and(|c| w >= c) {
            return Ok(SeriesResult {
                value: total,
                trunc_weight: w,
                tail_estimate: 0.0,
                converged: true,
                terms_summed: terms,
            });
        }
        if w >= cfg.max_weight || terms >= cfg.max_terms {
            return Ok(SeriesResult {
                value: total,
                trunc_weight: w,
                tail_estimate: tail,
                converged: false,
                terms_summed: terms,
            });
        }
        w += 1;
        let (layer, count) = eng.layer(w, cfg)?;
        total += layer;
        terms += count;
        trace(w, total);

        let mag = layer.abs();
        let r = if prev_layer == 0.0 {
            if mag == 0.0 {
                0.0
            } else {
                0.99
            }
        } else {
            (mag / prev_layer.abs()).clamp(0.0, 0.99)
        };
        tail = mag * r / (1.0 - r);

        if cfg.divergence_guard {
            if w > cfg.guard_start && mag > prev_layer.abs() {
                grow_run += 1;
            } else {
                grow_run = 0;
            }
            if grow_run >= cfg.guard_run {
                return Err(Error::Divergence {
                    partial: total,
                    weight: w,
                    run: grow_run,
                });
            }
        }
        prev_layer = layer;

        let scale = cfg.rel_tol * total.abs();
        if mag < scale {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= cfg.stop_layers && tail <= scale {
            return Ok(SeriesResult {
                value: total,
                trunc_weight: w,
                tail_estimate: tail,
                converged: true,
                terms_summed: terms,
            });
        }
    }
}

fn check_2f1(p: &Hyp2F1Params) -> SeriesSpec {
    SeriesSpec {
        num: vec![p.a, p.b],
        den: vec![p.c],
        alpha: p.alpha,
        n: p.n,
        t: p.t,
    }
}

pub fn hyp2f1_equal(p: &Hyp2F1Params, rel_tol: f64) -> Result<SeriesResult> {
    hyp2f1_equal_with(p, &SeriesConfig::new(rel_tol))
}

pub fn hyp2f1_equal_with(p: &Hyp2F1Params, cfg: &SeriesConfig) -> Result<SeriesResult> {
    sum_series(check_2f1(p), cfg)
}

/// Partial sums after each weight layer, up to `max_weight`.
pub fn hyp2f1_partial_sums(p: &Hyp2F1Params, max_weight: usize) -> Result<Vec<f64>> {
    let cfg = SeriesConfig {
        stop_layers: usize::MAX,
        divergence_guard: false,
        ..SeriesConfig::new(1e-300)
    }
    .with_max_weight(max_weight);
    let mut sums = Vec::new();
    sum_series_traced(check_2f1(p), &cfg, |_, s| sums.push(s))?;
    Ok(sums)
}

pub fn hyp1f0_equal(a: f64, alpha: f64, n: usize, t: f64, rel_tol: f64) -> Result<SeriesResult> {
    hyp1f0_equal_with(a, alpha, n, t, &SeriesConfig::new(rel_tol))
}

pub fn hyp1f0_equal_with(a: f64, alpha: f64, n: usize, t: f64, cfg: &SeriesConfig) -> Result<SeriesResult> {
    sum_series(
        SeriesSpec {
            num: vec![a],
            den: vec![],
            alpha,
            n,
            t,
        },
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jack::rat;
    use crate::partitions::enumerate_partitions;
    use approx::assert_relative_eq;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn params(a: f64, b: f64, c: f64, alpha: f64, n: usize, t: f64) -> Hyp2F1Params {
        Hyp2F1Params { a, b, c, alpha, n, t }
    }

    #[test]
    fn zero_argument_is_one() {
        let r = hyp2f1_equal(&params(1.3, -0.2, 2.5, 0.7, 4, 0.0), 1e-12).unwrap();
        assert_eq!(r, SeriesResult::exact_one());
    }

    #[test]
    fn classical_gauss_log() {
        for alpha in [0.5, 1.0, 3.0] {
            let r = hyp2f1_equal(&params(1.0, 1.0, 2.0, alpha, 1, 0.5), 1e-13).unwrap();
            assert!(r.converged);
            assert_relative_eq!(r.value, 2.0 * std::f64::consts::LN_2, max_relative = 1e-12);
            assert!(r.tail_estimate <= 1e-13 * r.value);
        }
    }

    #[test]
    fn binomial_examples() {
        let r = hyp1f0_equal(2.0, 1.0, 2, 0.5, 1e-13).unwrap();
        assert_relative_eq!(r.value, 16.0, max_relative = 1e-11);
        let r = hyp1f0_equal(0.0, 0.5, 3, 0.7, 1e-13).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.converged);
        let r = hyp1f0_equal(1.0, 2.0, 3, 0.3, 1e-13).unwrap();
        assert_relative_eq!(r.value, 0.7f64.powi(-3), max_relative = 1e-11);
    }

    #[test]
    fn binomial_grid() {
        for a in [0.7, 2.0] {
            for alpha in [0.5, 1.0, 2.0] {
                for n in 1..=4 {
                    for t in [0.1, 0.35, 0.6] {
                        let r = hyp1f0_equal(a, alpha, n, t, 1e-12).unwrap();
                        let exact = (1.0 - t).powf(-a * n as f64);
                        assert!(r.converged);
                        assert!(
                            ((r.value - exact) / exact).abs() <= 1e-11,
                            "a {a} alpha {alpha} n {n} t {t}: {} vs {exact}",
                            r.value
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn first_term_and_empty_term() {
        let q = params(0.3, 1.7, 2.2, 0.8, 5, 0.4);
        assert_eq!(series_term(&Partition::empty(), &q).unwrap().value, 1.0);
        assert_relative_eq!(
            series_term(&p(&[1]), &q).unwrap().value,
            0.3 * 1.7 / 2.2 * 5.0 * 0.4,
            max_relative = 1e-14
        );
    }

    #[test]
    fn pole_is_reported_with_cell() {
        // c − 1/α + 0 = 0 at cell (2,1) for c = 1/2, α = 2
        let q = params(1.0, 1.0, 0.5, 2.0, 3, 0.3);
        assert_eq!(
            series_term(&p(&[1, 1]), &q).unwrap_err(),
            Error::PochhammerPole { row: 2, col: 1 }
        );
        assert!(series_term(&p(&[3]), &q).is_ok());
        assert!(matches!(
            hyp2f1_equal(&q, 1e-10),
            Err(Error::PochhammerPole { row: 2, col: 1 })
        ));
        // pole shielded by a vanishing numerator in the same row
        let q = params(0.5, 1.0, 0.5, 2.0, 3, 0.3);
        assert!(hyp2f1_equal(&q, 1e-10).is_ok());
    }

    #[test]
    fn circular_parameters_give_nonnegative_terms() {
        // a = b = −μ > 0, c = β(N−1)/2 + 1: [−μ]_κ² ≥ 0 and every cell of [c]_κ
        // is c − (i−1)/α + j − 1 ≥ (β/2)(N−i) + j > 0 for i ≤ N.
        for beta in [0.5, 1.0, 2.0, 4.0] {
            let n = 4;
            for mu in [-0.3, -1.0, -1.7] {
                let q = params(-mu, -mu, beta * (n as f64 - 1.0) / 2.0 + 1.0, 2.0 / beta, n, 0.6);
                for k in 0..=8 {
                    for kappa in enumerate_partitions(k, n) {
                        assert!(series_term(&kappa, &q).unwrap().value >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            hyp2f1_equal(&params(1.0, 1.0, 2.0, 1.0, 1, 1.2), 1e-10),
            Err(Error::InvalidParameter(_))
        ));
        assert!(hyp2f1_equal(&params(1.0, 1.0, 2.0, 1.0, 1, 0.2), 0.0).is_err());
        assert!(hyp2f1_equal(&params(1.0, 1.0, 2.0, -1.0, 1, 0.2), 1e-8).is_err());
        assert!(hyp2f1_equal(&params(1.0, 1.0, 2.0, 1.0, 0, 0.2), 1e-8).is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let cfg = SeriesConfig::new(1e-14).with_max_weight(5);
        let r = hyp2f1_equal_with(&params(0.5, 0.5, 3.5, 1.0, 3, 0.9), &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.trunc_weight, 5);
    }

    #[test]
    fn divergence_guard_trips_on_slow_growth() {
        // terms grow like k^(aN−1) for a long stretch when t is close to 1
        let q = params(3.0, 3.0, 1.0, 1.0, 1, 0.999);
        match hyp2f1_equal(&q, 1e-12) {
            Err(Error::Divergence { weight, run, partial }) => {
                assert!(weight > 50 && run == 10 && partial > 1.0);
            }
            other => panic!("expected divergence error, got {other:?}"),
        }
        let cfg = SeriesConfig::new(1e-12).without_divergence_guard();
        assert!(hyp2f1_equal_with(&q, &cfg).unwrap().converged);
    }

    #[test]
    fn integer_truncation_terminates() {
        // a = −2 in one variable: a polynomial of degree 2
        let r = hyp2f1_equal(&params(-2.0, 1.5, 0.75, 1.0, 1, 0.5), 1e-14).unwrap();
        let exact = 1.0 + (-2.0 * 1.5 / 0.75) * 0.5 + (-2.0 * -1.0 * 1.5 * 2.5) / (0.75 * 1.75 * 2.0) * 0.25;
        assert!(r.converged);
        assert_eq!(r.trunc_weight, 2);
        assert_eq!(r.tail_estimate, 0.0);
        assert_relative_eq!(r.value, exact, max_relative = 1e-14);
    }

    #[test]
    fn deterministic_results() {
        let q = params(0.6, 0.6, 3.5, 0.5, 6, 0.55);
        let mut cfg = SeriesConfig::new(1e-12);
        let a = hyp2f1_equal_with(&q, &cfg).unwrap();
        let b = hyp2f1_equal_with(&q, &cfg).unwrap();
        cfg.parallel_threshold = 7;
        let c = hyp2f1_equal_with(&q, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn monotone_partial_sums_for_positive_terms() {
        let q = params(0.8, 0.8, 2.5, 1.0, 4, 0.7);
        let sums = hyp2f1_partial_sums(&q, 30).unwrap();
        assert_eq!(sums.len(), 31);
        assert!(sums.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn n1_terms_match_classical_series_exactly() {
        let (a, b, c) = (rat(-7, 3), rat(5, 4), rat(11, 6));
        for (an, ad) in [(1, 2), (3, 1)] {
            let q = Hyp2F1Params {
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
                alpha: rat(an, ad),
                n: 1,
                t: rat(2, 5),
            };
            let mut classical = rat(1, 1);
            for k in 0..20usize {
                let kappa = if k == 0 { Partition::empty() } else { p(&[k]) };
                assert_eq!(series_term(&kappa, &q).unwrap().value, classical);
                let kk = BigRational::from_integer(k.into());
                classical = classical * (a.clone() + kk.clone()) * (b.clone() + kk.clone())
                    / ((c.clone() + kk.clone()) * (kk + rat(1, 1)))
                    * q.t.clone();
            }
        }
    }

    fn partition_strategy(max_parts: usize, max_part: usize) -> impl Strategy<Value = Partition> {
        proptest::collection::vec(0..=max_part, 0..=max_parts).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Partition::new(v).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn factorized_term_matches_cell_product(
            kappa in partition_strategy(5, 9),
            extra in 0usize..4,
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            c in 0.5f64..6.0,
            alpha in 0.25f64..4.0,
            t in -0.95f64..0.95,
        ) {
            let n = kappa.len().max(1) + extra;
            let q = params(a, b, c, alpha, n, t);
            let direct = series_term(&kappa, &q);
            prop_assume!(direct.is_ok());
            let direct = direct.unwrap().value;
            let mut eng = Engine::new(check_2f1(&q));
            // only compare where no numerator cap cuts the partition
            prop_assume!((0..n).all(|i| kappa.part(i + 1) <= eng.caps[i]));
            eng.grow(kappa.weight());
            let fact = eng.term(kappa.parts()).unwrap();
            prop_assert!((fact - direct).abs() <= 1e-11 * direct.abs().max(1e-300),
                "{} vs {}", fact, direct);
        }

        #[test]
        fn log_term_matches_direct(
            parts in proptest::collection::vec(11usize..=16, 4),
            a in 0.1f64..3.0,
            alpha in 0.3f64..3.0,
            t in 0.05f64..0.95,
        ) {
            let mut parts = parts;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let kappa = Partition::new(parts).unwrap();
            prop_assert!(kappa.weight() > LOG_WEIGHT_THRESHOLD);
            let q = params(a, a + 0.5, a + 1.25, alpha, 4, t);
            let direct = series_term(&kappa, &q).unwrap().value;
            let logged = series_term_f64(&kappa, &q).unwrap().value;
            prop_assert!((direct - logged).abs() <= 1e-11 * direct.abs());
        }
    }
}
