//! Metropolis sampling of circular and Jacobi β-ensembles.
//!
//! Single-site random-walk updates on the log-density
//! β Σ_{j<k} log|λ_j − λ_k| + Σ_l (a log x_l + b log(1 − x_l)); angles wrap
//! modulo 2π, Jacobi coordinates reflect off 0 and 1. Circular chains also
//! rotate the whole configuration once per sweep, which leaves the density
//! invariant. The step is tuned during burn-in towards acceptance 0.3 and
//! then frozen.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rmt::{EnsembleSpec, MomentQuery};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainConfig {
    /// Recorded configurations per chain.
    pub n_samples: usize,
    /// Sweeps discarded while the step adapts.
    pub burn_in: usize,
    /// Sweeps between recorded configurations.
    pub thinning: usize,
    pub seed: u64,
    /// Independent chains, pooled in the estimate.
    pub chains: usize,
    pub initial_step: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            n_samples: 20_000,
            burn_in: 2_000,
            thinning: 1,
            seed: 0,
            chains: 1,
            initial_step: 0.5,
        }
    }
}

impl ChainConfig {
    fn validate(&self) -> Result<()> {
        if self.n_samples < 2 || self.thinning == 0 || self.chains == 0 {
            return Err(Error::InvalidParameter(
                "need n_samples >= 2, thinning >= 1 and at least one chain".into(),
            ));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::InvalidParameter("initial step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStats {
    pub n_samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    pub chains: usize,
    pub acceptance_rate: f64,
    pub estimate: f64,
    /// Batch-means standard error.
    pub std_error: f64,
    /// Set when the batch means look unreliable (heavy tails, drifting
    /// variance).
    pub flagged: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Circular { beta: f64 },
    Jacobi { a: f64, b: f64, beta: f64 },
}

/// One Metropolis chain.
pub struct Sampler {
    kind: Kind,
    x: Vec<f64>,
    step: f64,
    rng: ChaCha8Rng,
    accepted: u64,
    proposed: u64,
}

impl Sampler {
    /// Chain `stream` of the seed; different streams are independent.
    pub fn new(ensemble: &EnsembleSpec, seed: u64, stream: u64, step: f64) -> Result<Self> {
        ensemble.validate()?;
        let n = ensemble.n();
        let (kind, x) = match *ensemble {
            EnsembleSpec::Circular { beta, .. } => (
                Kind::Circular { beta },
                (0..n).map(|l| TAU * (l as f64 + 0.5) / n as f64).collect(),
            ),
            EnsembleSpec::Jacobi { a, b, beta, .. } => (
                Kind::Jacobi { a, b, beta },
                (0..n).map(|l| (1.0 - (PI * (l as f64 + 0.5) / n as f64).cos()) / 2.0).collect(),
            ),
            EnsembleSpec::Group { .. } => {
                return Err(Error::InvalidParameter("the sampler covers circular and Jacobi ensembles".into()))
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(Sampler {
            kind,
            x,
            step,
            rng,
            accepted: 0,
            proposed: 0,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// Log-density terms that involve coordinate i at value v.
    fn site(&self, i: usize, v: f64) -> f64 {
        match self.kind {
            Kind::Circular { beta } => {
                let mut s = 0.0;
                for (j, &y) in self.x.iter().enumerate() {
                    if j != i {
                        s += (2.0 * ((v - y) / 2.0).sin()).abs().ln();
                    }
                }
                beta * s
            }
            Kind::Jacobi { a, b, beta } => {
                let mut s = 0.0;
                for (j, &y) in self.x.iter().enumerate() {
                    if j != i {
                        s += (v - y).abs().ln();
                    }
                }
                beta * s + a * v.ln() + b * (1.0 - v).ln()
            }
        }
    }

    /// N single-site updates, plus a rotation for circular chains.
    pub fn sweep(&mut self) {
        for i in 0..self.x.len() {
            let u: f64 = self.rng.random();
            let mut v = self.x[i] + self.step * (2.0 * u - 1.0);
            match self.kind {
                Kind::Circular { .. } => v = v.rem_euclid(TAU),
                Kind::Jacobi { .. } => {
                    while !(0.0..=1.0).contains(&v) {
                        v = if v < 0.0 { -v } else { 2.0 - v };
                    }
                    if v == 0.0 || v == 1.0 {
                        self.proposed += 1;
                        continue;
                    }
                }
            }
            let d = self.site(i, v) - self.site(i, self.x[i]);
            self.proposed += 1;
            let accept = d >= 0.0 || {
                let w: f64 = self.rng.random();
                w.ln() < d
            };
            if accept {
                self.x[i] = v;
                self.accepted += 1;
            }
        }
        if let Kind::Circular { .. } = self.kind {
            let shift: f64 = self.rng.random::<f64>() * TAU;
            for t in &mut self.x {
                *t = (*t + shift).rem_euclid(TAU);
            }
        }
    }

    /// Burn-in with step adaptation; counters restart afterwards.
    pub fn burn_in(&mut self, sweeps: usize) {
        let cap = match self.kind {
            Kind::Circular { .. } => PI,
            Kind::Jacobi { .. } => 1.0,
        };
        let window = 50;
        for s in 0..sweeps {
            self.sweep();
            if (s + 1) % window == 0 {
                let rate = self.acceptance_rate();
                self.step = (self.step * (2.0 * (rate - 0.3)).exp()).clamp(1e-4, cap);
                self.accepted = 0;
                self.proposed = 0;
            }
        }
        self.accepted = 0;
        self.proposed = 0;
    }
}

/// Runs one chain and hands every recorded configuration to `visit`;
/// returns the post-burn-in acceptance rate.
pub fn run_chain(ensemble: &EnsembleSpec, cfg: &ChainConfig, stream: u64, mut visit: impl FnMut(&[f64])) -> Result<f64> {
    cfg.validate()?;
    let mut s = Sampler::new(ensemble, cfg.seed, stream, cfg.initial_step)?;
    s.burn_in(cfg.burn_in);
    for _ in 0..cfg.n_samples {
        for _ in 0..cfg.thinning {
            s.sweep();
        }
        visit(s.state());
    }
    Ok(s.acceptance_rate())
}

/// Configurations of the first chain.
pub fn mcmc_sample(ensemble: &EnsembleSpec, cfg: &ChainConfig) -> Result<(Vec<Vec<f64>>, f64)> {
    let mut out = Vec::with_capacity(cfg.n_samples);
    let rate = run_chain(ensemble, cfg, 0, |x| out.push(x.to_vec()))?;
    Ok((out, rate))
}

const BATCHES_PER_CHAIN: usize = 20;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_var(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// Batch means over per-chain streams: (estimate, standard error, batch means).
pub fn batch_means(streams: &[Vec<f64>]) -> (f64, f64, Vec<f64>) {
    let mut means = Vec::new();
    for s in streams {
        let len = s.len() / BATCHES_PER_CHAIN;
        if len == 0 {
            means.extend(s.iter().copied());
            continue;
        }
        means.extend(s.chunks(len).take(BATCHES_PER_CHAIN).map(mean));
    }
    let all: Vec<f64> = streams.iter().flatten().copied().collect();
    let est = mean(&all);
    let se = if means.len() > 1 {
        (sample_var(&means) / means.len() as f64).sqrt()
    } else {
        0.0
    };
    (est, se, means)
}

/// Pooled estimate of ⟨f⟩ over `cfg.chains` independent chains.
pub fn mc_observable<F>(ensemble: &EnsembleSpec, cfg: &ChainConfig, f: F) -> Result<ChainStats>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let runs: Vec<(Vec<f64>, f64)> = (0..cfg.chains as u64)
        .into_par_iter()
        .map(|c| {
            let mut vals = Vec::with_capacity(cfg.n_samples);
            let rate = run_chain(ensemble, cfg, c, |x| vals.push(f(x)))?;
            Ok((vals, rate))
        })
        .collect::<Result<_>>()?;
    let rate = runs.iter().map(|r| r.1).sum::<f64>() / runs.len() as f64;
    let streams: Vec<Vec<f64>> = runs.into_iter().map(|r| r.0).collect();
    let (est, se, means) = batch_means(&streams);
    let mut warnings = Vec::new();
    if !(0.1..=0.7).contains(&rate) {
        warnings.push(format!("acceptance rate {rate:.3} outside [0.1, 0.7]"));
    }
    let mut flagged = false;
    let total: f64 = streams.iter().flatten().map(|v| v.abs()).sum();
    let biggest = streams.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    if total > 0.0 && biggest > 0.01 * total {
        flagged = true;
        warnings.push(format!("one sample carries {:.1}% of the total", 100.0 * biggest / total));
    }
    if means.len() >= 8 {
        let (lo, hi) = means.split_at(means.len() / 2);
        let (v1, v2) = (sample_var(lo), sample_var(hi));
        if v1.min(v2) > 0.0 && v1.max(v2) > 4.0 * v1.min(v2) {
            flagged = true;
            warnings.push(format!("batch-mean variance drifts between halves ({v1:.3e} vs {v2:.3e})"));
        }
    }
    Ok(ChainStats {
        n_samples: cfg.n_samples,
        burn_in: cfg.burn_in,
        thinning: cfg.thinning,
        seed: cfg.seed,
        chains: cfg.chains,
        acceptance_rate: rate,
        estimate: est,
        std_error: se,
        flagged,
        warnings,
    })
}

/// Minimum distance from the support required for μ < 0.
pub const MIN_DISTANCE: f64 = 0.05;

/// Sample mean of ∏|point − λ_l|^{2μ}.
pub fn mc_moment(q: &MomentQuery, cfg: &ChainConfig) -> Result<ChainStats> {
    q.validate()?;
    let (mu, p) = (q.mu, q.point);
    match q.ensemble {
        EnsembleSpec::Circular { .. } => {
            if mu < 0.0 && (1.0 - p).abs() < MIN_DISTANCE {
                return Err(Error::InvalidParameter(format!(
                    "|z| must be at least {MIN_DISTANCE} away from the unit circle for mu < 0"
                )));
            }
            mc_observable(&q.ensemble, cfg, |th| {
                th.iter()
                    .map(|&t| (1.0 + p * p - 2.0 * p * t.cos()).powf(mu))
                    .product()
            })
        }
        EnsembleSpec::Jacobi { .. } => {
            let dist = if p > 1.0 { p - 1.0 } else { -p };
            if mu < 0.0 && dist < MIN_DISTANCE {
                return Err(Error::InvalidParameter(format!(
                    "x must be at least {MIN_DISTANCE} away from [0, 1] for mu < 0"
                )));
            }
            mc_observable(&q.ensemble, cfg, |x| x.iter().map(|&y| (p - y).abs().powf(2.0 * mu)).product())
        }
        EnsembleSpec::Group { .. } => Err(Error::InvalidParameter(
            "Monte Carlo covers circular and Jacobi ensembles".into(),
        )),
    }
}

/// Fluctuations of A(z) = Σ log|z − e^{iθ_l}|².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearStatistic {
    pub mean: f64,
    pub mean_std_error: f64,
    pub variance: f64,
    /// Batch-means error of the variance.
    pub variance_std_error: f64,
    /// −(4/β) log(1 − |z|²)
    pub predicted_variance: f64,
    pub acceptance_rate: f64,
}

pub fn predicted_variance(beta: f64, absz: f64) -> f64 {
    -4.0 / beta * (1.0 - absz * absz).ln()
}

/// A(z) is rotation invariant in law, so z may be taken real.
pub fn linear_statistic_check(beta: f64, n: usize, absz: f64, cfg: &ChainConfig) -> Result<LinearStatistic> {
    if !(0.0..=0.8).contains(&absz) {
        return Err(Error::InvalidParameter(format!("need 0 <= |z| <= 0.8, got {absz}")));
    }
    if n < 16 {
        return Err(Error::InvalidParameter(format!("need N >= 16, got {n}")));
    }
    cfg.validate()?;
    let ens = EnsembleSpec::Circular { beta, n };
    let runs: Vec<(Vec<f64>, f64)> = (0..cfg.chains as u64)
        .into_par_iter()
        .map(|c| {
            let mut vals = Vec::with_capacity(cfg.n_samples);
            let rate = run_chain(&ens, cfg, c, |th| {
                vals.push(th.iter().map(|&t| (1.0 + absz * absz - 2.0 * absz * t.cos()).ln()).sum())
            })?;
            Ok((vals, rate))
        })
        .collect::<Result<_>>()?;
    let rate = runs.iter().map(|r| r.1).sum::<f64>() / runs.len() as f64;
    let streams: Vec<Vec<f64>> = runs.into_iter().map(|r| r.0).collect();
    let (m, mse, _) = batch_means(&streams);
    let sq: Vec<Vec<f64>> = streams
        .iter()
        .map(|s| s.iter().map(|a| (a - m) * (a - m)).collect())
        .collect();
    let (var, vse, _) = batch_means(&sq);
    let total = streams.iter().map(Vec::len).sum::<usize>() as f64;
    Ok(LinearStatistic {
        mean: m,
        mean_std_error: mse,
        variance: var * total / (total - 1.0).max(1.0),
        variance_std_error: vse,
        predicted_variance: predicted_variance(beta, absz),
        acceptance_rate: rate,
    })
}

/// Kolmogorov–Smirnov distance of a sample from U(0, 1).
pub fn ks_statistic_uniform(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
