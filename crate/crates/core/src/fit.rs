//! Numerical exponents from ε-sweeps.
//!
//! The moment is evaluated on a grid of ε approaching the support and
//! log M(ε) is regressed on −log ε (plus log log(1/ε) when a logarithmic
//! correction is expected).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::AsymptoticForm;
use crate::error::{Error, Result};
use crate::hyperg::SeriesConfig;
use crate::rmt::{circular_moment_with, group_moment_with, jacobi_moment_with, GroupFamily, MomentQuery};
use crate::toeplitz::circular_moment_toeplitz;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// log M = −δ log ε + c
    Power,
    /// log M = −δ log ε + c₁ log log(1/ε) + c
    Log,
}

/// A moment as a function of the distance ε to the support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentFamily {
    /// |z| = 1 − ε
    Circular { beta: f64, n: usize, mu: f64 },
    /// x = 1/(1 − ε)
    Jacobi { a: f64, b: f64, beta: f64, n: usize, mu: f64 },
    /// z = 1 + ε
    Group { family: GroupFamily, n: usize, mu: f64 },
}

impl MomentFamily {
    pub fn query(&self, eps: f64) -> MomentQuery {
        match *self {
            MomentFamily::Circular { beta, n, mu } => MomentQuery::circular(beta, n, mu, 1.0 - eps),
            MomentFamily::Jacobi { a, b, beta, n, mu } => MomentQuery::jacobi(a, b, beta, n, mu, 1.0 / (1.0 - eps)),
            MomentFamily::Group { family, n, mu } => MomentQuery::group(family, n, mu, eps),
        }
    }

    /// For Jacobi families the x^{2μN} factor is divided out, so the fit sees
    /// the hypergeometric part alone.
    fn normalisation(&self, eps: f64) -> f64 {
        match *self {
            MomentFamily::Jacobi { n, mu, .. } => (1.0 - eps).powf(2.0 * mu * n as f64),
            _ => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluator {
    /// Toeplitz determinant for β = 2 circular families, the series otherwise.
    #[default]
    Auto,
    Series,
    Toeplitz,
}

impl std::str::FromStr for Evaluator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Evaluator::Auto),
            "series" => Ok(Evaluator::Series),
            "toeplitz" => Ok(Evaluator::Toeplitz),
            _ => Err(Error::InvalidParameter(format!("unknown evaluator '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitPoint {
    pub eps: f64,
    pub value: f64,
    pub trunc_weight: usize,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub fitted_delta: f64,
    /// Zero for the power model.
    pub fitted_log_coeff: f64,
    pub intercept: f64,
    pub predicted: AsymptoticForm,
    pub epsilons: Vec<f64>,
    pub residual_rms: f64,
    pub all_converged: bool,
    pub model: FitModel,
    pub evaluator: Evaluator,
    pub points: Vec<FitPoint>,
}

/// `points` values log-spaced from `eps_max` down to `eps_min`.
pub fn log_spaced_grid(eps_max: f64, eps_min: f64, points: usize) -> Result<Vec<f64>> {
    if !(eps_min > 0.0 && eps_max > eps_min) || points < 2 {
        return Err(Error::InvalidParameter(format!(
            "need 0 < eps_min < eps_max and at least 2 points, got [{eps_min}, {eps_max}] x {points}"
        )));
    }
    let (hi, lo) = (eps_max.ln(), eps_min.ln());
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                eps_max
            } else if i == points - 1 {
                eps_min
            } else {
                (hi + (lo - hi) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

fn resolve(evaluator: Evaluator, family: &MomentFamily) -> Result<Evaluator> {
    let toeplitz_ok = matches!(family, MomentFamily::Circular { beta, .. } if *beta == 2.0);
    match evaluator {
        Evaluator::Auto if toeplitz_ok => Ok(Evaluator::Toeplitz),
        Evaluator::Auto => Ok(Evaluator::Series),
        Evaluator::Toeplitz if !toeplitz_ok => Err(Error::InvalidParameter(
            "the Toeplitz evaluator needs a beta = 2 circular family".into(),
        )),
        e => Ok(e),
    }
}

/// Evaluates one grid point; failures become unconverged points.
pub fn evaluate_point(family: &MomentFamily, eps: f64, evaluator: Evaluator, cfg: &SeriesConfig) -> FitPoint {
    let q = family.query(eps);
    let res = match evaluator {
        Evaluator::Toeplitz => circular_moment_toeplitz(q.mu, q.point, q.ensemble.n()).map(|v| (v, 0, true)),
        _ => match *family {
            MomentFamily::Circular { .. } => circular_moment_with(&q, cfg),
            MomentFamily::Jacobi { .. } => jacobi_moment_with(&q, cfg),
            MomentFamily::Group { family, n, mu } => group_moment_with(family, n, mu, eps, cfg),
        }
        .map(|r| (r.value, r.trunc_weight, r.converged)),
    };
    match res {
        Ok((v, w, c)) => FitPoint {
            eps,
            value: v / family.normalisation(eps),
            trunc_weight: w,
            converged: c && v.is_finite() && v > 0.0,
            error: None,
        },
        Err(e) => FitPoint {
            eps,
            value: f64::NAN,
            trunc_weight: 0,
            converged: false,
            error: Some(e.to_string()),
        },
    }
}

/// Least squares for log M on the model regressors; returns
/// (δ, c₁, c, rms residual).
pub fn fit_points(points: &[(f64, f64)], model: FitModel) -> Result<(f64, f64, f64, f64)> {
    let cols = match model {
        FitModel::Power => 2,
        FitModel::Log => 3,
    };
    if points.len() < 4 {
        return Err(Error::InsufficientData(points.len()));
    }
    let m = points.len();
    let x = DMatrix::from_fn(m, cols, |i, j| {
        let le = -points[i].0.ln();
        match (j, model) {
            (0, _) => le,
            (1, FitModel::Log) => le.ln(),
            _ => 1.0,
        }
    });
    let y = DVector::from_iterator(m, points.iter().map(|p| p.1.ln()));
    let sol = x
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Numerical(format!("least squares failed: {e}")))?;
    let resid = &x * &sol - &y;
    let rms = (resid.norm_squared() / m as f64).sqrt();
    Ok(match model {
        FitModel::Power => (sol[0], 0.0, sol[1], rms),
        FitModel::Log => (sol[0], sol[1], sol[2], rms),
    })
}

/// Fits the divergence exponent of `family` on `eps_grid`.
///
/// The model follows `predicted.log_flag`. Series evaluations run without
/// the divergence guard since layers legitimately grow near ε → 0.
pub fn fit_divergence(
    family: &MomentFamily,
    eps_grid: &[f64],
    predicted: &AsymptoticForm,
    rel_tol: f64,
    evaluator: Evaluator,
) -> Result<FitReport> {
    if eps_grid.iter().any(|&e| !(e > 0.0 && e <= 0.2)) {
        return Err(Error::InvalidParameter("every eps must lie in (0, 0.2]".into()));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps grid must be strictly decreasing".into()));
    }
    let evaluator = resolve(evaluator, family)?;
    let cfg = SeriesConfig::new(rel_tol).without_divergence_guard();
    let points: Vec<FitPoint> = eps_grid
        .par_iter()
        .map(|&e| evaluate_point(family, e, evaluator, &cfg))
        .collect();
    let good: Vec<(f64, f64)> = points.iter().filter(|p| p.converged).map(|p| (p.eps, p.value)).collect();
    let model = if predicted.log_flag { FitModel::Log } else { FitModel::Power };
    let (d, c1, c, rms) = fit_points(&good, model)?;
    Ok(FitReport {
        fitted_delta: d,
        fitted_log_coeff: c1,
        intercept: c,
        predicted: predicted.clone(),
        epsilons: eps_grid.to_vec(),
        residual_rms: rms,
        all_converged: points.iter().all(|p| p.converged),
        model,
        evaluator,
        points,
    })
}
