//! Direct N-dimensional quadrature of moment averages, N ≤ 3.
//!
//! Numerator and normalisation are summed on the same grid and divided, so
//! constant factors of the rules never matter. Rules:
//!
//! * circular, even β: uniform periodic grid in every angle;
//! * circular, other β: angles in cyclic order, θ = φ + partial sums of
//!   the gaps. |Δ|^β factors into |2 sin(g/2)|^β over the gaps, whose
//!   endpoint powers are absorbed by Gauss–Jacobi rules;
//! * Jacobi: tensor Gauss–Jacobi for x^a (1 − x)^b;
//! * groups: tensor Gauss–Jacobi in cos θ on (−1, 1) with the family's
//!   weights, and the characteristic polynomial evaluated as a complex
//!   product over e^{±iθ}.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::gauss::{gauss_jacobi, gauss_jacobi_unit, periodic_uniform, Rule};
use crate::error::{Error, Result};
use crate::rmt::{EnsembleSpec, GroupFamily, MomentQuery};

pub const MIN_NODES: usize = 16;
pub const MAX_NODES: usize = 4096;
/// Largest tensor grid attempted.
pub const MAX_GRID_POINTS: usize = 1 << 28;
pub const DOUBLING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    PeriodicUniform,
    OrderedGaps,
    GaussJacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub ensemble: EnsembleSpec,
    pub nodes_per_dim: usize,
    pub rule: QuadratureRule,
}

fn is_even_integer(x: f64) -> bool {
    x.fract() == 0.0 && (x as i64) % 2 == 0
}

impl QuadratureSpec {
    /// The default rule for an ensemble at the minimum node count.
    pub fn for_ensemble(ensemble: EnsembleSpec) -> Self {
        let rule = match ensemble {
            EnsembleSpec::Circular { beta, .. } if is_even_integer(beta) => QuadratureRule::PeriodicUniform,
            EnsembleSpec::Circular { .. } => QuadratureRule::OrderedGaps,
            _ => QuadratureRule::GaussJacobi,
        };
        QuadratureSpec {
            ensemble,
            nodes_per_dim: MIN_NODES,
            rule,
        }
    }

    fn dims(&self) -> usize {
        match self.ensemble {
            EnsembleSpec::Group { family, n } => family.jacobi_dim(n),
            e => e.n(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.dims() > 3 {
            return bad(format!("quadrature handles at most 3 dimensions, got {}", self.dims()));
        }
        if self.nodes_per_dim < MIN_NODES {
            return bad(format!("need at least {MIN_NODES} nodes per dimension"));
        }
        let beta = self.ensemble.beta();
        match (self.ensemble, self.rule) {
            (EnsembleSpec::Circular { .. }, QuadratureRule::PeriodicUniform) if !is_even_integer(beta) => {
                bad(format!("the uniform rule needs an even integer beta, got {beta}"))
            }
            (EnsembleSpec::Circular { .. }, QuadratureRule::GaussJacobi) => {
                bad("circular ensembles use a periodic rule".into())
            }
            (EnsembleSpec::Jacobi { n, .. }, QuadratureRule::GaussJacobi) if n > 1 && !is_even_integer(beta) => bad(
                format!("Jacobi quadrature for N > 1 needs an even integer beta, got {beta}"),
            ),
            (EnsembleSpec::Jacobi { .. } | EnsembleSpec::Group { .. }, r) if r != QuadratureRule::GaussJacobi => {
                bad("Jacobi and group ensembles use Gauss-Jacobi rules".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub nodes_per_dim: usize,
    /// Value at half the nodes.
    pub previous: f64,
    pub rel_change: f64,
}

/// Σ w f over the tensor grid, returning (numerator, normalisation).
fn tensor_sum<F>(rules: &[Rule], f: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    let d = rules.len();
    if d == 0 {
        return f(&[]);
    }
    let first = &rules[0];
    let parts: Vec<(f64, f64)> = (0..first.len())
        .into_par_iter()
        .map(|i0| {
            let mut x = vec![0.0; d];
            x[0] = first.nodes[i0];
            let mut acc = (0.0, 0.0);
            let mut idx = vec![0usize; d];
            loop {
                let mut w = first.weights[i0];
                for k in 1..d {
                    x[k] = rules[k].nodes[idx[k]];
                    w *= rules[k].weights[idx[k]];
                }
                let (num, den) = f(&x);
                acc.0 += w * num;
                acc.1 += w * den;
                // odometer over dimensions 1..d
                let mut k = d;
                loop {
                    k -= 1;
                    if k == 0 {
                        return acc;
                    }
                    idx[k] += 1;
                    if idx[k] < rules[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1))
}

fn circ_factor(mu: f64, r: f64, theta: f64) -> f64 {
    (1.0 + r * r - 2.0 * r * theta.cos()).powf(mu)
}

fn circular_uniform(beta: f64, n: usize, mu: f64, r: f64, m: usize) -> (f64, f64) {
    let rules = vec![periodic_uniform(m); n];
    tensor_sum(&rules, |th| {
        let mut vd = 1.0;
        for j in 0..n {
            for k in j + 1..n {
                vd *= (2.0 * ((th[j] - th[k]) / 2.0).sin()).abs();
            }
        }
        let w = vd.powf(beta);
        let f: f64 = th.iter().map(|&t| circ_factor(mu, r, t)).product();
        (w * f, w)
    })
}

/// (|2 sin(g/2)|/g)^β, smooth on (0, 2π).
fn sinc_ratio(g: f64, beta: f64) -> f64 {
    ((2.0 * (g / 2.0).sin()).abs() / g).powf(beta)
}

fn circular_gaps(beta: f64, n: usize, mu: f64, r: f64, m: usize) -> Result<(f64, f64)> {
    let phi = periodic_uniform(m);
    Ok(match n {
        1 => tensor_sum(&[phi], |x| (circ_factor(mu, r, x[0]), 1.0)),
        2 => {
            // |2 sin(g/2)|^β = g^β (2π − g)^β · smooth
            let g = gauss_jacobi(m, beta, beta)?.mapped(0.0, TAU, 1.0);
            tensor_sum(&[phi, g], |x| {
                let (p, g) = (x[0], x[1]);
                let w = ((2.0 * (g / 2.0).sin()).abs() / (g * (TAU - g))).powf(beta);
                (w * circ_factor(mu, r, p) * circ_factor(mu, r, p + g), w)
            })
        }
        3 => {
            // g₁ = 2πu, g₂ = 2π(1−u)v, g₃ = 2π(1−u)(1−v); Jacobian ∝ (1−u)
            let u = gauss_jacobi_unit(m, beta, 2.0 * beta + 1.0)?;
            let v = gauss_jacobi_unit(m, beta, beta)?;
            tensor_sum(&[phi, u, v], |x| {
                let (p, u, v) = (x[0], x[1], x[2]);
                let g1 = TAU * u;
                let g2 = TAU * (1.0 - u) * v;
                let g3 = TAU * (1.0 - u) * (1.0 - v);
                let w = sinc_ratio(g1, beta) * sinc_ratio(g2, beta) * sinc_ratio(g3, beta);
                let f = circ_factor(mu, r, p) * circ_factor(mu, r, p + g1) * circ_factor(mu, r, p + g1 + g2);
                (w * f, w)
            })
        }
        _ => unreachable!("validated"),
    })
}

fn vandermonde(x: &[f64]) -> f64 {
    let mut v = 1.0;
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            v *= (x[j] - x[k]).abs();
        }
    }
    v
}

fn jacobi_grid(a: f64, b: f64, beta: f64, n: usize, mu: f64, x0: f64, m: usize) -> Result<(f64, f64)> {
    let rules = vec![gauss_jacobi_unit(m, a, b)?; n];
    Ok(tensor_sum(&rules, |x| {
        let w = vandermonde(x).powf(beta);
        let f: f64 = x.iter().map(|&y| (x0 - y).abs().powf(2.0 * mu)).product();
        (w * f, w)
    }))
}

fn group_grid(family: GroupFamily, n: usize, mu: f64, eps: f64, m: usize) -> Result<(f64, f64)> {
    let (a, b) = family.jacobi_weights();
    let dims = family.jacobi_dim(n);
    let rules = vec![gauss_jacobi(m, b, a)?; dims];
    let z = Complex64::new(1.0 + eps, 0.0);
    let fixed = match family {
        GroupFamily::OMinusEven => ((z - 1.0) * (z + 1.0)).norm().powf(2.0 * mu),
        _ => 1.0,
    };
    Ok(tensor_sum(&rules, |x| {
        let w = vandermonde(x).powi(2);
        let f: f64 = x
            .iter()
            .map(|&c| {
                let s = (1.0 - c * c).max(0.0).sqrt();
                let e = Complex64::new(c, s);
                ((z - e) * (z - e.conj())).norm().powf(2.0 * mu)
            })
            .product();
        (w * f * fixed, w)
    }))
}

/// The average on a single grid of `spec.nodes_per_dim` nodes.
pub fn quadrature_fixed(q: &MomentQuery, spec: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    spec.validate()?;
    if q.ensemble != spec.ensemble {
        return Err(Error::InvalidParameter("query and quadrature spec disagree on the ensemble".into()));
    }
    let m = spec.nodes_per_dim;
    let (num, den) = match (q.ensemble, spec.rule) {
        (EnsembleSpec::Circular { beta, n }, QuadratureRule::PeriodicUniform) => {
            circular_uniform(beta, n, q.mu, q.point, m)
        }
        (EnsembleSpec::Circular { beta, n }, _) => circular_gaps(beta, n, q.mu, q.point, m)?,
        (EnsembleSpec::Jacobi { a, b, beta, n }, _) => jacobi_grid(a, b, beta, n, q.mu, q.point, m)?,
        (EnsembleSpec::Group { family, n }, _) => group_grid(family, n, q.mu, q.point, m)?,
    };
    if q.mu == 0.0 {
        return Ok(1.0);
    }
    Ok(num / den)
}

/// The average, doubling the nodes from `spec.nodes_per_dim` until two
/// successive values agree to 1e−10.
pub fn quadrature_moment(q: &MomentQuery, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let mut s = *spec;
    let mut prev = quadrature_fixed(q, &s)?;
    loop {
        let next_nodes = s.nodes_per_dim * 2;
        if next_nodes > MAX_NODES || next_nodes.pow(s.dims() as u32) > MAX_GRID_POINTS {
            return Err(Error::QuadratureNonConvergence {
                prev,
                last: prev,
                nodes: s.nodes_per_dim,
            });
        }
        s.nodes_per_dim = next_nodes;
        let v = quadrature_fixed(q, &s)?;
        let rel = (v - prev).abs() / v.abs().max(f64::MIN_POSITIVE);
        if rel < DOUBLING_TOL {
            return Ok(QuadratureResult {
                value: v,
                nodes_per_dim: next_nodes,
                previous: prev,
                rel_change: rel,
            });
        }
        if next_nodes * 2 > MAX_NODES || (next_nodes * 2).pow(s.dims() as u32) > MAX_GRID_POINTS {
            return Err(Error::QuadratureNonConvergence {
                prev,
                last: v,
                nodes: next_nodes,
            });
        }
        prev = v;
    }
}

/// [`quadrature_moment`] with the ensemble's default rule.
pub fn quadrature_auto(q: &MomentQuery) -> Result<QuadratureResult> {
    quadrature_moment(q, &QuadratureSpec::for_ensemble(q.ensemble))
}
