//! Independent numerical oracles: Gauss rules, direct quadrature for small N
//! and Metropolis sampling.

pub mod gauss;
pub mod mcmc;
pub mod quadrature;

pub use mcmc::{linear_statistic_check, mc_moment, mcmc_sample, ChainConfig, ChainStats, LinearStatistic};
pub use quadrature::{quadrature_auto, quadrature_moment, QuadratureResult, QuadratureRule, QuadratureSpec};
