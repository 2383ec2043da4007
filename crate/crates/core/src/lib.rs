//! Moments of characteristic polynomials of circular and Jacobi
//! β-ensembles and the classical groups, through Jack-polynomial
//! hypergeometric series, with asymptotic exponents and independent
//! numerical oracles.

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with
// non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fit;
pub mod hyperg;
pub mod integrate;
pub mod jack;
pub mod jack_oracle;
pub mod param;
pub mod partitions;
pub mod rmt;
pub mod szego;
pub mod toeplitz;
pub mod verify;

pub use error::{Error, Result};
pub use hyperg::{
    hyp1f0_equal, hyp1f0_equal_with, hyp2f1_equal, hyp2f1_equal_with, series_term, series_term_f64,
    Hyp2F1Params, SeriesConfig, SeriesResult, TermValue,
};
pub use param::Param;
pub use partitions::{dominance_leq, enumerate_partitions, enumerate_partitions_capped, Partition};
