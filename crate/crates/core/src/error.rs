use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node ({row}, {col}) is outside the diagram of {partition}")]
    OutsideDiagram {
        partition: String,
        row: usize,
        col: usize,
    },

    #[error("partitions have unequal weights ({0} vs {1})")]
    UnequalWeights(usize, usize),

    #[error("partition {partition} has {len} parts but only {n} variables are available")]
    TooManyParts {
        partition: String,
        len: usize,
        n: usize,
    },

    #[error("denominator parameter hits a lattice pole at cell ({row}, {col})")]
    PochhammerPole { row: usize, col: usize },

    #[error("series diverging: layer magnitudes grew for {run} consecutive weights up to weight {weight} (partial sum {partial})")]
    Divergence {
        partial: f64,
        weight: usize,
        run: usize,
    },

    #[error("weight {weight} exceeds the oracle degree cap {cap}")]
    DegreeCap { weight: usize, cap: usize },

    #[error("degenerate eigenvalues for {kappa} and {mu} at alpha = {alpha}")]
    DegenerateAlpha {
        kappa: String,
        mu: String,
        alpha: String,
    },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("only {0} converged points available, at least 4 are needed")]
    InsufficientData(usize),

    #[error("quadrature did not converge at {nodes} nodes per dimension (last two values {prev} and {last})")]
    QuadratureNonConvergence { prev: f64, last: f64, nodes: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
