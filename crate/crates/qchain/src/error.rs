use thiserror::Error;

/// Errors surfaced by the chain, spectral and Bethe-ansatz layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("eigensolver failed to converge at index {index}")]
    Convergence { index: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("singular parameters: denominator {denom} vanishes at n = {n}")]
    SingularParameter { n: i64, denom: String },

    #[error("parameter domain violation at index {index}: {what}")]
    ParameterDomain { index: i64, what: String },

    #[error("degenerate recurrence: A_{n} = 0 with n < N")]
    DegenerateRecurrence { n: usize },

    #[error("chain parameters rejected:\n{report}")]
    Validation { report: String },

    #[error(
        "orthonormality failure: worst pair ({i},{j}) deviates by {dev:e} (tol {tol:e}); \
         reduce N or loosen the tolerance"
    )]
    Orthonormality { i: usize, j: usize, dev: f64, tol: f64 },

    #[error("evaluation too close to pole of {denom}")]
    Pole { denom: String },

    #[error("operation requires the {expected} regime")]
    Regime { expected: String },

    #[error("tau = sqrt(q/(alpha beta gamma delta)) undefined: alpha*beta*gamma*delta <= 0")]
    TauUndefined,

    #[error("singular Bethe-root configuration: u_{i}^2 = u_{j}^2")]
    CoincidentRoots { i: usize, j: usize },

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
