use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e} after {subdivisions} subdivisions")]
    NotConverged { estimate: f64, error: f64, subdivisions: usize },

    /// A root could not be bracketed; the trace lists `(E, F(E))` samples.
    #[error("no sign change of the eigenvalue function in [{lo}, {hi}]; trace: {trace:?}")]
    Bracket { lo: f64, hi: f64, trace: Vec<(f64, f64)> },

    #[error("root refinement failed: {0}")]
    RootNotFound(String),

    /// A consistency check between two independent routes failed.
    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    /// An asymptotic formula was requested outside its regime.
    #[error("regime mismatch: {0}")]
    Regime(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
