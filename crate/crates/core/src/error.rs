//! Error type shared across the library.

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the mathematical domain of the operation
    /// (e.g. a non-positive scale, an order at a pole).
    #[error("domain error: {0}")]
    Domain(String),

    /// The inputs are individually valid but the requested combination is
    /// not (e.g. a profile whose declared tail is not integrable against
    /// the transform weight).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An adaptive quadrature ran out of subdivision budget before meeting
    /// its tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    /// Two independent evaluation routes for the same quantity disagreed
    /// beyond the internal consistency threshold.
    #[error("route disagreement: {0}")]
    RouteDisagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
