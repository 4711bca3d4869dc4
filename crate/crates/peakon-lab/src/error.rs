use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Peakon index outside the state.
    #[error("peakon index {index} out of range for state of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// Pointwise ansatz evaluation requested at (or within the guard band of)
    /// a peak position, where the derivative is undefined.
    #[error("evaluation point x = {x} lies on the peak at q = {q} (guard band {guard:e})")]
    EvaluationAtPeak { x: f64, q: f64, guard: f64 },

    /// Coefficients do not satisfy the N-peakon admissibility relations.
    #[error("coefficients are not peakon-admissible: {condition}")]
    NotAdmissible { condition: String },

    /// Coefficients outside the hypotheses of the requested bound or identity.
    #[error("invalid coefficients: {0}")]
    InvalidParams(String),

    /// Integration tolerances outside (0, 1).
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    /// Closed-form evaluation at a singular time or vanishing denominator.
    #[error("closed form singular: {0}")]
    Singular(String),

    /// Initial data outside the preconditions of a fitting routine.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Grid constraints violated (size, finiteness, domain half-length).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Time step violates the advective CFL restriction.
    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    /// Non-finite value where a finite one is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Configuration / CLI validation failure.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
