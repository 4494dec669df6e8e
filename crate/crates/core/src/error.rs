use thiserror::Error;

/// Errors shared by every layer of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A brute-force oracle was asked for a problem size past its guard.
    #[error("dimension too large for brute-force evaluation: {what} = {got} exceeds {max}")]
    DimensionTooLarge {
        what: &'static str,
        got: usize,
        max: usize,
    },

    /// A curvature vector failed the cone precondition of an operation.
    #[error("cone violation: {0}")]
    ConeViolation(String),

    #[error("index out of range: {what} = {got} not allowed for n = {n}")]
    IndexOutOfRange {
        what: &'static str,
        got: usize,
        n: usize,
    },

    /// Denominator fell below the division guard.
    #[error("division by small quantity: {what} = {value:e}")]
    DivisionBySmall { what: &'static str, value: f64 },

    /// A frame was requested within one cell of a pole without the
    /// regularized (parity-extended) stencil.
    #[error("pole singularity: polar node {index} lacks a regularized stencil")]
    PoleSingularity { index: usize },

    /// The adaptive step controller shrank the step below its floor.
    #[error("step rejected at t = {t}: dt fell below the floor {floor:e}")]
    StepRejected { t: f64, floor: f64 },

    /// The evolving graph lost validity (negative or non-finite radius).
    #[error("graph degenerate at t = {t}: {reason}")]
    GraphDegenerate { t: f64, reason: String },

    /// A monotonicity invariant failed beyond its band; the flow aborts.
    #[error("monotonicity violated at t = {t}: {detail}")]
    MonotonicityViolated { t: f64, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
