use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the range where the space (or operation) is defined.
    #[error("range error: {0}")]
    Range(String),

    /// The operation does not apply to the given space family.
    #[error("family error: {0}")]
    Family(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),

    #[error("fields live on different grids")]
    GridMismatch,

    /// The requested frequencies exceed what the grid can represent.
    #[error("nyquist error: frequency {requested} exceeds grid maximum {available}")]
    Nyquist { requested: f64, available: f64 },

    /// A translated or dilated function would wrap around the torus.
    #[error("boundary error: {0}")]
    Boundary(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A precondition on the parameters of an experiment is violated.
    #[error("condition error: {0}")]
    Condition(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Range(msg.into()))
}
