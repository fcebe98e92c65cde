use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("invalid problem parameters: {0}")]
    InvalidParams(String),

    #[error("no ground state: {0}")]
    NoGroundState(String),

    #[error("truncation radius too small: {0}")]
    TruncationTooSmall(String),

    #[error("no decay plateau: {0}")]
    NoPlateau(String),

    #[error("quadrature did not converge: relative change {change:.3e} after {levels} refinements")]
    QuadratureNotConverged { change: f64, levels: usize },

    #[error("degenerate function: both |u|_p and |u|_2* vanish")]
    DegenerateFunction,

    #[error("degenerate field: barycenter undefined, max of the averaged density is {0:.3e}")]
    DegenerateField(f64),

    #[error("interaction plateau not reached: drift {0:.3e} over the last three rho values")]
    PlateauNotReached(f64),

    #[error("no sign change of the barycenter along the axis: {0}")]
    NoSignChange(String),

    #[error("line search stalled at iteration {0}")]
    LineSearchStalled(usize),

    #[error("io error: {0}")]
    Io(String),

    #[error("config error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
