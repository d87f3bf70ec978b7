use thiserror::Error;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial degree {0} (must be >= 1)")]
    InvalidDegree(usize),

    #[error("no quadrature rule available for degree {0}")]
    UnsupportedDegree(usize),

    #[error("operator construction failed: {0}")]
    Construction(String),

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("boundary tagging failed: {0}")]
    Tagging(String),

    #[error("inadmissible state: {0}")]
    Inadmissible(String),

    #[error("positivity failure in element {element} at t = {time}: {detail}")]
    Positivity {
        element: usize,
        time: f64,
        detail: String,
    },

    #[error("boundary specification error: {0}")]
    Boundary(String),

    #[error("connectivity error: {0}")]
    Connectivity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("time step underflow at t = {t} (dt = {dt})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("entropy identity violated at t = {t}: residual {residual:e} exceeds {bound:e}")]
    IdentityViolation { t: f64, residual: f64, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Tagging(_) | Error::Boundary(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
