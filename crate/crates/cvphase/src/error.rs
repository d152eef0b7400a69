use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),

    #[error("non-finite integrand value at x = {0}")]
    NonFinite(f64),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular covariance matrix")]
    Singular,

    #[error("truncation N = {got} too small, need at least {needed}")]
    Truncation { needed: usize, got: usize },

    #[error("no sign change in [{a}, {b}]")]
    NoBracket { a: f64, b: f64 },

    #[error("outside classically allowed region: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
