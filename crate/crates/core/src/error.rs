use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Every violated precondition found while validating a configuration.
    #[error("configuration error:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("numerical failure at t = {t_tilde}: {reason}")]
    NumericalFailure { t_tilde: f64, reason: String },

    #[error(
        "boundary guard tripped at t = {t_tilde}: |psi| = {modulus:.3e} at node {node} \
         exceeds {tolerance:.1e}; enlarge the domain"
    )]
    BoundaryGuard {
        t_tilde: f64,
        node: usize,
        modulus: f64,
        tolerance: f64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit status for the CLI, one code per category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::Config(_) => 3,
            Error::NumericalFailure { .. } => 4,
            Error::BoundaryGuard { .. } => 5,
            Error::Io(_) => 6,
        }
    }
}
