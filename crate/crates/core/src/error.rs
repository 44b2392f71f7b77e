use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two amplitudes/spectra were combined on different discretizations.
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The projection mode is (numerically) orthogonal to the state.
    #[error("null projection: success probability {probability:e} below 1e-12")]
    NullProjection { probability: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Tomographic measurement set does not span the operator space.
    #[error("ill-posed inversion: measurement operators have rank {rank}, need {required} (condition number {condition:e})")]
    IllPosed {
        rank: usize,
        required: usize,
        condition: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config { .. } | Error::InvalidArgument(_) => 2,
            Error::Numerical(_)
            | Error::NullProjection { .. }
            | Error::IllPosed { .. }
            | Error::DegenerateInput(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
