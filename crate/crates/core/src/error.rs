use thiserror::Error;

/// Errors produced by the mapping library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),

    #[error("binary PE labels need {required_bits} bits but only {available_bits} are available")]
    LabelOverflow {
        required_bits: u32,
        available_bits: u32,
    },

    #[error("PE id {id} out of range for k = {k}")]
    PeOutOfRange { id: usize, k: usize },

    #[error("infeasible balance: {0}")]
    Infeasible(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
