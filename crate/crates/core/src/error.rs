use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("qubit index {index} out of range for a {qubits}-qubit state")]
    QubitIndex { index: usize, qubits: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("amplitude {index} is not finite")]
    NonFinite { index: usize },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("projectors do not form a resolution of the identity: {0}")]
    InvalidProjectors(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("resource error: {0}")]
    Resource(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("classical channel is empty; receive would block")]
    WouldBlock,

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("handshake rejected: {0}")]
    Handshake(String),

    #[error("transport error: {0}")]
    Transport(#[from] std::io::Error),

    #[error("cannot write trace to {path}: {source}")]
    Sink {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
