use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no facility open")]
    EmptyFacilitySet,

    #[error("unknown {side} id {id} (instance has {count})")]
    UnknownPoint {
        side: &'static str,
        id: usize,
        count: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no stars for degenerate bi-point")]
    DegenerateBiPoint,

    #[error("enumeration guard exceeded: {count} candidates (limit {limit})")]
    GuardExceeded { count: u128, limit: u128 },

    #[error("pseudo-solution opens {size} facilities, more than k + c = {limit}")]
    TooManyFacilities { size: usize, limit: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph is disconnected: component of vertex {vertex} has {size} of {total} vertices")]
    Disconnected {
        vertex: usize,
        size: usize,
        total: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
