use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid wave packet: {0}")]
    InvalidPacket(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("{what} of size {size} exceeds the supported maximum of {max}")]
    Capacity {
        what: &'static str,
        size: usize,
        max: usize,
    },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("degenerate normalization: port permanents multiply to {0:e}")]
    DegenerateNormalization(f64),

    #[error("malformed label at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("invalid amplifier gain: {0}")]
    InvalidGain(String),
}
