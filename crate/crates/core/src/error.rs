use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested first-harmonic magnitude exceeds what a ±1 switching
    /// waveform can produce (2/π).
    #[error("first-harmonic amplitude {beta_norm} is unreachable (maximum is 2/pi)")]
    UnreachableAmplitude { beta_norm: f64 },

    #[error("feed amplitude is zero at element (row {row}, col {col})")]
    ZeroExcitation { row: usize, col: usize },

    #[error("schedule is not aligned to the clock grid: {0}")]
    NotQuantized(String),

    #[error("pattern boundary reached: {0}")]
    Boundary(String),
}

pub type Result<T> = std::result::Result<T, Error>;
