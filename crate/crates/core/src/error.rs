use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("delay bin {bin} out of range (|u| must be < {limit})")]
    InvalidDelayBin { bin: i64, limit: usize },

    #[error("Doppler bin {bin} out of range (must be < {limit})")]
    InvalidDopplerBin { bin: usize, limit: usize },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid spectrum: {0}")]
    InvalidEsd(String),

    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("weight grid does not match the moments grid: {0}")]
    GridMismatch(String),

    #[error("weights contain Doppler-spread entries; this path handles zero-Doppler weights only")]
    DopplerSpreadWeights,

    #[error("empty region of interest: {0}")]
    EmptyRegion(String),

    #[error("KKT system is singular: rank {rank} of {dim}")]
    SingularKkt { rank: usize, dim: usize },

    #[error("gradient is zero: current point is stationary")]
    ZeroGradient,

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
