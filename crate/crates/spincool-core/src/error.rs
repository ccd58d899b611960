use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("bias {0} outside [-1, 1]")]
    BiasOutOfRange(f64),
    #[error("spin index {index} out of range for {n} spins")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("{n} spins exceeds the supported maximum of {max}")]
    Capacity { n: usize, max: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid spin system: {0}")]
    InvalidSystem(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spin temperature undefined for bias {0}")]
    UndefinedTemperature(f64),
    #[error("function evaluated to a non-finite value at input {index}")]
    NonFinite { index: usize },
    #[error("empty grid")]
    EmptyGrid,
}

pub type Result<T> = core::result::Result<T, Error>;
