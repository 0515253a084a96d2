use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Two indexes were built against different hash suites and cannot be
    /// intersected with each other. Names the first field that differs.
    #[error("hash suites differ in `{0}`; indexes are not interoperable")]
    SuiteMismatch(&'static str),

    #[error("resolution {t} out of range (finest stored is {max})")]
    ResolutionOutOfRange { t: u32, max: u32 },

    #[error("group id {z} out of range at resolution {t}")]
    GroupOutOfRange { z: u64, t: u32 },

    #[error("need at least {min} sets, got {got}")]
    TooFewSets { min: usize, got: usize },

    #[error("workload spec infeasible: {0}")]
    InfeasibleWorkload(String),

    #[error("corrupt block stream: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
