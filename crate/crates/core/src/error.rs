use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("n = {n} exceeds the enumeration cap of {cap} chords")]
    Capacity { n: usize, cap: usize },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("no bubbles of size {q} observed in {samples} sampled diagrams")]
    EmptyEstimate { q: usize, samples: u64 },

    #[error("spectral check failed: {0}")]
    Verification(String),

    #[error("process step requested on a crystallized diagram")]
    AlreadyCrystallized,
}

pub type Result<T> = std::result::Result<T, Error>;
