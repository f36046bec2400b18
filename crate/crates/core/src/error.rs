use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid stage: {0}")]
    InvalidStage(String),
    #[error("not finitely generated within depth {depth}")]
    NotFinitelyGenerated { depth: usize },
    #[error("shen-depth-exceeded: {0}")]
    ShenDepthExceeded(String),
    #[error("endomorphism-not-positive: {0}")]
    EndomorphismNotPositive(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("width {width} is too small; at least 2 is required")]
    WidthTooSmall { width: usize },
    #[error("undecidable unit class: {0}")]
    UndecidableUnitClass(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
