use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty factor list")]
    EmptyFactorList,

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("level {level} needs {needed} factors on the {side} side, ladder provides {available}")]
    InsufficientLadder { level: usize, side: &'static str, needed: usize, available: usize },

    #[error("invalid factor spec: {0}")]
    InvalidSpec(String),

    #[error("factor spec is not a Type I spec with a Lebesgue tail on its side")]
    NotTypeITail,

    #[error("direct sum collision at {0}")]
    SpectrumCollision(i64),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("ambiguous zero classification at m = {m}: |value| = {value:e}, error bound = {bound:e}")]
    AmbiguousZero { m: i64, value: f64, bound: f64 },

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("not a complementary pair: {0}")]
    NotComplementary(String),

    #[error("peeling stalled at grid size {grid}: {reason}")]
    PeelingFailed { grid: u64, reason: String },

    #[error("{what} = {value} exceeds the limit {limit}")]
    Guardrail { what: &'static str, value: u64, limit: u64 },

    #[error("invalid grid mask: {0}")]
    InvalidMask(String),

    #[error("mask resolutions differ: {0} vs {1}")]
    ResolutionMismatch(u64, u64),

    #[error("no tiling: {0}")]
    NoTiling(String),

    #[error("value out of machine range: {0}")]
    Overflow(String),
}
