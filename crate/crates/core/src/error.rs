use thiserror::Error;

use crate::operator::ConvergenceReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty point set")]
    EmptySet,

    #[error("empty {alpha}-cut")]
    EmptyCut { alpha: f64 },

    #[error("fuzzy set has empty support")]
    EmptySupport,

    #[error("value {value} outside [0, 1]")]
    OutOfUnitInterval { value: f64 },

    #[error("contraction constant {0} out of range [0, 1)")]
    ContractionOutOfRange(f64),

    #[error("letter {letter} outside index set 1..={alphabet}")]
    LetterOutOfRange { letter: u32, alphabet: usize },

    #[error("invalid grey level map: {0}")]
    InvalidGreyMap(String),

    #[error("grey level map must vanish at 0")]
    GreyNonzeroAtZero,

    #[error("grey level map never reaches level {alpha}")]
    LevelUnreachable { alpha: f64 },

    #[error("system is not admissible: {}", .0.join("; "))]
    NotAdmissible(Vec<String>),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("support size {size} exceeds cap {cap}")]
    CapExceeded {
        size: usize,
        cap: usize,
        partial: Option<Box<ConvergenceReport>>,
    },

    #[error("invalid number {0:?}")]
    Number(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("field {path}: {message}")]
    Field { path: String, message: String },

    #[error("scene validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
