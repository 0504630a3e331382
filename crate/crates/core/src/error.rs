use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{divisor} does not divide {dividend}")]
    NonDivisible { divisor: u64, dividend: u64 },
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("prime {p} ramifies in Q(zeta_{n})")]
    Ramified { p: u64, n: u64 },
    #[error("precision error: {0}")]
    Precision(String),
    #[error("denominator p-exponent {exponent} exceeds precision {precision}")]
    PrecisionExhausted { exponent: u64, precision: u32 },
    #[error("local contexts differ")]
    ContextMismatch,
    #[error("slice keys do not match the fiber: {0}")]
    KeyMismatch(String),
    #[error("family is not locally constant at level {0}")]
    NotLocallyConstant(usize),
    #[error("default value has denominator prime {0} outside the support")]
    TailNotIntegral(String),
    #[error("slice above {0} does not cover its fiber")]
    FiberIncomplete(u64),
    #[error("adeles live on different towers")]
    TowerMismatch,
    #[error("target level {target} is below source level {source_level}")]
    LevelOrder { source_level: usize, target: usize },
    #[error("element is not contained in the open set: {0}")]
    NotContained(String),
    #[error("cylinders do not cover the fiber; uncovered place {0}")]
    NotACover(String),
    #[error("cannot decide membership at an archimedean place")]
    Undecided,
    #[error("splitting profile of {p} is constant 1 up to depth {depth}")]
    NoSplitting { p: u64, depth: usize },
    #[error("empty sequence")]
    EmptySequence,
    #[error("invalid depth {depth} (tower depth {max})")]
    InvalidDepth { depth: usize, max: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
