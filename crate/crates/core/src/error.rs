use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty color grid")]
    EmptyGrid,
    #[error("grid is not square: row {row} has {len} entries, expected {n}")]
    NonSquare { row: usize, len: usize, n: usize },
    #[error("non-positive color {value} at ({row}, {col})")]
    NonPositiveEntry { row: usize, col: usize, value: i64 },
    #[error("{0} vertices exceeds the supported maximum")]
    TooLarge(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("substitution range bound m = {0} must be at least 2")]
    BoundTooSmall(u64),
    #[error("substitution covers {got} colors, coloring has {expected}")]
    SubstitutionSize { expected: usize, got: usize },
    #[error("n * m^2 = {n} * {m}^2 exceeds the 64-bit exact integer range")]
    MagnitudeGuard { n: usize, m: u64 },
    #[error("integer overflow in matrix product")]
    ArithmeticOverflow,
    #[error("invalid stopping policy: {0}")]
    BadPolicy(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
