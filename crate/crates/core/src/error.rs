use thiserror::Error;

/// Failures raised by the algebra, elimination, normalization and flow layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("generator count mismatch: {0} vs {1}")]
    GeneratorMismatch(usize, usize),
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("series has zero constant term and is not a unit")]
    NonUnit,
    #[error("inverse of a non-constant exact series needs an explicit truncation cap")]
    UnboundedInverse,
    #[error("operator is not invertible: {0}")]
    NotInvertible(String),
    #[error("operator is not monic: {0}")]
    NotMonic(String),
    #[error("operator has xi-order {found}, expected {expected}")]
    WrongOrder { expected: i64, found: i64 },
    #[error("only differential operators act on local sections; found xi^{0}")]
    NotDifferential(i64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degree vector must be nonempty and nondecreasing: {0:?}")]
    BadDegrees(Vec<i64>),
    #[error("entry ({row},{col}) is not a pure xi-monomial of exponent {exponent}")]
    NotSymbolic { row: usize, col: usize, exponent: i64 },
    #[error("truncation exhausted: {0}")]
    TruncationExhausted(String),
    #[error("entry ({row},{col}) still has a pole after tilde")]
    PoleRemaining { row: usize, col: usize },
    #[error("evaluation matrix is singular; no unit pivot in row {0}")]
    NotEliminable(usize),
    #[error("elimination did not converge within {0} sweeps")]
    EliminationStalled(usize),
    #[error("selected normalization x for row {row} has zero constant term")]
    NonUnitPivot { row: usize },
    #[error("invalid choice for row {row}: {reason}")]
    InvalidChoice { row: usize, reason: String },
    #[error("xi-floor exhausted: {0}")]
    FloorExhausted(String),
    #[error("section counts cannot come from a free module (twist {twist}, deficit {deficit})")]
    NotFree { twist: i64, deficit: i64 },
    #[error("bad scenario: {0}")]
    Scenario(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
