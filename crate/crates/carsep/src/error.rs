use thiserror::Error;

/// Errors produced by algebra construction, state handling, and the
/// separability/entanglement routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("too many modes: {requested} requested, cap is {cap}")]
    TooManyModes { requested: usize, cap: usize },

    #[error("duplicate mode label {0}")]
    DuplicateLabel(u32),

    #[error("empty mode list")]
    EmptyModeList,

    #[error("label {0} is not a mode of this algebra")]
    UnknownLabel(u32),

    #[error("mode subsets must be disjoint (label {0} appears on both sides)")]
    OverlappingSubsets(u32),

    #[error("operator does not belong to the subalgebra on modes {labels:?} (residual {residual:.3e})")]
    NotInSubalgebra { labels: Vec<u32>, residual: f64 },

    #[error("state belongs to a different algebra (expected modes {expected:?}, got {got:?})")]
    AlgebraMismatch { expected: Vec<u32>, got: Vec<u32> },

    #[error("matrix is not a density: {0}")]
    NotAState(String),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("no product state extension: both marginal states are noneven")]
    NoProductExtension,

    #[error("state is not even (grading-asymmetry {0:.3e})")]
    NotEven(f64),

    #[error("parameter out of bounds: {0}")]
    ParamBounds(String),

    #[error("mixing weight k must lie in [0, 1], got {0}")]
    WeightOutOfRange(f64),

    #[error("operation requires a {expected}-mode system, got {got} modes")]
    WrongModeCount { expected: usize, got: usize },

    #[error("malformed decomposition: {0}")]
    MalformedDecomposition(String),

    #[error("expression parse error: {0}")]
    ExprParse(String),

    #[error("state specification error: {0}")]
    SpecFormat(String),

    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
