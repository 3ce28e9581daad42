use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("constant column: {0}")]
    ConstantColumn(String),
    #[error("missing value in column {column} at row {row}")]
    MissingValue { column: String, row: usize },
    #[error("column {0} not found")]
    MissingColumn(String),
    #[error("column {0} is not numeric")]
    NonNumeric(String),
    #[error("categorical column {0} needs at least two observed levels")]
    TooFewLevels(String),
    #[error("column {column} has unseen level {level:?}")]
    UnknownLevel { column: String, level: String },
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("column lengths differ")]
    RaggedTable,
    #[error("all projections are equal")]
    DegenerateProjection,
    #[error("too few distinct projections above the initial knot")]
    DegenerateKnots,
    #[error("design matrix is singular or ill-conditioned")]
    SingularDesign,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("degenerate response: all rows identical")]
    DegenerateResponse,
    #[error("zero variance")]
    ZeroVariance,
    #[error("feature {feature} has fewer than {bins} distinct values; use fewer bins")]
    TooFewDistinct { feature: usize, bins: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
