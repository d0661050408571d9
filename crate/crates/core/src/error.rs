use thiserror::Error;

use crate::model::Demand;

#[derive(Debug, Error)]
pub enum GmcError {
    #[error("duplicate point id `{0}`")]
    DuplicatePointId(String),
    #[error("points `{0}` and `{1}` share both coordinates")]
    DuplicateCoordinates(String, String),
    #[error("strict instance violated: points `{0}` and `{1}` share a {2}")]
    NotStrict(String, String, &'static str),
    #[error("unknown point id `{0}`")]
    UnknownPoint(String),
    #[error("demand from `{0}` to itself")]
    SelfDemand(String),
    #[error("coordinate {0} is outside the supported range")]
    CoordinateRange(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("strip boundary at {0} coincides with an input point")]
    BoundaryOnPoint(i64),
    #[error("rows do not hit the y-interval of a demand")]
    RowsMissDemand,
    #[error("malformed cut segment: ylo must be below yhi")]
    MalformedSegment,
    #[error("{what} has {size} items, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),
    #[error("wrong demand kind: {0}")]
    WrongKind(String),
    #[error("point `{0}` is missing its {1}")]
    MissingAttribute(String, &'static str),
    #[error("solution infeasible: {} violated demands", .0.len())]
    Infeasible(Vec<Demand>),
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("cnf parse error on line {line}: {message}")]
    Cnf { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, GmcError>;
