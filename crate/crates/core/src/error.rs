use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid adjacency for agent {agent}: {reason}")]
    InvalidAdjacency { agent: usize, reason: String },
    #[error("expected {expected} labels, found {found}")]
    MissingLabel { expected: usize, found: usize },
    #[error("bad group assignment: {0}")]
    BadGroupId(String),
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("target {0} is already revealed")]
    AlreadyRevealed(usize),
    #[error("search space of {subsets} subsets exceeds the guard of {limit}")]
    SearchSpaceTooLarge { subsets: u128, limit: u128 },
    #[error("lookahead depth {depth} outside 1..={budget}")]
    DepthOutOfRange { depth: usize, budget: usize },
    #[error("graph has no group assignment")]
    NoGroups,
    #[error("budget {budget} is below the group count {groups}")]
    BudgetBelowGroupCount { budget: usize, groups: usize },
    #[error("exact arithmetic required for this operation")]
    ExactArithmeticRequired,
    #[error("exact arithmetic would overflow on this graph (max degree {max_degree}); use the float backend")]
    ExactOverflow { max_degree: usize },
    #[error("no rows left after filtering")]
    EmptyAfterFiltering,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bad fixture parameters: {0}")]
    BadParams(String),
    #[error("too few agents for a train/test split ({train} train, {test} test)")]
    TooFewAgents { train: usize, test: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("data error: {0}")]
    Data(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Data(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Data(e.to_string())
    }
}
