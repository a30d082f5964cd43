use thiserror::Error;

/// Errors raised by tree, norm and experiment operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty tree has no rank")]
    EmptyTreeRank,
    #[error("operation requires a nonempty tree")]
    EmptyTree,
    #[error("generator size must be at least 1")]
    ZeroSize,
    #[error("enumeration index overflows u128 for node {0}")]
    IndexOverflow(String),
    #[error("node {0} is not in the tree")]
    NodeNotInTree(String),
    #[error("not a segment: {0}")]
    NotASegment(String),
    #[error("vectors live on different trees")]
    MixedTrees,
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("oracle cap exceeded: support has {size} nodes, cap is {cap}")]
    OracleCapExceeded { size: usize, cap: usize },
    #[error("support cap exceeded: support has {size} nodes, cap is {cap}")]
    SupportCapExceeded { size: usize, cap: usize },
    #[error("block supports are not completely incomparable (blocks {0} and {1})")]
    ComparableSupports(usize, usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tree too small: at most {max} incomparable regions available, {requested} requested")]
    TreeTooSmall { max: usize, requested: usize },
    #[error("insufficient incomparable nodes: need {needed}, tree has {available} (deficit {deficit})", deficit = needed - available)]
    InsufficientIncomparable { needed: usize, available: usize },
    #[error("sign-pattern cap exceeded: {size} blocks, cap is {cap}")]
    PatternCapExceeded { size: usize, cap: usize },
    #[error("invalid operation parameters: {0}")]
    InvalidOperation(String),
    #[error("schedule too large: {0}")]
    ScheduleTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate comparison: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
