use thiserror::Error;

/// Errors reported by tree constructors and operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {0} does not exist in this caterpillar")]
    UnknownVertex(String),

    #[error("key {key} is outside 1..={n}")]
    KeyOutOfRange { key: usize, n: usize },

    #[error("access {key} is outside 1..={n}")]
    AccessOutOfRange { key: usize, n: usize },

    #[error("({parent}, {child}) is not a tree edge")]
    NotAnEdge { parent: String, child: String },

    #[error("weight vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("weight vector must be nonempty")]
    EmptyWeights,

    #[error("weights sum to zero; at least one access is required")]
    ZeroTotalWeight,

    #[error("{0} is not a leaf of the current graph")]
    NotAGraphLeaf(String),

    #[error("projection target is empty or induces a disconnected subgraph")]
    DisconnectedProjection,

    #[error("trees live on different caterpillars")]
    CaterpillarMismatch,

    #[error("key ranges differ: {0} vs {1}")]
    KeyRangeMismatch(usize, usize),

    #[error("tree is not in legs-above form")]
    NotLegsAboveForm,

    #[error("tree has free leg nodes")]
    FreeLegsPresent,

    #[error("leg ordering is not a permutation of the leg set")]
    BadLegOrdering,

    #[error("state space of {count} trees exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u64 },

    #[error("rotation {index} of the sequence is not applicable: {source}")]
    SequenceStuck { index: usize, source: Box<Error> },

    #[error("generated sequence does not replay to the requested target")]
    ReplayMismatch,

    #[error("malformed tree: {0}")]
    MalformedTree(String),
}

pub type Result<T> = std::result::Result<T, Error>;
