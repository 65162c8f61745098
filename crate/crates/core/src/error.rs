use thiserror::Error;

/// Errors raised by graph construction, verification inputs and the
/// century pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("empty vertex set")]
    EmptySet,
    #[error("target set unreachable from vertex {0}")]
    Unreachable(usize),
    #[error("cannot compare a path with itself")]
    SamePath,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("buildings overlap at vertex {0}")]
    OverlappingBuildings(usize),
    #[error("component containing vertex {0} has no building")]
    UncoveredComponent(usize),
    #[error("building {0} is not connected")]
    DisconnectedBuilding(usize),
    #[error("graph has {n} vertices, cap is {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("empty bag list")]
    EmptyDecomposition,
    #[error("bag {bag} contains vertex {vertex} outside the subject set")]
    BagOutsideSubject { bag: usize, vertex: usize },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("pattern too large: {0} vertices")]
    PatternTooLarge(usize),
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("century {century}, {op}: {detail}")]
    Invariant {
        century: usize,
        op: &'static str,
        detail: String,
    },
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invariant(century: usize, op: &'static str, detail: impl Into<String>) -> Error {
    Error::Invariant {
        century,
        op,
        detail: detail.into(),
    }
}
