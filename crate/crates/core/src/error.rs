use thiserror::Error;

/// Errors surfaced by the toolkit. Precondition violations are reported, never
/// silently repaired.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),

    #[error("vertex {vertex} out of range for graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("unknown edge id {0}")]
    UnknownEdge(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("vertex {vertex} has degree {degree}, expected 2")]
    DegreeNotTwo { vertex: usize, degree: usize },

    #[error("vertex {0} has two parallel incident edges; splitting off needs distinct neighbors")]
    NeighborsNotDistinct(usize),

    #[error("graph with {vertices} vertices exceeds the enumeration bound {bound}")]
    SizeBoundExceeded { vertices: usize, bound: usize },

    #[error("the given set is independent; no circuit exists")]
    NoCircuit,

    #[error("edge copy index {copy} out of range 1..={max}")]
    CopyIndexOutOfRange { copy: usize, max: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate draw budget exhausted after {attempts} attempts: {context}")]
    BudgetExhausted { attempts: usize, context: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
