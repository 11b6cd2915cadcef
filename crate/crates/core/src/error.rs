use thiserror::Error;

/// Errors raised by quiver operations, searches and certificate replay.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: loop at vertex {vertex}")]
    Loop { line: usize, vertex: usize },
    #[error("line {line}: 2-cycle between vertices {a} and {b}")]
    TwoCycle { line: usize, a: usize, b: usize },
    #[error("line {line}: arrow between frozen vertices {a} and {b}")]
    FrozenArrow { line: usize, a: usize, b: usize },
    #[error("vertex {vertex} is out of range (quiver has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("vertex {0} is frozen and cannot be mutated")]
    FrozenVertex(usize),
    #[error("quiver already has frozen vertices")]
    AlreadyFramed,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sign-coherence violated at vertex {0}")]
    SignCoherence(usize),
    #[error("quiver is not acyclic")]
    Cyclic,
    #[error("invalid triangular split: {0}")]
    InvalidSplit(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("invalid construction tree: {0}")]
    InvalidTree(String),
    #[error("synthesis failed: {0}")]
    SynthesisFailed(String),
    #[error("exact division failed: {0}")]
    InexactDivision(String),
    #[error("work budget exhausted")]
    WorkBudget,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
