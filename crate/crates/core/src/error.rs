use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed signature: {0}")]
    MalformedSignature(String),
    #[error("angle string has {angles} digits but the triangulation has {tetrahedra} tetrahedra")]
    AngleCountMismatch { angles: usize, tetrahedra: usize },
    #[error("not taut: {0}")]
    NotTaut(String),
    #[error("not veering: {0}")]
    NotVeering(String),
    #[error("triangulation is not orientable")]
    NonOrientable,
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("not a spanning tree: {0}")]
    NotATree(String),
    #[error("not a turn: {0}")]
    NotATurn(String),
    #[error("not a closed cycle: {0}")]
    NotAClosedCycle(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("invalid surgery curve: {0}")]
    InvalidCurve(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("simplification budget exceeded ({} generators left)", best.generators.len())]
    BudgetExceeded { best: Box<crate::group_theory::Presentation> },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
