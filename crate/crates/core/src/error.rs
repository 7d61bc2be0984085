use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not residuated: no greatest z with z ∧ {x} ≤ {y}")]
    NotResiduated { x: String, y: String },

    #[error("not a lattice: {0}")]
    NotLattice(String),

    #[error("no adjoint: the candidate set for element {element} has no extremal element")]
    NoAdjoint { element: String },

    #[error("map is not monotone: {a} ≤ {b} but f({a}) ≰ f({b})")]
    NotMonotone { a: String, b: String },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("enumeration budget exceeded: {requested} candidates requested, budget {limit}")]
    Budget { requested: u128, limit: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no classifier exists for the given formula")]
    NoClassifier,

    #[error("functional formula is not the graph of any morphism")]
    NoGraph,

    #[error("formula is not an equivalence relation: {0}")]
    NotEquivalence(String),

    #[error("target is not complete: {0}")]
    NotComplete(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
