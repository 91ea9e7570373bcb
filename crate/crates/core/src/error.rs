use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown lattice label `{0}`")]
    UnknownLattice(String),
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("lattice is not positive definite")]
    NotPositiveDefinite,
    #[error("not a root: self-pairing is {0}, expected +-2")]
    NotARoot(i64),
    #[error("invalid signed permutation: {0}")]
    InvalidSignedPermutation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("enumeration budget exceeded: norm cutoff {required} needed, budget allows {budget}")]
    Budget { required: i64, budget: i64 },
    #[error("points live on different curves (tau mismatch)")]
    TauMismatch,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
