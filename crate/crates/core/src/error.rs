use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate gram matrix")]
    Degenerate,
    #[error("lattice is not even")]
    NotEven,
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("not an ADE configuration: {0}")]
    NotAde(String),
    #[error("base point lies on a reflection wall")]
    OnWall,
    #[error("subset is not admissible: {0}")]
    NotInS(String),
    #[error("orbit cap exceeded ({0})")]
    OrbitCapExceeded(usize),
    #[error("per-class time budget exceeded")]
    BudgetExceeded,
    #[error("subgroup is not totally isotropic")]
    NotIsotropic,
    #[error("ADE type mismatch: {0}")]
    TypeMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
