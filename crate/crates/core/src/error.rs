use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("a once-punctured polygon needs at least 4 vertices, got {0}")]
    SurfaceTooSmall(usize),
    #[error("`{0}` is not an arc of the once-punctured {1}-gon")]
    InvalidArc(String, usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not a triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("`{0}` belongs to the triangulation; its expansion is the variable itself")]
    ArcInTriangulation(String),
    #[error("all radii are notched; there is no ideal triangulation")]
    NoIdealForm,
    #[error("size bound exceeded: n = {n} > {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("inexact division of Laurent polynomials")]
    InexactDivision,
    #[error("cannot substitute a non-monomial for a variable with negative exponent")]
    NonMonomialSubstitution,
    #[error("the collection is not pairwise compatible")]
    Incompatible,
    #[error("the collection is compatible with the triangulation")]
    NothingToProve,
    #[error("expected only peripheral arcs")]
    NotPeripheral,
}

pub type Result<T> = std::result::Result<T, Error>;
