use thiserror::Error;

/// Errors raised by the algebra kernels.
///
/// `InexactDivision` is not a numerical failure: upstream it signals that an
/// integrality statement failed at the requested truncation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("invalid ring descriptor: {0}")]
    InvalidRing(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable tables differ")]
    VarMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("substitution for `{0}` has a non-nilpotent constant term")]
    NonNilpotentSubstitution(String),
    #[error("leading coefficient is not invertible: {0}")]
    NonInvertibleLeadingCoefficient(String),
    #[error("series is not invertible: {0}")]
    NotInvertible(String),
    #[error("series is zero")]
    ZeroSeries,
    #[error("incompatible morphisms: {0}")]
    IncompatibleMorphisms(String),
    #[error("morphism fails the defining identity at {0}")]
    MorphismInvalid(String),
    #[error("element is not homogeneous")]
    NonHomogeneous,
    #[error("element is not in the lattice: {0}")]
    NotInLattice(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("result is not symmetric in the roots: {0}")]
    NonSymmetricResult(String),
    #[error("bad residue representatives: {0}")]
    BadRepresentatives(String),
    #[error("linear system is singular: {0}")]
    SingularSystem(String),
    #[error("gcd did not stabilize below k = {0}")]
    Unstabilized(u64),
    #[error("degree {requested} exceeds context truncation {available}")]
    DegreeOutOfRange { requested: u32, available: u32 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
