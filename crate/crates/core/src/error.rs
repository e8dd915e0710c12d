use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("quaternion {0:e} is too small to invert")]
    ZeroDivisor(f64),
    #[error("matrix is singular (det_H = {0:e})")]
    Singular(f64),
    #[error("eigenvalues of the complex adjoint do not pair up")]
    PairingFailure,
    #[error("singular values of the complex adjoint are not doubled")]
    DoublingFailure,
    #[error("eigenvalue clusters at {0} and {1} are not separated")]
    ClusterOverlap(String, String),
    #[error("Jordan chain construction is rank deficient ({0})")]
    ChainDefect(&'static str),
    #[error("span of the given vectors is empty")]
    EmptySpan,
    #[error("metric queries are not defined on complex slices")]
    FlavorUnsupported,
    #[error("eigenvalue has modulus {0}, expected 1")]
    NotUnitModulus(f64),
    #[error("element class is outside the catalog")]
    OutOfCatalogRow,
    #[error("binomial coefficient C({0}, {1}) overflows")]
    Overflow(u64, u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("numeric Jordan analysis supports dim <= 8, got {0}")]
    TooLarge(usize),
}
