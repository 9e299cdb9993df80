use num_complex::Complex64;
use thiserror::Error;

use crate::opcore::CardinalDim;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the numerical layers. Parse errors live in
/// [`crate::specfile::SpecError`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("materialized size {requested} exceeds the dense cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("{0} did not converge")]
    NonConvergence(&'static str),

    #[error("eigenvalue {eigenvalue} lies within {distance:.3e} of the contour (clearance {clearance:.3e})")]
    ContourClearance {
        eigenvalue: Complex64,
        distance: f64,
        clearance: f64,
    },

    #[error("eigenvalue {0} is not enclosed by the contour")]
    EigenvalueNotEnclosed(Complex64),

    #[error("contour region contains or winds around 0")]
    ContourEnclosesZero,

    #[error("contour region crosses the branch cut at angle {0}")]
    ContourCrossesCut(f64),

    #[error("resolvent solve failed at quadrature node {node} (lambda = {lambda})")]
    SingularResolvent { node: usize, lambda: Complex64 },

    #[error("eigenvalue {0} lies on the branch cut")]
    EigenvalueOnCut(Complex64),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix exponential overflowed (norm {0:.3e})")]
    Overflow(f64),

    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("operator is not an isometry on the truncation interior (defect {0:.3e})")]
    NotInteriorIsometry(f64),

    #[error("zero eigenvalue or sample point at index {0}")]
    ZeroEigenvalue(usize),

    #[error("depth {depth} exceeds the truncation horizon {max}")]
    DepthTooLarge { depth: usize, max: usize },

    #[error("time {0} is not admissible for this realization")]
    InadmissibleTime(f64),

    #[error("eigenvalue cluster at {center} lies within the cluster radius {radius:.3e} of 0")]
    ClusterNearZero { center: Complex64, radius: f64 },

    #[error("spectral projector basis is ill conditioned (condition {0:.3e})")]
    ProjectorConditioning(f64),

    #[error("operator is not embeddable: kernel {kernel}, cokernel {cokernel}")]
    NotEmbeddable {
        kernel: CardinalDim,
        cokernel: CardinalDim,
    },

    #[error("no constructor available: {0}")]
    Unsupported(String),
}
