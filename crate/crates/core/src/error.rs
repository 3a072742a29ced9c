use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// A function spec failed validation.
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    /// A transform evaluated to a non-finite value at a quadrature node.
    #[error("non-finite evaluation: {0}")]
    Evaluation(String),

    /// An internal numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// No coefficient cleared the tolerance but L2 mass remains beyond the
    /// truncation order, so the rank cannot be decided at this order.
    #[error(
        "no coefficient above tolerance up to order {order}, \
         but tail mass {tail_mass:.3e} remains; raise the truncation order"
    )]
    RankExceedsTruncation { order: usize, tail_mass: f64 },

    /// The transform is constant almost everywhere, so no rank exists.
    #[error("function is constant almost everywhere")]
    ConstantFunction,

    /// The transform is symmetric almost everywhere; scale scans require an
    /// odd component.
    #[error("function is symmetric almost everywhere; scale scans need an odd component")]
    SymmetricFunction,

    /// The operation is only defined for polynomial transforms.
    #[error("operation requires a polynomial base (poly or hermite kind)")]
    NonPolynomialSpec,

    /// The Hurst index sits exactly on a regime boundary where the prediction
    /// is not defined.
    #[error("H = {hurst} sits on the excluded regime boundary 1 - 1/(2k) for k = {rank}")]
    BoundaryExcluded { hurst: f64, rank: usize },

    /// The circulant embedding produced a significantly negative eigenvalue.
    #[error(
        "circulant embedding produced eigenvalue {min_eigenvalue:.6e} \
         (largest is {max_eigenvalue:.6e}); covariance is not embeddable"
    )]
    Embedding {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
