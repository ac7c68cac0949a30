use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("polytope input is empty")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vertices span an affine subspace of dimension {found}, expected {expected}")]
    NotFullDimensional { expected: usize, found: usize },
    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
    #[error("integer overflow while converting {0} to machine integers")]
    Overflow(&'static str),
    #[error("projection of the frequency onto the face is zero")]
    ZeroProjection,
    #[error("frequency is not in the admissible set of the chain")]
    NotAdmissible,
    #[error("({0}, {1}) is not a covering pair of the face lattice")]
    NotACover(usize, usize),
    #[error("damped sum did not converge: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NonConvergent { residual: f64, tolerance: f64 },
    #[error("quadrature error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    BudgetExceeded { estimate: f64, tolerance: f64 },
    #[error("polynomial fit residual {residual:.3e} exceeds {tolerance:.3e}")]
    FitResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
