//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GammaError>;

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("eigenvalue {value:.3e} below the negativity tolerance")]
    NegativeEigenvalue { value: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty coefficient list")]
    EmptyCoefficients,
    #[error("matrices do not commute (residual {residual:.3e})")]
    NotCommuting { residual: f64 },
    #[error("matrix is not normal (residual {residual:.3e})")]
    NotNormal { residual: f64 },
    #[error("matrix is not a contraction (norm {norm:.6})")]
    NotContractive { norm: f64 },
    #[error("unsupported generator kind: {0}")]
    UnsupportedKind(String),
    #[error("joint diagonalization failed (off-diagonal residual {residual:.3e})")]
    JointDiagonalizationFailure { residual: f64 },
    #[error("power iteration did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("defect failure: I - P*P has eigenvalue {value:.3e}")]
    DefectFailure { value: f64 },
    #[error("tuple is pure (asymptotic limit vanishes), no unitary extension exists")]
    PureTuple,
    #[error("ill-conditioned intertwining solve (residual {residual:.3e})")]
    IllConditioned { residual: f64 },
    #[error("extensions are not unitarily isomorphic (residual {residual:.3e})")]
    NotIsomorphic { residual: f64 },
    #[error("not a contractive module map (residual {residual:.3e})")]
    NotAModuleMap { residual: f64 },
    #[error("target tuple is not a unitary module")]
    NotUnitaryModule,
    #[error("spectral gap {gap:.3e} too small for a stable projection")]
    GapTooSmall { gap: f64 },
    #[error("operator is not in the commutant (residual {residual:.3e})")]
    NotInCommutant { residual: f64 },
    #[error("operator violates the Brown-Halmos relations (residual {residual:.3e})")]
    NotToeplitz { residual: f64 },
    #[error("inconsistent linear system (residual {residual:.3e})")]
    Inconsistent { residual: f64 },
    #[error("intertwining relation violated (residual {residual:.3e})")]
    NotIntertwining { residual: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("linear algebra backend failure in {0}")]
    Linalg(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}
