use thiserror::Error;

/// Which half of a nondestructive precise measurement failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailedCondition {
    Precise,
    Nondisturbing,
}

impl std::fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailedCondition::Precise => f.write_str("not precise"),
            FailedCondition::Nondisturbing => f.write_str("disturbs the observable"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum WayError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator has an eigenvalue at zero; logarithm undefined")]
    SingularOperator,

    #[error("{condition}: basis state {basis_index} has residual {residual:.3e}")]
    NotPreciseOrDisturbing {
        condition: FailedCondition,
        basis_index: usize,
        residual: f64,
    },

    #[error("eigenstructure check failed (residual {residual:.3e})")]
    StructureMismatch { residual: f64 },

    #[error("expected a {expected} conserved pair")]
    KindMismatch { expected: &'static str },

    #[error("conservation law violated (residual {residual:.3e})")]
    ConservationViolated { residual: f64 },

    #[error("state lies in the kernel of a conserved factor")]
    KernelState,

    #[error("eigenvalues must be strictly positive")]
    NonPositiveEigenvalue,

    #[error("at least two distinct levels are required")]
    TooFewLevels,

    #[error("eigenvalues must be strictly ascending")]
    NotAscending,

    #[error("|L2| is constant, R is identically 1")]
    ConstantModulus,

    #[error("|L2| has a zero eigenvalue")]
    NonPositiveSpectrum,

    #[error("not a density operator: {reason}")]
    NotDensityOperator { reason: &'static str },
}

pub type Result<T> = std::result::Result<T, WayError>;
