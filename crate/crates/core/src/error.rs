use thiserror::Error;

pub type Result<T> = std::result::Result<T, JcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JcError {
    #[error("invalid truncation n_max = {0}: at least 2 photon levels above vacuum are required")]
    InvalidTruncation(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("photon number {n} is outside the truncated space (n_max = {n_max})")]
    IndexOutOfRange { n: usize, n_max: usize },

    #[error("Hermite function order {n} at x = {x} is outside the evaluation envelope")]
    OutOfEnvelope { n: usize, x: f64 },

    #[error("nonphysical function of order {m} overflows at x = {x}")]
    Overflow { m: usize, x: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("coupling lambda must be nonzero")]
    ZeroCoupling,

    #[error(
        "reality condition violated: delta^2 = {delta_sq} < {required} \
         (the detuned partner exists only if delta^2 >= n lambda^2)"
    )]
    RealityCondition { delta_sq: f64, required: f64 },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported atomic unitary '{0}' (expected sigma_z or sigma_y)")]
    UnsupportedUnitary(String),

    #[error("nonphysical seeds of {0} are not representable in the Fock basis; use the grid checks in `darboux`")]
    DeferredToGrid(String),

    #[error("nodes {0} and {1} are not adjacent in the same sequence")]
    NonAdjacentNodes(i64, i64),

    #[error("seed functions are linearly dependent on the whole grid")]
    ProportionalSeeds,

    #[error("det M is near zero on {fraction:.1}% of the interior (limit 5%)")]
    SingularWindow { fraction: f64 },

    #[error("exact seed derivatives were requested but the seed matrix carries none")]
    MissingSlope,

    #[error("fit window holds {0} usable points; at least 100 are needed")]
    TooFewPoints(usize),

    #[error("partner potential is not of Jaynes-Cummings form (max residual {residual:e})")]
    NotShapeInvariant { residual: f64 },
}
