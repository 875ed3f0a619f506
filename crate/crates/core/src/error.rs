use thiserror::Error;

/// Errors raised by family construction, evaluation and the verification
/// oracles.
#[derive(Debug, Error)]
pub enum Error {
    /// `c = 0` collapses the transformation; rejected at construction.
    #[error("degenerate transform: c must be nonzero")]
    DegenerateTransform,

    /// A parameter was NaN or infinite.
    #[error("non-finite parameter: {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// The coefficients do not satisfy the conserved-quantity relation.
    #[error("constraint violation: first-integral residual {residual:.6e} exceeds tolerance {tol:.1e}")]
    ConstraintViolation { residual: f64, tol: f64 },

    /// A squared amplitude that must be positive (or nonnegative) is not.
    #[error("positivity violation: {name} = {value} must be {requirement}")]
    Positivity {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Malformed coefficient input (wrong mode for the case, bad epsilon, ...).
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    /// Grid construction rejected the requested discretization.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// An operation that needs a full finite-difference stencil hit a masked
    /// point.
    #[error("masked point inside stencil at (u1, u2) = ({u1}, {u2}): {reason}")]
    MaskedPoint { u1: f64, u2: f64, reason: &'static str },

    /// The scalar field vanishes inside a residual patch, so the inner
    /// quotient of the Calapso operator is undefined there.
    #[error("field vanishes near (u1, u2) = ({u1}, {u2}); choose a patch away from its zero set")]
    FieldVanishes { u1: f64, u2: f64 },

    /// Malformed patch or step-size request.
    #[error("invalid patch: {0}")]
    InvalidPatch(String),

    /// Unsupported field construction request.
    #[error("invalid field request: {0}")]
    InvalidField(String),

    /// The probed point is not a metric singularity of the family.
    #[error("no singular point at (u1, u2) = ({u1}, {u2}); |M| = {m_abs:.3e}")]
    NotSingular { u1: f64, u2: f64, m_abs: f64 },

    /// A denominator in the generic two-step evaluation route is too small.
    #[error("degenerate denominator {name} = {value:.3e} at (u1, u2) = ({u1}, {u2})")]
    DegenerateDenominator {
        name: &'static str,
        value: f64,
        u1: f64,
        u2: f64,
    },

    /// Mesh export produced no geometry.
    #[error("empty mesh: every sample point is masked")]
    EmptyMesh,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
