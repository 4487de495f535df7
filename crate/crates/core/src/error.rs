use thiserror::Error;

/// Errors produced by the wave library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("potential has a pole at phi = C1 when C3 != 0")]
    PoleAtC1,

    #[error("no periodic orbit at C3 = {c3}, b = {b}")]
    NoOrbit { c3: f64, b: f64 },

    #[error("phase classifier is complex: (C1-C2)^2 - 6b = {0} < 0")]
    ComplexBranch(f64),

    #[error("level set does not intersect the requested window")]
    EmptyLevelSet,

    #[error("computation did not converge: {0}")]
    NonConvergent(String),

    #[error("finite-difference stencil leaves the existence region: {0}")]
    StencilLeavesRegion(String),

    #[error("monotonicity verdict needs at least 3 grid points, got {0}")]
    TooFewPoints(usize),

    #[error("middle cubic root is zero; the shifted variable is undefined")]
    QZero,

    #[error("profile parameters do not match the physical parameters: {0}")]
    ParamMismatch(String),

    #[error("spectral differentiation is invalid for a peaked profile")]
    PeakedProfile,

    #[error("operator is not symmetric")]
    NotSymmetric,

    #[error("weight C1 - phi is not positive on the profile")]
    SingularWeight,

    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("target period {target} is not reachable: {reason}")]
    PeriodUnreachable { target: f64, reason: String },

    #[error("fixed-period stencil leaves the curve: {0}")]
    StencilLeavesCurve(String),
}

impl WaveError {
    /// Short machine-readable tag, used in structured CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            WaveError::InvalidParameter(_) => "InvalidParameter",
            WaveError::OutOfRange(_) => "OutOfRange",
            WaveError::PoleAtC1 => "PoleAtC1",
            WaveError::NoOrbit { .. } => "NoOrbit",
            WaveError::ComplexBranch(_) => "ComplexBranch",
            WaveError::EmptyLevelSet => "EmptyLevelSet",
            WaveError::NonConvergent(_) => "NonConvergent",
            WaveError::StencilLeavesRegion(_) => "StencilLeavesRegion",
            WaveError::TooFewPoints(_) => "TooFewPoints",
            WaveError::QZero => "QZero",
            WaveError::ParamMismatch(_) => "ParamMismatch",
            WaveError::PeakedProfile => "PeakedProfile",
            WaveError::NotSymmetric => "NotSymmetric",
            WaveError::SingularWeight => "SingularWeight",
            WaveError::IntegrationFailure(_) => "IntegrationFailure",
            WaveError::EigensolverFailure(_) => "EigensolverFailure",
            WaveError::PeriodUnreachable { .. } => "PeriodUnreachable",
            WaveError::StencilLeavesCurve(_) => "StencilLeavesCurve",
        }
    }

    /// Whether the error reflects the mathematics of the input (as opposed to a
    /// numerical breakdown inside the library).
    pub fn is_domain_error(&self) -> bool {
        !matches!(
            self,
            WaveError::NonConvergent(_)
                | WaveError::IntegrationFailure(_)
                | WaveError::EigensolverFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, WaveError>;
