use thiserror::Error;

/// Errors raised by constructions, numerics and checks in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("endpoints must be strictly increasing (violated at index {index})")]
    NonMonotoneEndpoints { index: usize },
    #[error("endpoint list must have an even, nonzero length (got {count})")]
    OddEndpointCount { count: usize },
    #[error("gap index {index} out of range for {gaps} gap(s)")]
    GapIndexOutOfRange { index: usize, gaps: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("quadrature did not converge after {refinements} refinements (last change {last_change:e})")]
    NoConvergence { refinements: usize, last_change: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("period system is numerically singular")]
    SingularPeriodSystem,
    #[error("pole {pole} is too close to the unit hull or to E")]
    PoleTooClose { pole: String },
    #[error("complex pole {pole} has no conjugate partner")]
    ConjugatePairMissing { pole: String },
    #[error("grid step {step} is too coarse")]
    GridTooCoarse { step: f64 },
    #[error("pole {pole} lies outside the finite-difference box")]
    OutOfBox { pole: String },
    #[error("quantization violated on band {band}: residual {residual:e}")]
    QuantizationViolated { band: usize, residual: f64 },
    #[error("band {band} holds {found} zero(s), expected {expected}")]
    ZeroCountMismatch {
        band: usize,
        expected: usize,
        found: usize,
    },
    #[error("phase derivative is not convex on band {band} (second difference {second_difference:e})")]
    ConvexityCheckFailed { band: usize, second_difference: f64 },
    #[error("numerator recovery residual {0:e} exceeds tolerance")]
    NumeratorResidualTooLarge(f64),
    #[error("x = {0} is not inside a band interior")]
    OutsideBands(f64),
    #[error("x = {0} is not in E")]
    OutsideE(f64),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("fraction is not in the star class (gap margin {margin:e})")]
    NotInStarClass { margin: f64 },
    #[error("fraction is not normalized (sup norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("star-class sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
