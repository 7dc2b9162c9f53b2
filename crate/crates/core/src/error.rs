use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid norm spec `{spec}`: {reason}")]
    InvalidNormSpec { spec: String, reason: String },

    #[error("{what} requires a nonzero vector")]
    ZeroVector { what: &'static str },

    #[error("root finder did not converge: {context}")]
    RootNotFound { context: String },

    #[error("chord at offset t = {t} misses the unit ball (t0 = {t0})")]
    ChordMissesBall { t: f64, t0: f64 },

    #[error("degenerate segment: a and b coincide")]
    DegenerateSegment,

    #[error("radius R = {radius} is below the admissible minimum {min}")]
    RadiusTooSmall { radius: f64, min: f64 },

    #[error("bisector residual {residual:e} at t = {t} exceeds tolerance")]
    BisectorResidual { t: f64, residual: f64 },

    #[error("estimated kappa = {kappa} is not below 1/2; the norm is not strictly convex")]
    KappaTooLarge { kappa: f64 },

    #[error("minimum normal/radius alignment {min_alignment} is not positive")]
    InvalidAlpha0 { min_alignment: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curve is not self-contracted: triple ({i}, {j}, {k}) has defect {defect:e}")]
    NotSelfContracted {
        i: usize,
        j: usize,
        k: usize,
        defect: f64,
    },

    #[error("gradient descent diverged at step {step}")]
    Divergence { step: usize },

    #[error(
        "pair ({i}, {j}): tail occupies both far components (vertices {plus} and {minus})"
    )]
    BothComponentsOccupied {
        i: usize,
        j: usize,
        plus: usize,
        minus: usize,
    },

    #[error("length ratio {ratio} exceeds the certified constant C = {bound}")]
    BoundExceeded { ratio: f64, bound: f64 },
}
