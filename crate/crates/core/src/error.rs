use thiserror::Error;

pub type Result<T, E = FlowError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("normal vector is not unit length (|ν| = {norm:.17})")]
    NonUnitNormal { norm: f64 },

    #[error("grid too coarse: {got} samples, need at least {min}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("curve is not ℓ-convex: ℓ = {value:.3e} at sample {index}")]
    NotConvex { index: usize, value: f64 },

    #[error("inconsistent normal field: total turning {turns:.9} is not an integer (residual {residual:.3e})")]
    InconsistentNormalField { turns: f64, residual: f64 },

    #[error("initial data describes a point: β₀ vanishes identically")]
    PointCurve,

    #[error("curve is not closed: n-band coefficients (a_n, b_n) = ({a:.3e}, {b:.3e})")]
    NotClosed { a: f64, b: f64 },

    #[error("m = n = {n} does not give a self-similar profile (closure fails)")]
    ResonantMode { n: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("unstable configuration: dt = {dt:.3e} exceeds the explicit bound; use dt <= {max_dt:.3e}")]
    Unstable { dt: f64, max_dt: f64 },

    #[error("∂_uφ lost positivity at t = {t:.6} after {halvings} step halvings (gradient bound violated)")]
    GradientCollapse { t: f64, halvings: u32 },

    #[error("β(·, t) vanishes identically at t = {t}")]
    DegenerateState { t: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("malformed curve file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
