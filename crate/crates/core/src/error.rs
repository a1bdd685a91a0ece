use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid map parameter: {0}")]
    InvalidParameter(String),
    #[error("Schwarzian undefined: |F'(x)| < 1e-12 at x = {0}")]
    CriticalPointSingularity(f64),
    #[error("no interior fixed point for b = {0}")]
    NoInteriorFixedPoint(f64),
    #[error("seed {seed} outside domain [{lo}, {hi}]")]
    SeedOutOfDomain { seed: f64, lo: f64, hi: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("Newton iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("derivative of F^p(x) - x is singular at x = {0}")]
    DerivativeSingular(f64),
    #[error("requested period {requested}, but the point has period {found}")]
    ConvergedToLowerPeriod { requested: usize, found: usize },
    #[error("no attracting period-{period} orbit found at b = {b}")]
    SeedOrbitNotFound { period: usize, b: f64 },
    #[error("branch has {0} samples, need at least 5")]
    BranchTooShort(usize),
    #[error("map is monotone (no critical points)")]
    MonotoneMap,
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("scan has no points to render")]
    EmptyScan,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
