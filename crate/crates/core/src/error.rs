use thiserror::Error;

/// Errors raised by the simulator's numerical and scheduling operations.
///
/// Scenario ingestion has its own error type, [`crate::scenario::ScenarioError`],
/// because its failures carry file-level context (field names, sections).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({lon}, {lat}) is more than {max_deg} degrees from the projection origin")]
    ProjectionRange { lon: f64, lat: f64, max_deg: f64 },
    #[error("invalid geographic coordinate: {0}")]
    InvalidCoordinate(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("sites {first} and {second} coincide")]
    DuplicateSite { first: usize, second: usize },
    #[error("site {0} lies outside the tessellation bounds")]
    SiteOutsideBounds(usize),
    #[error("no sites given")]
    NoSites,
    #[error("point ({x}, {y}) lies outside the tessellation bounds")]
    PointOutsideBounds { x: f64, y: f64 },
    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("time {t} s outside trajectory span [{start}, {end}] s")]
    TimeOutOfSpan { t: f64, start: f64, end: f64 },
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("beamwidth must lie in (0, 180) degrees, got {0}")]
    InvalidBeamwidth(f64),
    #[error("altitude must be positive, got {0}")]
    InvalidAltitude(f64),
    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),
    #[error("PRB index {k} out of range 1..={n_prb}")]
    PrbOutOfRange { k: u32, n_prb: u32 },
    #[error("invalid band plan: {0}")]
    InvalidBandPlan(String),
    #[error("speed must be non-negative, got {0}")]
    NegativeSpeed(f64),
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("vector length {got} does not match antenna count {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("noise power must be positive, got {0}")]
    NonPositiveNoise(f64),
    #[error("SINR must be non-negative, got {0}")]
    NegativeSinr(f64),
    #[error("utilization must lie in (0, 1], got {0}")]
    InvalidUtilization(f64),
    #[error("cannot build an empirical CDF from an empty sample set")]
    EmptySamples,
    #[error("probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("mismatched run grid: {0}")]
    MismatchedGrid(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
