use thiserror::Error;

use crate::dynamics::EvolutionTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    InvalidGridSize(usize),

    #[error("half width must be positive and finite, got {0}")]
    InvalidHalfWidth(f64),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("unsupported derivative order {0}")]
    UnsupportedOrder(u32),

    #[error("point {x} lies outside the domain [{lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("unsupported Helmholtz shift {0} (expected 1 or 4)")]
    UnsupportedShift(f64),

    #[error("peakon speed must be nonzero")]
    ZeroSpeed,

    #[error("stability requires c>0, got c = {0}")]
    NonPositiveSpeed(f64),

    #[error("atom {index} has negative mass {mass}")]
    NegativeMass { index: usize, mass: f64 },

    #[error("atom {index} has non-finite data")]
    InvalidAtom { index: usize },

    #[error("density is negative ({value}) at node {index}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("measure has zero total mass; nontrivial data required")]
    TrivialMeasure,

    #[error("epsilon must lie in [0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("recipe cannot reach H-distance {target} inside the cone (at most {reachable})")]
    UnreachableDistance { target: f64, reachable: f64 },

    #[error("degenerate profile: v is constant")]
    DegenerateProfile,

    #[error("xi is not a critical point: |v_x(xi)| = {slope:e} exceeds {tolerance:e}")]
    NotCriticalPoint { slope: f64, tolerance: f64 },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("time step {dt} exceeds the advective bound {max_dt}")]
    TimeStepTooLarge { dt: f64, max_dt: f64 },

    #[error("solution blew up at t = {time} (max |u| = {max_abs})")]
    BlowUp { time: f64, max_abs: f64, trace: Box<EvolutionTrace> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
