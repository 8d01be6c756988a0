use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("medium does not satisfy {0}")]
    AssumptionViolated(&'static str),

    #[error("no s0 in (0,1) with positive partial mass at y = {y}")]
    NoPositiveMass { y: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },

    #[error("profile is not monotone at index {index}")]
    NonMonotone { index: usize },

    #[error("wave solve failed at y = {y}: {source}")]
    Wave { y: f64, source: Box<Error> },

    #[error("tail window has {points} points, need at least 20")]
    ShortTail { points: usize },

    #[error("time step {dt} exceeds the reaction cap {cap}")]
    TimeStep { dt: f64, cap: f64 },

    #[error("non-finite value after step {step}")]
    NonFinite { step: usize },

    #[error("lattice bin {index} received no samples")]
    EmptyBin { index: usize },

    #[error("band [{delta}, 1-{delta}] never sampled")]
    BandNotSampled { delta: f64 },

    #[error("value {value} outside interpolation range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("period L = {l} below admissibility threshold {threshold}")]
    Inadmissible { l: f64, threshold: f64 },

    #[error("eps = {eps} exceeds limit {limit}")]
    EpsilonTooLarge { eps: f64, limit: f64 },

    #[error("no level crossing found: {0}")]
    NoCrossing(&'static str),

    #[error("envelope offsets cannot be fitted: {0}")]
    Fit(&'static str),

    #[error("iterate {iteration} increased somewhere (non-monotone sequence)")]
    NonMonotoneIterate { iteration: usize },

    #[error("sign pattern matches no stationary type")]
    Unclassified,
}
