use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coherent state needs more Fock levels: norm deficit {deficit:e} at n_max = {n_max}")]
    TruncationTooSmall { n_max: usize, deficit: f64 },

    /// The two highest Fock levels picked up more population than allowed.
    /// `last_good_tau` is the largest sampled τ that still passed the guard.
    #[error(
        "Fock truncation exceeded at sample {sample} (t = {t}, tau = {tau}): \
         top-level population {population:e} > {tolerance:e}"
    )]
    TruncationExceeded {
        sample: usize,
        t: f64,
        tau: f64,
        population: f64,
        tolerance: f64,
        last_good_tau: Option<f64>,
    },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("trace drifted by {deviation:e} at t = {t}")]
    TraceDrift { t: f64, deviation: f64 },

    #[error("state norm drifted by {deviation:e} at t = {t}")]
    NormDrift { t: f64, deviation: f64 },

    #[error("fit needs at least {required} samples in the window, found {found}")]
    TooFewSamples { required: usize, found: usize },

    #[error("fit window [{lo}, {hi}] is not covered by the series [{first}, {last}]")]
    WindowOutOfRange {
        lo: f64,
        hi: f64,
        first: f64,
        last: f64,
    },

    #[error("empty input")]
    EmptyInput,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
