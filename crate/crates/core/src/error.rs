use thiserror::Error;

/// Errors raised by basis construction, attack construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported protocol: {bases} bases in dimension {dim} (three bases only for d = 3)")]
    UnsupportedProtocol { dim: usize, bases: usize },

    #[error("{name} = {value} outside admissible range [{lo}, {hi}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("negative radicand in {name}: {value:e}")]
    NegativeRadicand { name: &'static str, value: f64 },

    #[error("singular at disturbance D = 1")]
    Singular,

    #[error("empty admissible w-interval at D = {disturbance}")]
    EmptyInterval { disturbance: f64 },

    #[error("no sign change of I_AE - I_AB on [{lo}, {hi}] (g(lo) = {g_lo}, g(hi) = {g_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Check that `value` lies in `[lo, hi]`.
pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_nan() || value < lo || value > hi {
        return Err(Error::OutOfDomain {
            name,
            value,
            lo,
            hi,
        });
    }
    Ok(())
}
