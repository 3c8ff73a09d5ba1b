use thiserror::Error;

/// Errors produced by state construction, measurement design, channel maps,
/// protocol runs, and closed-form analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value for {name}: {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("states coincide up to a global phase; discrimination is degenerate")]
    IdenticalStates,

    #[error("states are orthogonal; unambiguous discrimination is degenerate")]
    OrthogonalStates,

    #[error("matrix is not a valid density operator: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid measurement operator set: {0}")]
    InvalidOperatorSet(String),

    #[error("malformed outcome distribution: {0}")]
    MalformedDistribution(String),

    #[error("gamma = 1 corresponds to an infinite fiber length")]
    InfiniteLength,

    #[error("degenerate state pair: zero mean photon number makes the ratio 0/0")]
    DegenerateStatePair,

    #[error("correct identification does not dominate even at gamma = 0")]
    NoUsableRegime,

    #[error("identification margin changes sign more than once on [0, 1]")]
    MultipleCrossings,

    #[error("degenerate alphabet: expected photon count is zero")]
    DegenerateAlphabet,

    #[error("transcript is empty")]
    EmptyTranscript,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
