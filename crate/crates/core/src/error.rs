use thiserror::Error;

use crate::schedule::Schedule;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("deployment failed: accepted {accepted} of {requested} jammers after {attempts} attempts")]
    Deployment {
        requested: usize,
        accepted: usize,
        attempts: usize,
    },

    #[error("unknown jammer id {0}")]
    UnknownJammer(usize),

    #[error("jammer {0} is dead and cannot be selected")]
    DeadSelected(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed model: {0}")]
    Model(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("no reliable jammer set exists")]
    NoReliableSet,

    #[error("config error: {0}")]
    Config(String),

    #[error("the fully deployed jammer set is unreliable at sweep value {value}, seed {seed}")]
    InfeasibleStart { value: f64, seed: u64 },

    /// A scheduler failed part-way; `partial` holds the slots completed so far.
    #[error("scheduling stopped after {} slots: {source}", partial.lifetime)]
    Interrupted {
        partial: Box<Schedule>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
