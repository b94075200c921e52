use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}: {message}")]
    Document { path: String, message: String },

    #[error("committee must contain {expected} distinct candidates, got {actual}")]
    CommitteeSize { expected: usize, actual: usize },

    #[error("candidate {candidate} out of range (m = {m})")]
    CandidateRange { candidate: usize, m: usize },

    #[error("not a party-list profile: voters {0} and {1} have overlapping but different approval sets")]
    NotPartyList(usize, usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("instance too large: {what} needs {needed} evaluations, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("internal consistency alarm: {0}")]
    Alarm(String),

    #[error("cell {cell}, trial {trial}, seed {seed}: {source}")]
    Trial {
        cell: usize,
        trial: usize,
        seed: u64,
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Alarm(_) => 2,
            Error::Budget { .. } => 3,
            Error::Trial { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Document {
            path: path.into(),
            message: message.into(),
        }
    }
}
