//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while auditing, simulating or ingesting.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside its documented domain.
    #[error("{what} must be in [{lo}, {hi}], got {got}")]
    OutOfRange {
        what: &'static str,
        lo: f64,
        hi: f64,
        got: f64,
    },

    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    /// A record does not carry a value for a requested sensitive feature.
    #[error("record {stay_id:?} is missing sensitive feature {feature:?}")]
    MissingFeature { stay_id: String, feature: String },

    /// A record carries a feature level that the feature spec does not declare.
    #[error("level {level:?} of feature {feature:?} is not declared in the feature spec")]
    UndeclaredLevel { feature: String, level: String },

    #[error("configuration error: {0}")]
    Config(String),

    /// auROC needs at least one positive and one negative outcome.
    #[error("auROC is undefined: all records share a single outcome class")]
    SingleClass,

    /// Every per-group value feeding an aggregate was undefined.
    #[error("aggregate of {metric:?} is undefined: no group has a defined value")]
    UndefinedAggregate { metric: String },

    /// A Glasgow Coma Scale value violated its component or total range.
    #[error("invalid GCS{}: {message}", stay_context(.stay_id))]
    InvalidGcs {
        stay_id: Option<String>,
        message: String,
    },

    /// A join between predictions, stays and ICU profiles failed.
    #[error("join failed for {identifier:?}: {message}")]
    JoinMismatch { identifier: String, message: String },

    /// A cell in an input file failed to parse or validate.
    #[error("{path}:{line}: field {field:?}: {message}", path = .path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        field: String,
        message: String,
    },

    #[error("I/O error on {path}", path = .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error in {path}", path = .path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

fn stay_context(stay_id: &Option<String>) -> String {
    match stay_id {
        Some(id) => format!(" for stay {id:?}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach a stay identifier to a GCS validation error raised without context.
    pub fn named_stay(self, stay_id: &str) -> Self {
        match self {
            Error::InvalidGcs {
                stay_id: None,
                message,
            } => Error::InvalidGcs {
                stay_id: Some(stay_id.to_owned()),
                message,
            },
            other => other,
        }
    }
}
