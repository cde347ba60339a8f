use std::path::PathBuf;

use crate::domain::{ProjectId, ProjectStatus, ValidationReport};

/// Errors produced by the simulator library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible team: {required} developers required, {available} available")]
    InfeasibleTeam { required: usize, available: usize },

    #[error("developer {developer} has no free slot for project {project}")]
    OverAllocation { developer: u32, project: ProjectId },

    #[error("project {project}: illegal status transition {from:?} -> {to:?}")]
    InvalidTransition {
        project: ProjectId,
        from: ProjectStatus,
        to: ProjectStatus,
    },

    #[error("project {0} is already queued")]
    DuplicateQueueEntry(ProjectId),

    #[error("invalid scenario:\n{0}")]
    InvalidScenario(ValidationReport),

    #[error("simulation did not finish within {ticks} days; stuck projects: {stuck:?}")]
    Livelock { ticks: u64, stuck: Vec<ProjectId> },

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("at least 2 values are needed for an interval estimate, got {0}")]
    InsufficientReplications(usize),

    #[error("improvement is undefined for a zero baseline")]
    ZeroBaseline,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("replication {replication} ({mode}): {source}")]
    Replication {
        replication: u32,
        mode: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidScenario(_) | Error::InvalidParameter(_) => true,
            Error::Replication { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
