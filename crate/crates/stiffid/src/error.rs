use thiserror::Error;

use crate::center::CenterError;
use crate::fitting::FitError;
use crate::ingest::IngestError;
use crate::sizing::BeamError;
use crate::solver::SolverError;
use crate::synth::SynthError;
use crate::torsor::EigError;

/// Coarse classification used for process exit codes:
/// validation failures (1), numerical failures (2), I/O failures (3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Eig(#[from] EigError),
    #[error(transparent)]
    Center(#[from] CenterError),
    #[error(transparent)]
    Beam(#[from] BeamError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Ingest(e) => e.category(),
            Error::Fit(_) | Error::Beam(_) => ErrorCategory::Validation,
            Error::Solver(_) | Error::Eig(_) | Error::Center(_) | Error::Synth(_) => {
                ErrorCategory::Numerical
            }
            Error::Io(_) | Error::Json(_) => ErrorCategory::Io,
        }
    }
}
