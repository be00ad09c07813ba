//! Black-box objectives and optimization direction.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::TrialConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

impl Direction {
    /// Internal score; the optimizers always maximize it.
    pub fn score(self, y: f64) -> f64 {
        match self {
            Direction::Maximize => y,
            Direction::Minimize => -y,
        }
    }

    /// Recorded value of a failed trial.
    pub fn worst(self) -> f64 {
        match self {
            Direction::Maximize => f64::NEG_INFINITY,
            Direction::Minimize => f64::INFINITY,
        }
    }

    pub fn is_better(self, candidate: f64, incumbent: f64) -> bool {
        self.score(candidate) > self.score(incumbent)
    }
}

/// What a run does when an evaluation fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailurePolicy {
    /// Record the trial as failed with the worst value and continue.
    #[default]
    Record,
    /// Stop the run with an error.
    Abort,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("timed out after {0:?}")]
    Timeout(Duration),
    #[error("process exited with {0}")]
    ExitStatus(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("non-finite objective value {0}")]
    NonFinite(f64),
    #[error("{0}")]
    Other(String),
}

/// A black-box function of a decoded configuration. Called concurrently
/// within a stage, so implementations must be `Sync`.
pub trait Objective: Sync {
    fn evaluate(&self, config: &TrialConfig, trial: usize) -> Result<f64, EvalError>;
}

impl<F> Objective for F
where
    F: Fn(&TrialConfig, usize) -> Result<f64, EvalError> + Sync,
{
    fn evaluate(&self, config: &TrialConfig, trial: usize) -> Result<f64, EvalError> {
        self(config, trial)
    }
}
