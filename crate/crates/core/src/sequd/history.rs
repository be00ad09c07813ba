//! Append-only trial records.

use serde::Serialize;

use crate::objective::Direction;
use crate::space::TrialConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum TrialStatus {
    Ok,
    Failed(String),
}

impl TrialStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, TrialStatus::Ok)
    }

    pub fn label(&self) -> &'static str {
        match self {
            TrialStatus::Ok => "ok",
            TrialStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    /// 0-based position in the run.
    pub trial: usize,
    /// 1-based stage; non-sequential designs use stage 1 throughout.
    pub stage: usize,
    pub unit: Vec<f64>,
    pub config: TrialConfig,
    /// Objective value; the direction's worst value for failed trials.
    pub value: f64,
    pub status: TrialStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct History {
    pub direction: Direction,
    records: Vec<TrialRecord>,
}

impl History {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends a record, assigning the next trial index.
    pub(crate) fn push(
        &mut self,
        stage: usize,
        unit: Vec<f64>,
        config: TrialConfig,
        outcome: std::result::Result<f64, String>,
    ) {
        let (value, status) = match outcome {
            Ok(v) => (v, TrialStatus::Ok),
            Err(reason) => (self.direction.worst(), TrialStatus::Failed(reason)),
        };
        self.records.push(TrialRecord {
            trial: self.records.len(),
            stage,
            unit,
            config,
            value,
            status,
        });
    }

    /// Best successful trial; the earliest one on ties.
    pub fn incumbent(&self) -> Option<&TrialRecord> {
        self.ranked().into_iter().next()
    }

    pub fn best_value(&self) -> Option<f64> {
        self.incumbent().map(|r| r.value)
    }

    /// Successful trials from best to worst, earlier trials first on ties.
    pub fn ranked(&self) -> Vec<&TrialRecord> {
        let mut ok: Vec<&TrialRecord> = self.records.iter().filter(|r| r.status.is_ok()).collect();
        let dir = self.direction;
        ok.sort_by(|a, b| {
            dir.score(b.value)
                .total_cmp(&dir.score(a.value))
                .then(a.trial.cmp(&b.trial))
        });
        ok
    }

    /// Incumbent value after each trial; the worst value until the first
    /// success.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = self.direction.worst();
        self.records
            .iter()
            .map(|r| {
                if r.status.is_ok() && self.direction.is_better(r.value, best) {
                    best = r.value;
                }
                best
            })
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.status.is_ok()).count()
    }
}
