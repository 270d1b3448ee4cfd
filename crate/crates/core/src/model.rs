//! Instances, schedules and objective kinds.
//!
//! Indices in data structures and JSON are 0-based: stage `0` is the first
//! stage, job `0` the job with the earliest release date. Human-facing output
//! (charts, diagnostics) uses the 1-based names `S1`, `J1`, `M1^(1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::time::{rational_string, rational_string_vec, QTime, Rational};

/// One stage: identical parallel batching machines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageConfig {
    pub machines: usize,
    pub batch_capacity: usize,
    #[serde(with = "rational_string")]
    pub processing_time: Rational,
}

impl StageConfig {
    pub fn new(machines: usize, batch_capacity: usize, processing_time: Rational) -> Self {
        StageConfig {
            machines,
            batch_capacity,
            processing_time,
        }
    }

    /// Jobs that can be in process at this stage at the same moment, `m·b`.
    pub fn throughput(&self) -> usize {
        self.machines * self.batch_capacity
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub stages: Vec<StageConfig>,
    /// Release dates in earliest-release-date order.
    #[serde(with = "rational_string_vec")]
    pub releases: Vec<Rational>,
}

impl Instance {
    pub fn new(stages: Vec<StageConfig>, releases: Vec<Rational>) -> Self {
        Instance { stages, releases }
    }

    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn num_jobs(&self) -> usize {
        self.releases.len()
    }

    pub fn stage(&self, i: usize) -> &StageConfig {
        &self.stages[i]
    }

    pub fn release(&self, j: usize) -> QTime {
        QTime::from(&self.releases[j])
    }

    /// `Σ pᵢ` over the first `upto` stages.
    pub fn processing_prefix(&self, upto: usize) -> Rational {
        self.stages[..upto]
            .iter()
            .map(|s| s.processing_time.clone())
            .sum()
    }

    pub fn total_processing(&self) -> Rational {
        self.processing_prefix(self.num_stages())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Instance> {
        serde_json::from_str(text)
    }
}

/// A batch of jobs started together on one machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchAssignment {
    pub stage: usize,
    pub machine: usize,
    pub start: QTime,
    pub jobs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub batches: Vec<BatchAssignment>,
}

impl Schedule {
    pub fn new(batches: Vec<BatchAssignment>) -> Self {
        Schedule { batches }
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    /// Sorts batches by `(stage, start, machine)` and the jobs inside each
    /// batch, giving a canonical serialization.
    pub fn normalize(&mut self) {
        for b in &mut self.batches {
            b.jobs.sort_unstable();
        }
        self.batches.sort_by(|x, y| {
            x.stage
                .cmp(&y.stage)
                .then_with(|| x.start.cmp(&y.start))
                .then_with(|| x.machine.cmp(&y.machine))
                .then_with(|| x.jobs.cmp(&y.jobs))
        });
    }

    /// Completion time of every job at every stage, `c[i][j]`.
    ///
    /// Returns `None` when some job is missing at some stage or an index is
    /// out of range; use [`crate::validate::validate_schedule`] for a
    /// diagnostic.
    pub fn completion_matrix(&self, inst: &Instance) -> Option<Vec<Vec<QTime>>> {
        let (s, n) = (inst.num_stages(), inst.num_jobs());
        let mut c: Vec<Vec<Option<QTime>>> = vec![vec![None; n]; s];
        for b in &self.batches {
            let p = &inst.stages.get(b.stage)?.processing_time;
            let end = &b.start + p;
            for &j in &b.jobs {
                *c[b.stage].get_mut(j)? = Some(end.clone());
            }
        }
        c.into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Schedule> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectiveKind {
    #[serde(rename = "cmax")]
    Makespan,
    #[serde(rename = "sumc")]
    TotalCompletion,
    #[serde(rename = "fmax")]
    MaxFlow,
    #[serde(rename = "sumf")]
    TotalFlow,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 4] = [
        ObjectiveKind::Makespan,
        ObjectiveKind::TotalCompletion,
        ObjectiveKind::MaxFlow,
        ObjectiveKind::TotalFlow,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ObjectiveKind::Makespan => "cmax",
            ObjectiveKind::TotalCompletion => "sumc",
            ObjectiveKind::MaxFlow => "fmax",
            ObjectiveKind::TotalFlow => "sumf",
        }
    }

    /// Flow-time objectives subtract the release date of each job.
    pub fn is_flow(self) -> bool {
        matches!(self, ObjectiveKind::MaxFlow | ObjectiveKind::TotalFlow)
    }

    pub fn is_sum(self) -> bool {
        matches!(
            self,
            ObjectiveKind::TotalCompletion | ObjectiveKind::TotalFlow
        )
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cmax" => Ok(ObjectiveKind::Makespan),
            "sumc" => Ok(ObjectiveKind::TotalCompletion),
            "fmax" => Ok(ObjectiveKind::MaxFlow),
            "sumf" => Ok(ObjectiveKind::TotalFlow),
            other => Err(format!(
                "unknown objective {other:?} (expected cmax, sumc, fmax or sumf)"
            )),
        }
    }
}
