//! Feasibility checks for instances and schedules.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Instance, Schedule};
use crate::time::{format_rational, QTime, Rational};
use num_traits::Signed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceViolation {
    #[error("instance has no stages")]
    NoStages,
    #[error("stage {stage} has zero machines")]
    ZeroMachines { stage: usize },
    #[error("stage {stage} has zero batch capacity")]
    ZeroCapacity { stage: usize },
    #[error("stage {stage} has nonpositive processing time {time}")]
    NonpositiveProcessingTime { stage: usize, time: String },
    #[error("release of job {job} is negative ({time})")]
    NegativeRelease { job: usize, time: String },
    #[error("releases not sorted: job {job} is released before job {prev}")]
    ReleasesNotSorted { prev: usize, job: usize },
}

/// Checks the invariants of [`Instance`]; reports the first violation found.
pub fn validate_instance(inst: &Instance) -> Result<(), InstanceViolation> {
    if inst.stages.is_empty() {
        return Err(InstanceViolation::NoStages);
    }
    for (stage, cfg) in inst.stages.iter().enumerate() {
        if cfg.machines == 0 {
            return Err(InstanceViolation::ZeroMachines { stage });
        }
        if cfg.batch_capacity == 0 {
            return Err(InstanceViolation::ZeroCapacity { stage });
        }
        if !cfg.processing_time.is_positive() {
            return Err(InstanceViolation::NonpositiveProcessingTime {
                stage,
                time: format_rational(&cfg.processing_time),
            });
        }
    }
    for (job, r) in inst.releases.iter().enumerate() {
        if r.is_negative() {
            return Err(InstanceViolation::NegativeRelease {
                job,
                time: format_rational(r),
            });
        }
        if job > 0 && inst.releases[job - 1] > *r {
            return Err(InstanceViolation::ReleasesNotSorted { prev: job - 1, job });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleViolation {
    #[error("batch refers to unknown stage {stage}")]
    UnknownStage { stage: usize },
    #[error("batch refers to unknown machine {machine} at stage {stage}")]
    UnknownMachine { stage: usize, machine: usize },
    #[error("batch refers to unknown job {job}")]
    UnknownJob { job: usize },
    #[error("empty batch at stage {stage}")]
    EmptyBatch { stage: usize },
    #[error("batch over capacity at stage {stage}: {size} jobs, capacity {capacity}")]
    OverCapacity {
        stage: usize,
        size: usize,
        capacity: usize,
    },
    #[error("job {job} appears more than once at stage {stage}")]
    DuplicateJob { stage: usize, job: usize },
    #[error("job {job} is missing at stage {stage}")]
    MissingJob { stage: usize, job: usize },
    #[error("machine overlap at stage {stage}, machine {machine}: batch at {second} starts before batch at {first} ends")]
    MachineOverlap {
        stage: usize,
        machine: usize,
        first: QTime,
        second: QTime,
    },
    #[error("start before release: job {job} starts at {start}, released at {release}")]
    StartBeforeRelease {
        job: usize,
        start: QTime,
        release: QTime,
    },
    #[error("start before previous-stage completion: job {job} starts stage {stage} at {start}, previous stage completes at {ready}")]
    StartBeforePreviousStage {
        stage: usize,
        job: usize,
        start: QTime,
        ready: QTime,
    },
    #[error("throughput bound violated at stage {stage} for job {job} in a permutation schedule")]
    ThroughputBound { stage: usize, job: usize },
}

/// Result of a successful feasibility check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleReport {
    /// `completions[i][j]` is the completion time of job `j` at stage `i`.
    pub completions: Vec<Vec<QTime>>,
    /// Jobs complete every stage in index order (`c_i1 ≤ … ≤ c_in` for all `i`).
    pub is_erd_permutation: bool,
}

impl ScheduleReport {
    /// Completion times at the last stage, `Cⱼ`.
    pub fn final_completions(&self) -> &[QTime] {
        self.completions.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Full feasibility check of `sched` for `inst`. The instance is assumed valid.
pub fn validate_schedule(
    inst: &Instance,
    sched: &Schedule,
) -> Result<ScheduleReport, ScheduleViolation> {
    let (s, n) = (inst.num_stages(), inst.num_jobs());
    let mut start: Vec<Vec<Option<QTime>>> = vec![vec![None; n]; s];
    let mut per_machine: Vec<Vec<Vec<&QTime>>> = inst
        .stages
        .iter()
        .map(|cfg| vec![Vec::new(); cfg.machines])
        .collect();

    for b in &sched.batches {
        let cfg = inst
            .stages
            .get(b.stage)
            .ok_or(ScheduleViolation::UnknownStage { stage: b.stage })?;
        if b.machine >= cfg.machines {
            return Err(ScheduleViolation::UnknownMachine {
                stage: b.stage,
                machine: b.machine,
            });
        }
        if b.jobs.is_empty() {
            return Err(ScheduleViolation::EmptyBatch { stage: b.stage });
        }
        if b.jobs.len() > cfg.batch_capacity {
            return Err(ScheduleViolation::OverCapacity {
                stage: b.stage,
                size: b.jobs.len(),
                capacity: cfg.batch_capacity,
            });
        }
        for &j in &b.jobs {
            let slot = start[b.stage]
                .get_mut(j)
                .ok_or(ScheduleViolation::UnknownJob { job: j })?;
            if slot.is_some() {
                return Err(ScheduleViolation::DuplicateJob {
                    stage: b.stage,
                    job: j,
                });
            }
            *slot = Some(b.start.clone());
        }
        per_machine[b.stage][b.machine].push(&b.start);
    }

    let mut starts: Vec<Vec<QTime>> = Vec::with_capacity(s);
    for (stage, row) in start.into_iter().enumerate() {
        let row: Vec<QTime> = row
            .into_iter()
            .enumerate()
            .map(|(job, t)| t.ok_or(ScheduleViolation::MissingJob { stage, job }))
            .collect::<Result<_, _>>()?;
        starts.push(row);
    }

    // Half-open intervals [start, start + p): back-to-back batches are fine.
    for (stage, machines) in per_machine.iter_mut().enumerate() {
        let p = &inst.stages[stage].processing_time;
        for (machine, list) in machines.iter_mut().enumerate() {
            list.sort();
            for w in list.windows(2) {
                if (w[0] + p) > *w[1] {
                    return Err(ScheduleViolation::MachineOverlap {
                        stage,
                        machine,
                        first: w[0].clone(),
                        second: w[1].clone(),
                    });
                }
            }
        }
    }

    let mut completions: Vec<Vec<QTime>> = Vec::with_capacity(s);
    for (stage, row) in starts.iter().enumerate() {
        let p: &Rational = &inst.stages[stage].processing_time;
        for (job, t) in row.iter().enumerate() {
            if stage == 0 {
                let release = inst.release(job);
                if *t < release {
                    return Err(ScheduleViolation::StartBeforeRelease {
                        job,
                        start: t.clone(),
                        release,
                    });
                }
            } else {
                let ready = &completions[stage - 1][job];
                if t < ready {
                    return Err(ScheduleViolation::StartBeforePreviousStage {
                        stage,
                        job,
                        start: t.clone(),
                        ready: ready.clone(),
                    });
                }
            }
        }
        completions.push(row.iter().map(|t| t + p).collect());
    }

    let is_erd_permutation = completions
        .iter()
        .all(|row| row.windows(2).all(|w| w[0] <= w[1]));

    if is_erd_permutation {
        // c_ij ≥ c_i(j−m·b) + p_i follows from the capacity constraints; a
        // failure here means the checks above are incomplete.
        for (stage, row) in completions.iter().enumerate() {
            let cfg = &inst.stages[stage];
            let k = cfg.throughput();
            for job in k..n {
                if row[job] < &row[job - k] + &cfg.processing_time {
                    return Err(ScheduleViolation::ThroughputBound { stage, job });
                }
            }
        }
    }

    Ok(ScheduleReport {
        completions,
        is_erd_permutation,
    })
}

/// `true` when every job respects `Cⱼ ≥ rⱼ + Σ pᵢ`.
pub fn respects_path_length(inst: &Instance, report: &ScheduleReport) -> bool {
    let total = inst.total_processing();
    report
        .final_completions()
        .iter()
        .enumerate()
        .all(|(j, c)| (c - &inst.release(j)) >= QTime::from(&total))
}
