//! Lower bounds on completion times of earliest-release-date permutation
//! schedules.
//!
//! Two constraints hold in every such schedule: a job finishes stage `i` at
//! least `pᵢ` after it finished stage `i−1`, and it cannot be in process at
//! stage `i` together with the job `mᵢbᵢ` positions ahead of it. Chaining the
//! two gives the recursion
//!
//! ```text
//! c*_0j = r_j,    c*_ij = max(c*_(i−1)j, c*_i(j−mᵢbᵢ)) + pᵢ,
//! ```
//!
//! where the second argument is absent (−∞) for `j ≤ mᵢbᵢ`. The same values
//! are the optimal completion times of the instance in which every batching
//! machine is replaced by `bᵢ` unit-capacity machines.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::UnsupportedInstance;
use crate::model::{Instance, ObjectiveKind, Schedule, StageConfig};
use crate::objective::objective_from_completions;
use crate::oracle::{earliest_start_schedule, BatchComposition};
use crate::time::{rational_string_vec, QTime, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundMatrix {
    /// `c*_0j`, the release dates.
    #[serde(with = "rational_string_vec")]
    pub row0: Vec<Rational>,
    /// `values[i][j]` is `c*` for stage `i` and job `j` (both 0-based).
    pub values: Vec<Vec<QTime>>,
}

impl BoundMatrix {
    pub fn get(&self, stage: usize, job: usize) -> &QTime {
        &self.values[stage][job]
    }

    /// Bounds at the last stage, one per job.
    pub fn last_row(&self) -> &[QTime] {
        self.values.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// `c*_sn`, a lower bound on the makespan. `None` without jobs.
    pub fn makespan_bound(&self) -> Option<&QTime> {
        self.last_row().last()
    }
}

/// Evaluates the recursion above in `O(n·s)`.
pub fn lower_bound_matrix(inst: &Instance) -> BoundMatrix {
    let n = inst.num_jobs();
    let mut values: Vec<Vec<QTime>> = Vec::with_capacity(inst.num_stages());
    for (i, cfg) in inst.stages.iter().enumerate() {
        let k = cfg.throughput();
        let mut row: Vec<QTime> = Vec::with_capacity(n);
        for j in 0..n {
            let above = if i == 0 {
                inst.release(j)
            } else {
                values[i - 1][j].clone()
            };
            // `None` stands for the −∞ boundary c*_i(j−k) with j ≤ k.
            let behind: Option<&QTime> = j.checked_sub(k).map(|jj| &row[jj]);
            let start = match behind {
                Some(b) if *b > above => b.clone(),
                _ => above,
            };
            row.push(&start + &cfg.processing_time);
        }
        values.push(row);
    }
    BoundMatrix {
        row0: inst.releases.clone(),
        values,
    }
}

/// `⌈(j+1)/(mᵢbᵢ)⌉·pᵢ` for the 0-based job index `j`, a closed-form
/// relaxation of `c*_ij`.
pub fn simple_lower_bound(inst: &Instance, stage: usize, job: usize) -> QTime {
    let cfg = &inst.stages[stage];
    let rounds = (job + 1).div_ceil(cfg.throughput());
    QTime::from(&cfg.processing_time * Rational::from_integer(BigInt::from(rounds)))
}

/// Makespan bound for single-machine stages without release dates:
///
/// ```text
/// max over j ∈ [n], k ∈ [s] of
///   ⌈j/b₁⌉p₁ + Σ_{i=2}^{k−1} pᵢ + ⌈(n−j+1)/b_k⌉p_k + Σ_{i=k+1}^{s} pᵢ
/// ```
///
/// For `k = 1` the middle sum is read as `−p₁`: job `j` is counted in both
/// ceiling terms, so one stage-1 round is shared between them.
pub fn sung_bound(inst: &Instance) -> Result<QTime, UnsupportedInstance> {
    if inst.stages.iter().any(|s| s.machines != 1) {
        return Err(UnsupportedInstance(
            "the bound needs exactly one machine per stage".into(),
        ));
    }
    if inst.releases.iter().any(|r| !r.is_zero()) {
        return Err(UnsupportedInstance(
            "the bound needs all release dates equal to zero".into(),
        ));
    }
    let n = inst.num_jobs();
    if n == 0 {
        return Err(UnsupportedInstance(
            "the bound needs at least one job".into(),
        ));
    }
    let s = inst.num_stages();
    let p = |i: usize| &inst.stages[i].processing_time;
    let rounds = |count: usize, stage: usize| {
        Rational::from_integer(BigInt::from(
            count.div_ceil(inst.stages[stage].batch_capacity),
        ))
    };
    let range_sum = |lo: usize, hi: usize| -> Rational { (lo..hi).map(|i| p(i).clone()).sum() };

    let mut best: Option<Rational> = None;
    for k in 0..s {
        let middle = if k == 0 {
            -p(0).clone()
        } else {
            range_sum(1, k)
        };
        let tail = range_sum(k + 1, s);
        for j in 1..=n {
            let value = rounds(j, 0) * p(0) + &middle + rounds(n - j + 1, k) * p(k) + &tail;
            if best.as_ref().is_none_or(|b| value > *b) {
                best = Some(value);
            }
        }
    }
    Ok(QTime::from(best.expect("n ≥ 1 and s ≥ 1")))
}

/// Earliest-start schedule of the corresponding instance without batching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PffCorrespondence {
    /// Every stage has `mᵢbᵢ` unit-capacity machines.
    pub instance: Instance,
    pub schedule: Schedule,
    pub completions: Vec<Vec<QTime>>,
}

impl PffCorrespondence {
    pub fn matches(&self, bounds: &BoundMatrix) -> bool {
        self.completions == bounds.values
    }
}

/// Builds the instance with `mᵢbᵢ` unit-capacity machines per stage and
/// schedules it by starting every job as early as machines and the previous
/// stage allow, in index order. The construction runs a machine-level
/// simulation, independent of [`lower_bound_matrix`].
pub fn pff_correspondence(inst: &Instance) -> PffCorrespondence {
    let expanded = Instance::new(
        inst.stages
            .iter()
            .map(|s| StageConfig::new(s.throughput(), 1, s.processing_time.clone()))
            .collect(),
        inst.releases.clone(),
    );
    let singletons = BatchComposition::new(vec![vec![1; inst.num_jobs()]; inst.num_stages()]);
    let schedule = earliest_start_schedule(&expanded, &singletons)
        .expect("singleton composition is valid for every instance");
    let completions = schedule
        .completion_matrix(&expanded)
        .expect("earliest-start schedule covers every job");
    PffCorrespondence {
        instance: expanded,
        schedule,
        completions,
    }
}

/// Objective value obtained by plugging the last-stage bounds `c*_sj` in as
/// completion times; a lower bound on the offline optimum.
pub fn objective_floor(
    inst: &Instance,
    bounds: &BoundMatrix,
    kind: ObjectiveKind,
) -> Option<QTime> {
    objective_from_completions(inst, bounds.last_row(), kind)
}
