//! Invariant checks shared by the property and acceptance suites. Each
//! returns a description of the first violation.

use pffb::bounds::BoundMatrix;
use pffb::engine::{SimView, Strategy, StrategyDecision};
use pffb::strategies::{NeverWait, StartingInstantGrid};
use pffb::validate::respects_path_length;
use pffb::{validate_schedule, Instance, QTime, Schedule};

pub type Check = Result<(), String>;

/// Feasible, in release order at every stage, and no job faster than its
/// total processing time. Returns the completion matrix.
pub fn feasible_erd(inst: &Instance, sched: &Schedule) -> Result<Vec<Vec<QTime>>, String> {
    let report = validate_schedule(inst, sched).map_err(|e| e.to_string())?;
    if !report.is_erd_permutation {
        return Err("schedule is not a release-order permutation schedule".into());
    }
    if !respects_path_length(inst, &report) {
        return Err("a job finished faster than its total processing time".into());
    }
    Ok(report.completions)
}

pub fn dominates_bounds(c: &[Vec<QTime>], bm: &BoundMatrix) -> Check {
    for (i, row) in c.iter().enumerate() {
        for (j, cij) in row.iter().enumerate() {
            if cij < bm.get(i, j) {
                return Err(format!("c[{i}][{j}] = {cij} below bound {}", bm.get(i, j)));
            }
        }
    }
    Ok(())
}

/// `c_ij ≤ c*_ij + p_1 + … + p_i`.
pub fn never_wait_bound(inst: &Instance, c: &[Vec<QTime>], bm: &BoundMatrix) -> Check {
    for (i, row) in c.iter().enumerate() {
        let slack = inst.processing_prefix(i + 1);
        for (j, cij) in row.iter().enumerate() {
            let limit = bm.get(i, j) + &slack;
            if *cij > limit {
                return Err(format!("c[{i}][{j}] = {cij} exceeds {limit}"));
            }
        }
    }
    Ok(())
}

/// Every batch except the one holding the last job is full.
pub fn full_batches(inst: &Instance, sched: &Schedule) -> Check {
    let n = inst.num_jobs();
    for b in &sched.batches {
        let cap = inst.stages[b.stage].batch_capacity;
        if b.jobs.len() != cap && !b.jobs.contains(&(n - 1)) {
            return Err(format!("short batch {:?} at stage {}", b.jobs, b.stage));
        }
    }
    Ok(())
}

#[allow(clippy::needless_range_loop)]
pub fn t_switch_invariants(
    inst: &Instance,
    sched: &Schedule,
    c: &[Vec<QTime>],
    bm: &BoundMatrix,
) -> Check {
    let p1 = &inst.stages[0].processing_time;
    let p2 = &inst.stages[1].processing_time;
    let grid = StartingInstantGrid::new(p1, p2);
    for b in &sched.batches {
        if b.stage == 0 && !grid.contains(&b.start) {
            return Err(format!("stage-1 start {} off the grid", b.start));
        }
        if b.stage == 1 && b.start < grid.t {
            return Err(format!("stage-2 start {} before t = {}", b.start, grid.t));
        }
    }
    let phi = QTime::phi();
    for j in 0..inst.num_jobs() {
        let stage1_cap = bm.get(0, j) + p1;
        if c[0][j] > stage1_cap {
            return Err(format!(
                "c_1{j} = {} exceeds c* + p1 = {stage1_cap}",
                c[0][j]
            ));
        }
        let stage2_cap = bm.get(1, j) + &(p1 + p2);
        if c[1][j] >= stage2_cap {
            return Err(format!(
                "c_2{j} = {} not below c* + p1 + p2 = {stage2_cap}",
                c[1][j]
            ));
        }
        let golden = &phi * bm.get(1, j);
        if c[1][j] > golden {
            return Err(format!("c_2{j} = {} exceeds φ·c* = {golden}", c[1][j]));
        }
    }
    Ok(())
}

/// Never-Wait that records any decision leaving a machine idle while a job
/// waits at its stage.
#[derive(Default)]
pub struct WatchedNeverWait {
    pub violations: Vec<String>,
}

impl Strategy for WatchedNeverWait {
    fn name(&self) -> &str {
        "never-wait"
    }

    fn decide(&mut self, view: &SimView<'_>) -> StrategyDecision {
        let d = NeverWait.decide(view);
        for i in 0..view.stages.len() {
            let idle = view.idle_machines(i).count();
            let starts: Vec<_> = d.starts.iter().filter(|s| s.stage == i).collect();
            let started: usize = starts.iter().map(|s| s.jobs.len()).sum();
            if idle > starts.len() && view.waiting[i].len() > started {
                self.violations.push(format!(
                    "stage {i} at {}: idle machine while jobs wait",
                    view.now
                ));
            }
        }
        d
    }
}
