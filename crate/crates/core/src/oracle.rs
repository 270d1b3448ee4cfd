//! Exhaustive offline optimum at desk scale.
//!
//! Within earliest-release-date permutation schedules the only remaining
//! decision is how to cut the job sequence into batches at each stage. Jobs
//! sharing a batch finish together and swapping two jobs with equal
//! completion times changes nothing, so it suffices to enumerate cuts into
//! *consecutive* blocks (a [`BatchComposition`]). For a fixed composition,
//! starting every block as early as possible is pointwise minimal, and the
//! machine a block lands on never matters because machines are identical.
//!
//! The search runs stage by stage. A partial state is the vector of
//! completion times reached so far (plus, inside a stage, the multiset of
//! machine free times). Everything downstream is monotone in those values, so
//! a state that is componentwise no better than another can be dropped
//! without losing the optimum. This is an exact dominance test, not a
//! heuristic; [`compositions`] plus [`earliest_start_schedule`] gives the
//! unpruned enumeration it is checked against.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{BatchAssignment, Instance, ObjectiveKind, Schedule, StageConfig};
use crate::objective::{evaluate_objective, ObjectiveError};
use crate::time::{QTime, Rational};

pub const DEFAULT_CAP: usize = 9;
/// The all-orders search uses job bitmasks and factorially many sequences.
pub const ALL_ORDERS_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {jobs} jobs, above the enumeration cap of {cap}")]
    SizeCap { jobs: usize, cap: usize },
    #[error("objective is undefined for an instance without jobs")]
    NoJobs,
    #[error("invalid batch composition: {0}")]
    InvalidComposition(String),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Per stage, the sizes of consecutive job blocks in batch order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BatchComposition {
    pub blocks: Vec<Vec<usize>>,
}

impl BatchComposition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        BatchComposition { blocks }
    }

    pub fn validate(&self, inst: &Instance) -> Result<(), OracleError> {
        if self.blocks.len() != inst.num_stages() {
            return Err(OracleError::InvalidComposition(format!(
                "{} stage entries for {} stages",
                self.blocks.len(),
                inst.num_stages()
            )));
        }
        for (i, (sizes, cfg)) in self.blocks.iter().zip(&inst.stages).enumerate() {
            if let Some(bad) = sizes.iter().find(|&&b| b == 0 || b > cfg.batch_capacity) {
                return Err(OracleError::InvalidComposition(format!(
                    "block of size {bad} at stage {i} (capacity {})",
                    cfg.batch_capacity
                )));
            }
            let total: usize = sizes.iter().sum();
            if total != inst.num_jobs() {
                return Err(OracleError::InvalidComposition(format!(
                    "stage {i} blocks cover {total} of {} jobs",
                    inst.num_jobs()
                )));
            }
        }
        Ok(())
    }
}

/// Machine for a block that becomes ready at `ready`: the lowest-indexed
/// machine already free by then, otherwise the one that frees up first.
fn pick_machine(free: &[QTime], ready: &QTime) -> usize {
    if let Some(k) = free.iter().position(|f| f <= ready) {
        return k;
    }
    let mut best = 0;
    for (k, f) in free.iter().enumerate().skip(1) {
        if *f < free[best] {
            best = k;
        }
    }
    best
}

/// Realizes `comp` with every block started as early as possible.
pub fn earliest_start_schedule(
    inst: &Instance,
    comp: &BatchComposition,
) -> Result<Schedule, OracleError> {
    delayed_start_schedule(inst, comp, None)
}

/// Like [`earliest_start_schedule`], but block `k` of stage `i` additionally
/// waits `delays[i][k] ≥ 0` after the moment it could have started.
pub fn delayed_start_schedule(
    inst: &Instance,
    comp: &BatchComposition,
    delays: Option<&[Vec<Rational>]>,
) -> Result<Schedule, OracleError> {
    comp.validate(inst)?;
    let mut ready: Vec<QTime> = (0..inst.num_jobs()).map(|j| inst.release(j)).collect();
    let mut batches = Vec::new();
    for (i, (sizes, cfg)) in comp.blocks.iter().zip(&inst.stages).enumerate() {
        let mut free = vec![QTime::zero(); cfg.machines];
        let mut done = ready.clone();
        let mut first = 0;
        for (k, &size) in sizes.iter().enumerate() {
            let jobs: Vec<usize> = (first..first + size).collect();
            let block_ready = jobs
                .iter()
                .map(|&j| &ready[j])
                .max()
                .expect("nonempty block");
            let machine = pick_machine(&free, block_ready);
            let mut start = block_ready.max_of(&free[machine]).clone();
            if let Some(d) = delays.and_then(|d| d.get(i)).and_then(|row| row.get(k)) {
                start += d;
            }
            let end = &start + &cfg.processing_time;
            for &j in &jobs {
                done[j] = end.clone();
            }
            free[machine] = end;
            batches.push(BatchAssignment {
                stage: i,
                machine,
                start,
                jobs,
            });
            first += size;
        }
        ready = done;
    }
    Ok(Schedule::new(batches))
}

/// Every composition of `n` into blocks of size at most `capacity`, in
/// lexicographic order.
pub fn stage_compositions(n: usize, capacity: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for size in 1..=cap.min(left) {
            cur.push(size);
            rec(left - size, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, capacity, &mut Vec::new(), &mut out);
    out
}

/// Cartesian product of per-stage compositions. Exponential; for tests and
/// tiny instances.
pub fn compositions(inst: &Instance) -> Vec<BatchComposition> {
    let mut all: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for cfg in &inst.stages {
        let options = stage_compositions(inst.num_jobs(), cfg.batch_capacity);
        all = all
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect();
    }
    all.into_iter().map(BatchComposition::new).collect()
}

fn dominated_vec(a: &[QTime], b: &[QTime]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn dominated_opt_vec(a: &[Option<QTime>], b: &[Option<QTime>]) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (None, None) => true,
        (Some(x), Some(y)) => x <= y,
        _ => false,
    })
}

/// Keeps the states not dominated by another; among equivalent states the
/// first one wins, so callers sort by path beforehand.
fn prune<T>(states: Vec<T>, dominates: impl Fn(&T, &T) -> bool) -> Vec<T> {
    let mut kept: Vec<T> = Vec::new();
    'next: for s in states {
        for k in &kept {
            if dominates(k, &s) {
                continue 'next;
            }
        }
        kept.retain(|k| !dominates(&s, k));
        kept.push(s);
    }
    kept
}

/// Running objective value at the last stage; `None` before any job.
#[derive(Clone)]
struct ObjectiveAcc {
    kind: ObjectiveKind,
    value: Option<QTime>,
}

impl ObjectiveAcc {
    fn new(kind: ObjectiveKind) -> Self {
        ObjectiveAcc { kind, value: None }
    }

    fn add(&mut self, completion: &QTime, releases: impl Iterator<Item = QTime>) {
        for r in releases {
            let term = if self.kind.is_flow() {
                completion - &r
            } else {
                completion.clone()
            };
            self.value = Some(match self.value.take() {
                None => term,
                Some(v) if self.kind.is_sum() => v + term,
                Some(v) => v.max(term),
            });
        }
    }

    fn le(&self, other: &Self) -> bool {
        match (&self.value, &other.value) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x <= y,
        }
    }
}

/// What a stage search records about the jobs processed so far.
#[derive(Clone)]
enum Outcome {
    /// Completion time per job (indexed like the arrival vector).
    Times(Vec<Option<QTime>>),
    Objective(ObjectiveAcc),
}

impl Outcome {
    fn le(&self, other: &Self) -> bool {
        match (self, other) {
            (Outcome::Times(a), Outcome::Times(b)) => dominated_opt_vec(a, b),
            (Outcome::Objective(a), Outcome::Objective(b)) => a.le(b),
            _ => false,
        }
    }

    fn record(&mut self, jobs: &[usize], completion: &QTime, inst: &Instance) {
        match self {
            Outcome::Times(t) => {
                for &j in jobs {
                    t[j] = Some(completion.clone());
                }
            }
            Outcome::Objective(acc) => acc.add(completion, jobs.iter().map(|&j| inst.release(j))),
        }
    }
}

struct StageState {
    /// Sorted machine free times.
    free: Vec<QTime>,
    outcome: Outcome,
    /// Blocks chosen so far, as job lists.
    path: Vec<Vec<usize>>,
}

impl StageState {
    fn dominates(&self, other: &StageState) -> bool {
        dominated_vec(&self.free, &other.free) && self.outcome.le(&other.outcome)
    }

    fn extend(
        &self,
        jobs: Vec<usize>,
        arrivals: &[QTime],
        cfg: &StageConfig,
        normalize: bool,
        inst: &Instance,
    ) -> StageState {
        let ready = jobs
            .iter()
            .map(|&j| &arrivals[j])
            .max()
            .expect("nonempty block");
        let start = ready.max_of(&self.free[0]).clone();
        let end = &start + &cfg.processing_time;
        let mut free: Vec<QTime> = self.free[1..].to_vec();
        if normalize {
            // Later blocks never start before this one (ready times and free
            // times are both nondecreasing), so earlier free times are moot.
            for f in &mut free {
                if *f < start {
                    *f = start.clone();
                }
            }
        }
        let pos = free.partition_point(|f| *f <= end);
        free.insert(pos, end.clone());
        let mut outcome = self.outcome.clone();
        outcome.record(&jobs, &end, inst);
        let mut path = self.path.clone();
        path.push(jobs);
        StageState {
            free,
            outcome,
            path,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Order {
    /// Consecutive blocks in index order.
    Erd,
    /// Any ordered partition of the jobs.
    Any,
}

/// All non-dominated ways to process one stage for the given arrival times.
fn stage_search(
    inst: &Instance,
    cfg: &StageConfig,
    arrivals: &[QTime],
    start: Outcome,
    order: Order,
) -> Vec<StageState> {
    let n = arrivals.len();
    let full: u64 = match order {
        Order::Erd => n as u64,
        Order::Any => (1u64 << n) - 1,
    };
    let mut layers: BTreeMap<(u32, u64), Vec<StageState>> = BTreeMap::new();
    let level = |key: u64| match order {
        Order::Erd => key as u32,
        Order::Any => key.count_ones(),
    };
    layers.insert(
        (0, 0),
        vec![StageState {
            free: vec![QTime::zero(); cfg.machines],
            outcome: start,
            path: Vec::new(),
        }],
    );
    loop {
        let Some(((_, key), mut states)) = layers.pop_first() else {
            return Vec::new();
        };
        states.sort_by(|a, b| a.path.cmp(&b.path));
        let states = prune(states, StageState::dominates);
        if key == full {
            return states;
        }
        for st in &states {
            for jobs in next_blocks(key, n, cfg.batch_capacity, order) {
                let next_key = match order {
                    Order::Erd => key + jobs.len() as u64,
                    Order::Any => jobs.iter().fold(key, |m, &j| m | (1 << j)),
                };
                let next = st.extend(jobs, arrivals, cfg, order == Order::Erd, inst);
                layers
                    .entry((level(next_key), next_key))
                    .or_default()
                    .push(next);
            }
        }
    }
}

fn next_blocks(key: u64, n: usize, capacity: usize, order: Order) -> Vec<Vec<usize>> {
    match order {
        Order::Erd => {
            let first = key as usize;
            (1..=capacity.min(n - first))
                .map(|size| (first..first + size).collect())
                .collect()
        }
        Order::Any => {
            let remaining: Vec<usize> = (0..n).filter(|j| key & (1 << j) == 0).collect();
            let mut out = Vec::new();
            for sub in 1u64..(1 << remaining.len()) {
                if (sub.count_ones() as usize) > capacity {
                    continue;
                }
                out.push(
                    remaining
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| sub & (1 << k) != 0)
                        .map(|(_, &j)| j)
                        .collect(),
                );
            }
            out
        }
    }
}

/// Search over all stages; returns the optimal value and the blocks chosen
/// per stage.
fn search(inst: &Instance, kind: ObjectiveKind, order: Order) -> (QTime, Vec<Vec<Vec<usize>>>) {
    let n = inst.num_jobs();
    let s = inst.num_stages();
    struct Partial {
        completions: Vec<QTime>,
        path: Vec<Vec<Vec<usize>>>,
    }
    let mut frontier = vec![Partial {
        completions: (0..n).map(|j| inst.release(j)).collect(),
        path: Vec::new(),
    }];
    for cfg in &inst.stages[..s - 1] {
        let mut next: Vec<Partial> = Vec::new();
        for parent in &frontier {
            let outcome = Outcome::Times(vec![None; n]);
            for st in stage_search(inst, cfg, &parent.completions, outcome, order) {
                let Outcome::Times(times) = st.outcome else {
                    unreachable!()
                };
                let mut path = parent.path.clone();
                path.push(st.path);
                next.push(Partial {
                    completions: times
                        .into_iter()
                        .map(|t| t.expect("all jobs batched"))
                        .collect(),
                    path,
                });
            }
        }
        next.sort_by(|a, b| a.path.cmp(&b.path));
        frontier = prune(next, |a, b| dominated_vec(&a.completions, &b.completions));
    }

    let last = &inst.stages[s - 1];
    let mut best: Option<(QTime, Vec<Vec<Vec<usize>>>)> = None;
    for parent in &frontier {
        let outcome = Outcome::Objective(ObjectiveAcc::new(kind));
        for st in stage_search(inst, last, &parent.completions, outcome, order) {
            let Outcome::Objective(acc) = st.outcome else {
                unreachable!()
            };
            let value = acc.value.expect("n ≥ 1");
            let mut path = parent.path.clone();
            path.push(st.path);
            let better = match &best {
                None => true,
                Some((v, p)) => value < *v || (value == *v && path < *p),
            };
            if better {
                best = Some((value, path));
            }
        }
    }
    best.expect("at least one composition exists")
}

fn check_size(inst: &Instance, cap: usize) -> Result<(), OracleError> {
    let n = inst.num_jobs();
    if n == 0 {
        return Err(OracleError::NoJobs);
    }
    if n > cap {
        return Err(OracleError::SizeCap { jobs: n, cap });
    }
    Ok(())
}

/// Offline optimum over earliest-release-date permutation schedules, which
/// is the true offline optimum for all four objectives.
pub fn optimal_permutation_schedule(
    inst: &Instance,
    kind: ObjectiveKind,
    cap: usize,
) -> Result<(Schedule, QTime), OracleError> {
    check_size(inst, cap)?;
    let (value, path) = search(inst, kind, Order::Erd);
    let comp = BatchComposition::new(
        path.iter()
            .map(|stage| stage.iter().map(Vec::len).collect())
            .collect(),
    );
    let schedule = earliest_start_schedule(inst, &comp)?;
    debug_assert_eq!(
        evaluate_objective(inst, &schedule, kind).as_ref(),
        Ok(&value)
    );
    Ok((schedule, value))
}

/// Offline optimum over all schedules, every stage free to process the jobs
/// in any order. Only used to confirm that restricting to release-date
/// order loses nothing.
pub fn optimal_schedule_all_orders(
    inst: &Instance,
    kind: ObjectiveKind,
    cap: usize,
) -> Result<QTime, OracleError> {
    check_size(inst, cap.min(ALL_ORDERS_CAP))?;
    Ok(search(inst, kind, Order::Any).0)
}

/// Objective value of a schedule against the offline optimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioReport {
    pub objective: ObjectiveKind,
    pub value: QTime,
    pub optimum: QTime,
    pub ratio: QTime,
}

pub fn competitive_ratio(
    alg: &Schedule,
    inst: &Instance,
    kind: ObjectiveKind,
    cap: usize,
) -> Result<RatioReport, OracleError> {
    let value = evaluate_objective(inst, alg, kind)?;
    let (_, optimum) = optimal_permutation_schedule(inst, kind, cap)?;
    // Processing times are positive, so the optimum is too.
    let ratio = &value / &optimum;
    Ok(RatioReport {
        objective: kind,
        value,
        optimum,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{int, rat};
    use crate::validate::validate_schedule;

    fn example1() -> Instance {
        Instance::new(
            vec![
                StageConfig::new(1, 3, int(3)),
                StageConfig::new(2, 2, int(4)),
            ],
            vec![int(0), int(0), int(1), int(3), int(3)],
        )
    }

    fn example2() -> Instance {
        Instance::new(
            vec![
                StageConfig::new(1, 1, int(1)),
                StageConfig::new(1, 2, int(2)),
                StageConfig::new(1, 1, int(1)),
            ],
            vec![int(0), int(0)],
        )
    }

    fn brute_force(inst: &Instance, kind: ObjectiveKind) -> QTime {
        compositions(inst)
            .iter()
            .map(|c| {
                let s = earliest_start_schedule(inst, c).unwrap();
                evaluate_objective(inst, &s, kind).unwrap()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn stage_compositions_count() {
        // Compositions of 5 into parts ≤ 2 are Fibonacci(6) = 8.
        assert_eq!(stage_compositions(5, 2).len(), 8);
        assert_eq!(stage_compositions(4, 4).len(), 8);
        assert_eq!(stage_compositions(0, 3), vec![Vec::<usize>::new()]);
        assert_eq!(stage_compositions(3, 3)[0], vec![1, 1, 1]);
    }

    #[test]
    fn never_wait_composition() {
        let inst = example1();
        let comp = BatchComposition::new(vec![vec![2, 3], vec![2, 2, 1]]);
        let sched = earliest_start_schedule(&inst, &comp).unwrap();
        let report = validate_schedule(&inst, &sched).unwrap();
        assert_eq!(
            report.final_completions(),
            &[7, 7, 10, 10, 11].map(QTime::from_int)
        );
        // J5 goes back to the first stage-2 machine.
        assert_eq!(sched.batches[4].machine, 0);
        assert_eq!(sched.batches[3].machine, 1);
    }

    #[test]
    fn delayed_composition() {
        let inst = example1();
        let comp = BatchComposition::new(vec![vec![3, 2], vec![2, 2, 1]]);
        let sched = earliest_start_schedule(&inst, &comp).unwrap();
        let value = evaluate_objective(&inst, &sched, ObjectiveKind::Makespan).unwrap();
        assert_eq!(value, QTime::from_int(12));
        assert_eq!(sched.batches[0].start, QTime::from_int(1));
    }

    #[test]
    fn single_job_composition() {
        let inst = Instance::new(
            vec![
                StageConfig::new(1, 2, int(2)),
                StageConfig::new(3, 1, rat(1, 2)),
            ],
            vec![rat(3, 4)],
        );
        let comp = BatchComposition::new(vec![vec![1], vec![1]]);
        let sched = earliest_start_schedule(&inst, &comp).unwrap();
        let c = sched.completion_matrix(&inst).unwrap();
        assert_eq!(c[1][0], QTime::from(rat(13, 4)));
    }

    #[test]
    fn invalid_compositions_rejected() {
        let inst = example1();
        for bad in [
            vec![vec![4, 1], vec![2, 2, 1]],
            vec![vec![2, 2], vec![2, 2, 1]],
            vec![vec![2, 3]],
            vec![vec![2, 0, 3], vec![2, 2, 1]],
        ] {
            assert!(matches!(
                earliest_start_schedule(&inst, &BatchComposition::new(bad)),
                Err(OracleError::InvalidComposition(_))
            ));
        }
    }

    #[test]
    fn example1_optimal_makespan() {
        let (sched, value) =
            optimal_permutation_schedule(&example1(), ObjectiveKind::Makespan, DEFAULT_CAP)
                .unwrap();
        assert_eq!(value, QTime::from_int(11));
        assert!(validate_schedule(&example1(), &sched).is_ok());
    }

    #[test]
    fn example2_optimum_keeps_c32_at_six() {
        let inst = example2();
        for kind in ObjectiveKind::ALL {
            let (sched, _) = optimal_permutation_schedule(&inst, kind, DEFAULT_CAP).unwrap();
            let c = sched.completion_matrix(&inst).unwrap();
            assert_eq!(c[2][1], QTime::from_int(6), "{kind}");
            assert_eq!(
                optimal_schedule_all_orders(&inst, kind, DEFAULT_CAP).unwrap(),
                evaluate_objective(&inst, &sched, kind).unwrap()
            );
        }
    }

    #[test]
    fn single_batch_after_epsilon() {
        // J1 at 0 and three jobs at ε: one batch at ε gives 4(1+ε).
        let eps = rat(1, 40);
        let mut releases = vec![int(0)];
        releases.extend(std::iter::repeat_n(eps.clone(), 3));
        let inst = Instance::new(vec![StageConfig::new(1, 4, int(1))], releases);
        let (_, value) =
            optimal_permutation_schedule(&inst, ObjectiveKind::TotalCompletion, DEFAULT_CAP)
                .unwrap();
        assert_eq!(value, QTime::from(int(4) * (int(1) + eps)));
    }

    #[test]
    fn pruned_search_matches_brute_force() {
        let instances = [
            example1(),
            example2(),
            Instance::new(
                vec![
                    StageConfig::new(2, 2, rat(3, 2)),
                    StageConfig::new(1, 3, int(1)),
                    StageConfig::new(2, 1, rat(2, 3)),
                ],
                vec![int(0), rat(1, 3), rat(1, 2), int(1), int(2)],
            ),
        ];
        for inst in &instances {
            for kind in ObjectiveKind::ALL {
                let (_, v) = optimal_permutation_schedule(inst, kind, DEFAULT_CAP).unwrap();
                assert_eq!(v, brute_force(inst, kind), "{kind}");
            }
        }
    }

    #[test]
    fn size_cap_and_empty() {
        let inst = Instance::new(vec![StageConfig::new(1, 1, int(1))], vec![int(0); 10]);
        assert_eq!(
            optimal_permutation_schedule(&inst, ObjectiveKind::Makespan, DEFAULT_CAP),
            Err(OracleError::SizeCap { jobs: 10, cap: 9 })
        );
        assert!(optimal_permutation_schedule(&inst, ObjectiveKind::Makespan, 10).is_ok());
        assert_eq!(
            optimal_schedule_all_orders(&inst, ObjectiveKind::Makespan, 10),
            Err(OracleError::SizeCap { jobs: 10, cap: 6 })
        );
        let empty = Instance::new(vec![StageConfig::new(1, 1, int(1))], vec![]);
        assert_eq!(
            optimal_permutation_schedule(&empty, ObjectiveKind::Makespan, DEFAULT_CAP),
            Err(OracleError::NoJobs)
        );
    }

    #[test]
    fn ratio_of_optimal_schedule_is_one() {
        let inst = example1();
        for kind in ObjectiveKind::ALL {
            let (sched, _) = optimal_permutation_schedule(&inst, kind, DEFAULT_CAP).unwrap();
            let r = competitive_ratio(&sched, &inst, kind, DEFAULT_CAP).unwrap();
            assert_eq!(r.ratio, QTime::from_int(1));
        }
    }
}
