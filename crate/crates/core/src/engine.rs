//! Discrete-event simulation of the online game.
//!
//! A [`JobSource`] reveals jobs over time, a [`Strategy`] reacts at event
//! times. The strategy sees only what has happened up to the current instant
//! ([`SimView`]); the total number of jobs stays hidden until the source
//! declares itself exhausted and all its releases have happened.
//!
//! Every schedule produced here processes the jobs in release order at every
//! stage: job `j` may start stage `i` only after jobs `0..j` have started it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::error::UnsupportedInstance;
use crate::model::{BatchAssignment, Instance, Schedule, StageConfig};
use crate::time::{QTime, Rational};

pub const DEFAULT_EVENT_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    JobRelease { job: usize },
    BatchCompletion { stage: usize, machine: usize },
    WakeUp { stage: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub time: QTime,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchStart {
    pub stage: usize,
    pub machine: usize,
    pub jobs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Wakeup {
    pub time: QTime,
    pub stage: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StrategyDecision {
    pub starts: Vec<BatchStart>,
    pub wakeups: Vec<Wakeup>,
}

impl StrategyDecision {
    pub fn is_empty(&self) -> bool {
        self.starts.is_empty() && self.wakeups.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub time: QTime,
    pub events: Vec<Event>,
    pub end_of_stream: bool,
    pub decision: StrategyDecision,
    /// Release dates the source scheduled in response to the decision.
    pub injected: Vec<QTime>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationTrace {
    pub strategy: String,
    pub entries: Vec<TraceEntry>,
    pub schedule: Schedule,
}

impl SimulationTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Unsupported(#[from] UnsupportedInstance),
    #[error("illegal decision at {time}: {reason}")]
    IllegalDecision { time: QTime, reason: String },
    #[error("job source broke causality at {time}: {reason}")]
    Causality { time: QTime, reason: String },
    #[error("deadlock at {time}: {waiting} jobs waiting with nothing left to happen")]
    Deadlock { time: QTime, waiting: usize },
    #[error("event limit of {0} decision rounds exceeded")]
    EventLimit(usize),
}

/// Everything a strategy may look at when deciding.
pub struct SimView<'a> {
    pub now: &'a QTime,
    pub stages: &'a [StageConfig],
    /// Jobs available at each stage, in index order: released (stage 0) or
    /// done with the previous stage, and not yet started here.
    pub waiting: &'a [Vec<usize>],
    /// Completion time of the running batch per stage and machine.
    pub busy_until: &'a [Vec<Option<QTime>>],
    /// Number of jobs started at each stage.
    pub started: &'a [usize],
    pub released: usize,
    /// No further job will ever be released.
    pub end_of_stream: bool,
}

impl SimView<'_> {
    pub fn idle_machines(&self, stage: usize) -> impl Iterator<Item = usize> + '_ {
        self.busy_until[stage]
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_none())
            .map(|(k, _)| k)
    }

    /// Released jobs that have not started `stage` yet, available or not.
    pub fn unstarted(&self, stage: usize) -> usize {
        self.released - self.started[stage]
    }
}

pub trait Strategy {
    fn name(&self) -> &str;

    /// Called once before the first event.
    fn prepare(&mut self, _stages: &[StageConfig]) -> Result<(), UnsupportedInstance> {
        Ok(())
    }

    fn decide(&mut self, view: &SimView<'_>) -> StrategyDecision;
}

/// Reveals jobs to the simulation.
pub trait JobSource {
    fn stages(&self) -> &[StageConfig];

    /// Release dates known before time zero.
    fn initial_releases(&mut self) -> Vec<QTime>;

    /// Sees each decision as it is made; returned release dates must lie
    /// strictly in the future.
    fn observe(&mut self, _now: &QTime, _decision: &StrategyDecision) -> Vec<QTime> {
        Vec::new()
    }

    /// Called when nothing is scheduled to happen any more. Same contract as
    /// [`JobSource::observe`]; a source that returns nothing here must report
    /// itself exhausted afterwards.
    fn idle(&mut self, _now: &QTime) -> Vec<QTime> {
        Vec::new()
    }

    fn exhausted(&self) -> bool;
}

/// A static instance revealed job by job.
pub struct InstanceSource<'a> {
    inst: &'a Instance,
}

impl<'a> InstanceSource<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        InstanceSource { inst }
    }
}

impl JobSource for InstanceSource<'_> {
    fn stages(&self) -> &[StageConfig] {
        &self.inst.stages
    }

    fn initial_releases(&mut self) -> Vec<QTime> {
        self.inst.releases.iter().map(QTime::from).collect()
    }

    fn exhausted(&self) -> bool {
        true
    }
}

/// Heap key; field order gives the processing order of simultaneous events.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Queued {
    time: QTime,
    rank: u8,
    stage: usize,
    machine: usize,
    seq: u64,
}

const RELEASE: u8 = 0;
const COMPLETION: u8 = 1;
const WAKEUP: u8 = 2;

struct Engine {
    stages: Vec<StageConfig>,
    now: QTime,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
    pending_releases: usize,
    releases: Vec<Rational>,
    waiting: Vec<Vec<usize>>,
    started: Vec<usize>,
    busy_until: Vec<Vec<Option<QTime>>>,
    running: Vec<Vec<Vec<usize>>>,
    finished: usize,
    batches: Vec<BatchAssignment>,
    entries: Vec<TraceEntry>,
}

impl Engine {
    fn new(stages: &[StageConfig]) -> Self {
        Engine {
            stages: stages.to_vec(),
            now: QTime::zero(),
            queue: BinaryHeap::new(),
            seq: 0,
            pending_releases: 0,
            releases: Vec::new(),
            waiting: vec![Vec::new(); stages.len()],
            started: vec![0; stages.len()],
            busy_until: stages.iter().map(|s| vec![None; s.machines]).collect(),
            running: stages
                .iter()
                .map(|s| vec![Vec::new(); s.machines])
                .collect(),
            finished: 0,
            batches: Vec::new(),
            entries: Vec::new(),
        }
    }

    fn push(&mut self, time: QTime, rank: u8, stage: usize, machine: usize) {
        self.seq += 1;
        self.queue.push(Reverse(Queued {
            time,
            rank,
            stage,
            machine,
            seq: self.seq,
        }));
    }

    fn schedule_releases(&mut self, times: Vec<QTime>, strict: bool) -> Result<(), SimError> {
        for time in times {
            let reason = if !time.is_rational() {
                Some("irrational release date")
            } else if strict && time <= self.now {
                Some("release not strictly after the observed decision")
            } else if time < self.now {
                Some("release in the past")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(SimError::Causality {
                    time: self.now.clone(),
                    reason: format!("{reason}: {time}"),
                });
            }
            self.pending_releases += 1;
            self.push(time, RELEASE, 0, 0);
        }
        Ok(())
    }

    fn view(&self, end_of_stream: bool) -> SimView<'_> {
        SimView {
            now: &self.now,
            stages: &self.stages,
            waiting: &self.waiting,
            busy_until: &self.busy_until,
            started: &self.started,
            released: self.releases.len(),
            end_of_stream,
        }
    }

    fn pop_simultaneous(&mut self) -> Vec<Event> {
        let Some(Reverse(head)) = self.queue.peek() else {
            return Vec::new();
        };
        self.now = head.time.clone();
        let mut events = Vec::new();
        while self
            .queue
            .peek()
            .is_some_and(|Reverse(q)| q.time == self.now)
        {
            let Reverse(q) = self.queue.pop().expect("peeked");
            let kind = match q.rank {
                RELEASE => {
                    let job = self.releases.len();
                    self.releases
                        .push(q.time.to_rational().expect("checked on insertion"));
                    self.pending_releases -= 1;
                    self.waiting[0].push(job);
                    EventKind::JobRelease { job }
                }
                COMPLETION => {
                    let (i, k) = (q.stage, q.machine);
                    self.busy_until[i][k] = None;
                    let jobs = std::mem::take(&mut self.running[i][k]);
                    if i + 1 < self.stages.len() {
                        let queue = &mut self.waiting[i + 1];
                        queue.extend(jobs);
                        queue.sort_unstable();
                    } else {
                        self.finished += jobs.len();
                    }
                    EventKind::BatchCompletion {
                        stage: i,
                        machine: k,
                    }
                }
                _ => EventKind::WakeUp { stage: q.stage },
            };
            events.push(Event { time: q.time, kind });
        }
        events
    }

    fn apply(&mut self, decision: &StrategyDecision) -> Result<(), SimError> {
        let now = self.now.clone();
        let illegal = |reason: String| SimError::IllegalDecision {
            time: now.clone(),
            reason,
        };
        for w in &decision.wakeups {
            if w.time <= self.now {
                return Err(illegal(format!(
                    "wakeup at {} is not in the future",
                    w.time
                )));
            }
            if w.stage >= self.stages.len() {
                return Err(illegal(format!("wakeup for unknown stage {}", w.stage)));
            }
        }
        for start in &decision.starts {
            let (i, k) = (start.stage, start.machine);
            let Some(cfg) = self.stages.get(i) else {
                return Err(illegal(format!("unknown stage {i}")));
            };
            if k >= cfg.machines {
                return Err(illegal(format!("unknown machine {k} at stage {i}")));
            }
            if self.busy_until[i][k].is_some() {
                return Err(illegal(format!("machine {k} at stage {i} is busy")));
            }
            let size = start.jobs.len();
            if size == 0 || size > cfg.batch_capacity {
                return Err(illegal(format!(
                    "batch of {size} jobs at stage {i} (capacity {})",
                    cfg.batch_capacity
                )));
            }
            let expected: Vec<usize> = (self.started[i]..self.started[i] + size).collect();
            if start.jobs != expected {
                return Err(illegal(format!(
                    "stage {i} must continue with jobs {expected:?}, got {:?}",
                    start.jobs
                )));
            }
            if self.waiting[i].get(..size) != Some(&expected[..]) {
                return Err(illegal(format!(
                    "jobs {expected:?} are not all available at stage {i}"
                )));
            }
            self.waiting[i].drain(..size);
            self.started[i] += size;
            let end = &self.now + &cfg.processing_time;
            self.busy_until[i][k] = Some(end.clone());
            self.running[i][k] = expected;
            self.batches.push(BatchAssignment {
                stage: i,
                machine: k,
                start: self.now.clone(),
                jobs: start.jobs.clone(),
            });
            self.push(end, COMPLETION, i, k);
        }
        for w in &decision.wakeups {
            self.push(w.time.clone(), WAKEUP, w.stage, 0);
        }
        Ok(())
    }

    fn in_system(&self) -> usize {
        self.releases.len() - self.finished
    }
}

/// Runs `strategy` against `source` until every released job has left the
/// last stage and the source is exhausted.
pub fn simulate(
    source: &mut dyn JobSource,
    strategy: &mut dyn Strategy,
) -> Result<SimulationTrace, SimError> {
    simulate_with_limit(source, strategy, DEFAULT_EVENT_LIMIT)
}

pub fn simulate_with_limit(
    source: &mut dyn JobSource,
    strategy: &mut dyn Strategy,
    event_limit: usize,
) -> Result<SimulationTrace, SimError> {
    strategy.prepare(source.stages())?;
    let mut engine = Engine::new(source.stages());
    let initial = source.initial_releases();
    engine.schedule_releases(initial, false)?;
    let mut rounds = 0;
    loop {
        let events = if engine.queue.is_empty() {
            if source.exhausted() {
                if engine.in_system() == 0 {
                    break;
                }
                return Err(SimError::Deadlock {
                    time: engine.now.clone(),
                    waiting: engine.in_system(),
                });
            }
            let more = source.idle(&engine.now);
            if more.is_empty() && !source.exhausted() {
                return Err(SimError::Causality {
                    time: engine.now.clone(),
                    reason: "idle source neither released jobs nor closed".into(),
                });
            }
            engine.schedule_releases(more, true)?;
            if !engine.queue.is_empty() || engine.in_system() == 0 {
                continue;
            }
            // The end-of-stream signal alone is news worth a decision.
            Vec::new()
        } else {
            engine.pop_simultaneous()
        };
        rounds += 1;
        if rounds > event_limit {
            return Err(SimError::EventLimit(event_limit));
        }
        let eos = source.exhausted() && engine.pending_releases == 0;
        let decision = strategy.decide(&engine.view(eos));
        engine.apply(&decision)?;
        let injected = source.observe(&engine.now, &decision);
        engine.schedule_releases(injected.clone(), true)?;
        engine.entries.push(TraceEntry {
            time: engine.now.clone(),
            events,
            end_of_stream: eos,
            decision,
            injected,
        });
    }
    Ok(SimulationTrace {
        strategy: strategy.name().to_string(),
        entries: engine.entries,
        schedule: Schedule::new(engine.batches),
    })
}

pub fn simulate_instance(
    inst: &Instance,
    strategy: &mut dyn Strategy,
) -> Result<SimulationTrace, SimError> {
    simulate(&mut InstanceSource::new(inst), strategy)
}

/// Plays the game and returns the trace together with the instance the
/// source ended up releasing.
pub fn run_adversary_game(
    adversary: &mut dyn JobSource,
    strategy: &mut dyn Strategy,
) -> Result<(SimulationTrace, Instance), SimError> {
    let trace = simulate(adversary, strategy)?;
    let releases = trace
        .entries
        .iter()
        .flat_map(|e| &e.events)
        .filter(|e| matches!(e.kind, EventKind::JobRelease { .. }))
        .map(|e| e.time.to_rational().expect("releases are rational"))
        .collect();
    let realized = Instance::new(adversary.stages().to_vec(), releases);
    Ok((trace, realized))
}
