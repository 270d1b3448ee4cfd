//! Lower-bound adversaries and tightness families.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::engine::{
    run_adversary_game, simulate_instance, JobSource, SimError, SimulationTrace, Strategy,
    StrategyDecision,
};
use crate::error::UnsupportedInstance;
use crate::model::{Instance, ObjectiveKind, Schedule, StageConfig};
use crate::objective::{evaluate_objective, ObjectiveError};
use crate::oracle::{
    competitive_ratio, earliest_start_schedule, BatchComposition, OracleError, RatioReport,
};
use crate::time::{int, rat, QTime, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Unsupported(#[from] UnsupportedInstance),
}

/// `ε = 1/(10·b₁)`.
pub fn default_eps(b1: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10 * b1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Watching,
    Closed,
}

/// Single machine, capacity `b₁`, unit processing time. `J₁` arrives at 0.
/// If the algorithm starts it by the threshold, `b₁ − 1` more jobs arrive
/// `ε` later; otherwise nothing else ever arrives.
#[derive(Debug, Clone)]
pub struct ThresholdAdversary {
    stages: Vec<StageConfig>,
    threshold: QTime,
    eps: Rational,
    objective: ObjectiveKind,
    phase: Phase,
}

impl ThresholdAdversary {
    pub fn b1(&self) -> usize {
        self.stages[0].batch_capacity
    }

    pub fn threshold(&self) -> &QTime {
        &self.threshold
    }

    pub fn objective(&self) -> ObjectiveKind {
        self.objective
    }

    fn close_with(&mut self, releases: Vec<QTime>) -> Vec<QTime> {
        self.phase = Phase::Closed;
        releases
    }
}

/// Threshold `φ − 1`, scored on total completion time.
pub fn adversary_sum_cj(
    b1: usize,
    eps: Rational,
) -> Result<ThresholdAdversary, UnsupportedInstance> {
    threshold_adversary(
        b1,
        eps,
        QTime::phi() - QTime::from_int(1),
        ObjectiveKind::TotalCompletion,
    )
}

/// Threshold `1`, scored on total flow time.
pub fn adversary_sum_fj(
    b1: usize,
    eps: Rational,
) -> Result<ThresholdAdversary, UnsupportedInstance> {
    threshold_adversary(b1, eps, QTime::from_int(1), ObjectiveKind::TotalFlow)
}

fn threshold_adversary(
    b1: usize,
    eps: Rational,
    threshold: QTime,
    objective: ObjectiveKind,
) -> Result<ThresholdAdversary, UnsupportedInstance> {
    if b1 == 0 {
        return Err(UnsupportedInstance("b1 must be at least 1".into()));
    }
    if !eps.is_positive() {
        return Err(UnsupportedInstance("eps must be positive".into()));
    }
    Ok(ThresholdAdversary {
        stages: vec![StageConfig::new(1, b1, int(1))],
        threshold,
        eps,
        objective,
        phase: Phase::Watching,
    })
}

impl JobSource for ThresholdAdversary {
    fn stages(&self) -> &[StageConfig] {
        &self.stages
    }

    fn initial_releases(&mut self) -> Vec<QTime> {
        vec![QTime::zero()]
    }

    fn observe(&mut self, now: &QTime, decision: &StrategyDecision) -> Vec<QTime> {
        if self.phase == Phase::Closed {
            return Vec::new();
        }
        let started = decision.starts.iter().any(|s| s.stage == 0);
        if started && *now <= self.threshold {
            let at = now + &self.eps;
            return self.close_with(vec![at; self.b1() - 1]);
        }
        if started || *now > self.threshold {
            return self.close_with(Vec::new());
        }
        Vec::new()
    }

    fn idle(&mut self, _now: &QTime) -> Vec<QTime> {
        // The algorithm will never act again on its own, so it cannot start
        // J₁ by the threshold.
        self.close_with(Vec::new())
    }

    fn exhausted(&self) -> bool {
        self.phase == Phase::Closed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameReport {
    pub realized: Instance,
    pub trace: SimulationTrace,
    #[serde(flatten)]
    pub ratio: RatioReport,
}

/// Plays the game and compares the outcome with the offline optimum of the
/// realized instance.
pub fn play_threshold_game(
    adversary: &mut ThresholdAdversary,
    strategy: &mut dyn Strategy,
    cap: usize,
) -> Result<GameReport, AdversaryError> {
    let kind = adversary.objective();
    let (trace, realized) = run_adversary_game(adversary, strategy)?;
    let ratio = competitive_ratio(&trace.schedule, &realized, kind, cap)?;
    Ok(GameReport {
        realized,
        trace,
        ratio,
    })
}

/// Instance on which Never-Wait is far from a simple comparison schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessInstance {
    pub instance: Instance,
    /// All machines idle until `m₁ε`, then every job in `m₁` full batches.
    pub reference: Schedule,
    pub b1: usize,
    #[serde(with = "crate::time::rational_string")]
    pub eps: Rational,
}

/// `b₁ = (4−α)/α` must be a positive integer; `ε = 1/(m₁b₁)`, `n = m₁b₁`,
/// `rⱼ = (j−1)ε` for `j ≤ m₁` and `m₁ε` afterwards.
pub fn never_wait_tightness_instance(
    alpha: &Rational,
    m1: usize,
) -> Result<TightnessInstance, UnsupportedInstance> {
    if !alpha.is_positive() {
        return Err(UnsupportedInstance("alpha must be positive".into()));
    }
    if m1 == 0 {
        return Err(UnsupportedInstance("m1 must be at least 1".into()));
    }
    let b1 = (int(4) - alpha) / alpha;
    if !b1.is_integer() || !b1.is_positive() {
        return Err(UnsupportedInstance(format!(
            "(4 - alpha)/alpha = {b1} is not a positive integer"
        )));
    }
    let b1: usize = b1
        .to_integer()
        .try_into()
        .map_err(|_| UnsupportedInstance("b1 too large".into()))?;
    let n = m1 * b1;
    let eps = Rational::new(BigInt::one(), BigInt::from(n));
    let releases = (0..n)
        .map(|j| &eps * Rational::from_integer(BigInt::from(j.min(m1))))
        .collect();
    let instance = Instance::new(vec![StageConfig::new(m1, b1, int(1))], releases);
    let reference = earliest_start_schedule(&instance, &BatchComposition::new(vec![vec![b1; m1]]))
        .expect("m1 blocks of b1 cover n jobs");
    Ok(TightnessInstance {
        instance,
        reference,
        b1,
        eps,
    })
}

/// Full-Batch family with `s = 10α`, `n = 5α`: odd stages `p = 2, b = n`,
/// even stages `p = b = 1`, single machines, all jobs at time 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FullBatchFamily {
    pub instance: Instance,
    /// Singleton batches; job `j` starts the first stage at `2j − 2` and
    /// every later stage as early as possible.
    pub reference: Schedule,
}

pub fn full_batch_family(alpha: usize) -> Result<FullBatchFamily, UnsupportedInstance> {
    if alpha == 0 {
        return Err(UnsupportedInstance("alpha must be at least 1".into()));
    }
    let n = 5 * alpha;
    let stages = (0..10 * alpha)
        .map(|i| {
            if i % 2 == 0 {
                StageConfig::new(1, n, int(2))
            } else {
                StageConfig::new(1, 1, int(1))
            }
        })
        .collect();
    let instance = Instance::new(stages, vec![int(0); n]);
    // With singletons on one machine, the earliest start at the first stage
    // is exactly 2j − 2.
    let singletons = BatchComposition::new(vec![vec![1; n]; 10 * alpha]);
    let reference = earliest_start_schedule(&instance, &singletons).expect("valid singletons");
    Ok(FullBatchFamily {
        instance,
        reference,
    })
}

/// Small single-stage instances with batch capacity 2, for regression runs
/// of the makespan and maximum-flow ratios. Best effort: they mimic the
/// shape of the classical constructions (a lone early job, then followers
/// around the golden-ratio threshold) without reproducing them exactly.
pub fn golden_threshold_families(b_max: usize) -> Vec<Instance> {
    if b_max < 2 {
        return Vec::new();
    }
    let stage = || vec![StageConfig::new(1, 2, int(1))];
    let release_sets: Vec<Vec<Rational>> = vec![
        vec![int(0), rat(1, 2)],
        vec![int(0), rat(3, 5)],
        vec![int(0), rat(5, 8)],
        vec![int(0), rat(5, 8), rat(13, 8)],
        vec![int(0), rat(1, 10), int(1), rat(11, 10)],
        vec![int(0), rat(3, 5), rat(8, 5), rat(13, 5)],
    ];
    release_sets
        .into_iter()
        .map(|r| Instance::new(stage(), r))
        .collect()
}

/// A strategy's value and its ratio against a fixed reference schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReferenceRatio {
    pub objective: ObjectiveKind,
    pub value: QTime,
    pub reference: QTime,
    pub ratio: QTime,
}

/// Simulates `strategy` on `inst` and compares it with `reference` on all
/// four objectives.
pub fn compare_with_reference(
    inst: &Instance,
    reference: &Schedule,
    strategy: &mut dyn Strategy,
) -> Result<(SimulationTrace, Vec<ReferenceRatio>), AdversaryError> {
    let trace = simulate_instance(inst, strategy)?;
    let mut out = Vec::new();
    for kind in ObjectiveKind::ALL {
        let value = evaluate_objective(inst, &trace.schedule, kind)?;
        let reference = evaluate_objective(inst, reference, kind)?;
        let ratio = &value / &reference;
        out.push(ReferenceRatio {
            objective: kind,
            value,
            reference,
            ratio,
        });
    }
    Ok((trace, out))
}
