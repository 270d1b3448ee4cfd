use num_bigint::BigInt;
use serde::Serialize;

use crate::engine::{SimView, Strategy, StrategyDecision, Wakeup};
use crate::error::UnsupportedInstance;
use crate::model::StageConfig;
use crate::time::{rational_string, QTime, Rational};

use super::fill_idle;
use super::never_wait::never_wait_stage;

/// Instants `t + ℓ·p₁ ≥ 0` for integer `ℓ`, where `t = φp₁ + (φ−1)p₂`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StartingInstantGrid {
    pub t: QTime,
    /// Smallest nonnegative instant.
    pub first: QTime,
    #[serde(with = "rational_string")]
    pub period: Rational,
}

impl StartingInstantGrid {
    pub fn new(p1: &Rational, p2: &Rational) -> Self {
        let phi = QTime::phi();
        let t = &phi * p1 + &(&phi - &QTime::from_int(1)) * p2;
        let steps = t.div_rational(p1).floor();
        let first = &t - &QTime::from(p1 * Rational::from_integer(steps));
        StartingInstantGrid {
            t,
            first,
            period: p1.clone(),
        }
    }

    fn at(&self, l: BigInt) -> QTime {
        &self.t + &QTime::from(&self.period * Rational::from_integer(l))
    }

    /// `(x − t)/p₁`, exact.
    fn offset(&self, x: &QTime) -> QTime {
        (x - &self.t).div_rational(&self.period)
    }

    pub fn contains(&self, x: &QTime) -> bool {
        if *x < self.first {
            return false;
        }
        let off = self.offset(x);
        off.to_rational().is_some_and(|r| r.is_integer())
    }

    /// Earliest instant `≥ x`.
    pub fn next_at_or_after(&self, x: &QTime) -> QTime {
        if *x <= self.first {
            return self.first.clone();
        }
        self.at(self.offset(x).ceil())
    }

    /// Earliest instant `> x`.
    pub fn next_after(&self, x: &QTime) -> QTime {
        if *x < self.first {
            return self.first.clone();
        }
        self.at(self.offset(x).floor() + 1)
    }
}

/// Two-stage rule. Stage 1 starts batches only at grid instants; stage 2
/// stays idle until `t` and then never waits.
#[derive(Debug, Clone, Default)]
pub struct TSwitch {
    grid: Option<StartingInstantGrid>,
}

impl TSwitch {
    pub fn grid(&self) -> Option<&StartingInstantGrid> {
        self.grid.as_ref()
    }
}

impl Strategy for TSwitch {
    fn name(&self) -> &str {
        "t-switch"
    }

    fn prepare(&mut self, stages: &[StageConfig]) -> Result<(), UnsupportedInstance> {
        if stages.len() != 2 {
            return Err(UnsupportedInstance(format!(
                "t-switch needs exactly 2 stages, got {}",
                stages.len()
            )));
        }
        self.grid = Some(StartingInstantGrid::new(
            &stages[0].processing_time,
            &stages[1].processing_time,
        ));
        Ok(())
    }

    fn decide(&mut self, view: &SimView<'_>) -> StrategyDecision {
        let grid = self.grid.as_ref().expect("prepare runs before decide");
        let now = view.now;
        let mut d = StrategyDecision::default();

        let waiting = view.waiting[0].len();
        if waiting > 0 {
            let mut started = 0;
            if grid.contains(now) {
                fill_idle(view, 0, &mut d.starts, |size, _| {
                    started += size;
                    true
                });
            }
            if started < waiting {
                d.wakeups.push(Wakeup {
                    time: grid.next_after(now),
                    stage: 0,
                });
            }
        }

        if *now >= grid.t {
            never_wait_stage(view, 1, &mut d);
        } else if !view.waiting[1].is_empty() {
            d.wakeups.push(Wakeup {
                time: grid.t.clone(),
                stage: 1,
            });
        }
        d
    }
}
