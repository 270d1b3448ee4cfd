use crate::engine::{SimView, Strategy, StrategyDecision, Wakeup};
use crate::time::QTime;

use super::fill_idle;

/// Starts a batch, as large as possible, whenever a machine is idle and a
/// job is waiting for it.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeverWait;

pub(super) fn never_wait_stage(view: &SimView<'_>, stage: usize, out: &mut StrategyDecision) {
    fill_idle(view, stage, &mut out.starts, |_, _| true);
}

impl Strategy for NeverWait {
    fn name(&self) -> &str {
        "never-wait"
    }

    fn decide(&mut self, view: &SimView<'_>) -> StrategyDecision {
        let mut d = StrategyDecision::default();
        for stage in 0..view.stages.len() {
            never_wait_stage(view, stage, &mut d);
        }
        d
    }
}

/// Does nothing before `until`, then behaves like [`NeverWait`].
#[derive(Debug, Clone)]
pub struct SleepThenNeverWait {
    until: QTime,
    alarm_set: bool,
}

impl SleepThenNeverWait {
    pub fn new(until: QTime) -> Self {
        SleepThenNeverWait {
            until,
            alarm_set: false,
        }
    }
}

impl Strategy for SleepThenNeverWait {
    fn name(&self) -> &str {
        "sleep-then-never-wait"
    }

    fn decide(&mut self, view: &SimView<'_>) -> StrategyDecision {
        if *view.now >= self.until {
            return NeverWait.decide(view);
        }
        let mut d = StrategyDecision::default();
        if !self.alarm_set {
            self.alarm_set = true;
            d.wakeups.push(Wakeup {
                time: self.until.clone(),
                stage: 0,
            });
        }
        d
    }
}
