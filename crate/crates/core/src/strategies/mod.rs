//! Online scheduling rules.

mod full_batch;
mod never_wait;
mod t_switch;

use std::fmt;
use std::str::FromStr;

use crate::engine::{BatchStart, SimView, Strategy};

pub use full_batch::FullBatch;
pub use never_wait::{NeverWait, SleepThenNeverWait};
pub use t_switch::{StartingInstantGrid, TSwitch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    NeverWait,
    FullBatch,
    TSwitch,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::NeverWait,
        StrategyKind::FullBatch,
        StrategyKind::TSwitch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::NeverWait => "never-wait",
            StrategyKind::FullBatch => "full-batch",
            StrategyKind::TSwitch => "t-switch",
        }
    }

    pub fn build(self) -> Box<dyn Strategy> {
        match self {
            StrategyKind::NeverWait => Box::new(NeverWait),
            StrategyKind::FullBatch => Box::new(FullBatch),
            StrategyKind::TSwitch => Box::new(TSwitch::default()),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                format!("unknown strategy `{s}` (expected never-wait, full-batch or t-switch)")
            })
    }
}

/// Fills idle machines of `stage` in index order with the waiting jobs,
/// `min(b, remaining)` at a time, as long as `accept(size)` allows.
fn fill_idle(
    view: &SimView<'_>,
    stage: usize,
    out: &mut Vec<BatchStart>,
    mut accept: impl FnMut(usize, usize) -> bool,
) {
    let waiting = &view.waiting[stage];
    let capacity = view.stages[stage].batch_capacity;
    let mut pos = 0;
    for machine in view.idle_machines(stage) {
        let size = capacity.min(waiting.len() - pos);
        if size == 0 || !accept(size, waiting.len() - pos) {
            break;
        }
        out.push(BatchStart {
            stage,
            machine,
            jobs: waiting[pos..pos + size].to_vec(),
        });
        pos += size;
    }
}
