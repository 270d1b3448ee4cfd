use crate::engine::{SimView, Strategy, StrategyDecision};

use super::fill_idle;

/// Starts only full batches. A short batch is allowed once no more jobs can
/// reach the stage: the stream has ended and every job not yet started there
/// is waiting.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullBatch;

impl Strategy for FullBatch {
    fn name(&self) -> &str {
        "full-batch"
    }

    fn decide(&mut self, view: &SimView<'_>) -> StrategyDecision {
        let mut d = StrategyDecision::default();
        for stage in 0..view.stages.len() {
            let capacity = view.stages[stage].batch_capacity;
            let mut unstarted = view.unstarted(stage);
            fill_idle(view, stage, &mut d.starts, |size, available| {
                let ok = size == capacity || (view.end_of_stream && available == unstarted);
                unstarted -= size;
                ok
            });
        }
        d
    }
}
