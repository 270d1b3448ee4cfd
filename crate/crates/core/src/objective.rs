use thiserror::Error;

use crate::model::{Instance, ObjectiveKind, Schedule};
use crate::time::QTime;
use crate::validate::{validate_schedule, ScheduleViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjectiveError {
    #[error("objective is undefined for an instance without jobs")]
    NoJobs,
    #[error(transparent)]
    Infeasible(#[from] ScheduleViolation),
}

/// Objective value of final completion times `Cⱼ` with releases `rⱼ`.
///
/// Returns `None` for an empty job list.
pub fn objective_from_completions(
    inst: &Instance,
    completions: &[QTime],
    kind: ObjectiveKind,
) -> Option<QTime> {
    if completions.is_empty() {
        return None;
    }
    let value = |j: usize, c: &QTime| {
        if kind.is_flow() {
            c - &inst.release(j)
        } else {
            c.clone()
        }
    };
    let terms = completions.iter().enumerate().map(|(j, c)| value(j, c));
    Some(if kind.is_sum() {
        terms.sum()
    } else {
        terms.max().expect("nonempty")
    })
}

/// Exact objective value of a feasible schedule.
pub fn evaluate_objective(
    inst: &Instance,
    sched: &Schedule,
    kind: ObjectiveKind,
) -> Result<QTime, ObjectiveError> {
    if inst.num_jobs() == 0 {
        return Err(ObjectiveError::NoJobs);
    }
    let report = validate_schedule(inst, sched)?;
    Ok(objective_from_completions(inst, report.final_completions(), kind).expect("n ≥ 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BatchAssignment, StageConfig};
    use crate::time::int;

    #[test]
    fn single_job_all_kinds() {
        let inst = Instance::new(vec![StageConfig::new(1, 1, int(1))], vec![int(0)]);
        let sched = Schedule::new(vec![BatchAssignment {
            stage: 0,
            machine: 0,
            start: QTime::zero(),
            jobs: vec![0],
        }]);
        for kind in ObjectiveKind::ALL {
            assert_eq!(
                evaluate_objective(&inst, &sched, kind),
                Ok(QTime::from_int(1))
            );
        }
    }

    #[test]
    fn empty_instance_is_an_error() {
        let inst = Instance::new(vec![StageConfig::new(1, 1, int(1))], vec![]);
        assert_eq!(
            evaluate_objective(&inst, &Schedule::default(), ObjectiveKind::Makespan),
            Err(ObjectiveError::NoJobs)
        );
    }

    #[test]
    fn flow_objectives_subtract_releases() {
        let inst = Instance::new(vec![StageConfig::new(1, 2, int(1))], vec![int(0), int(2)]);
        let c = [QTime::from_int(1), QTime::from_int(4)];
        let f = |k| objective_from_completions(&inst, &c, k).unwrap();
        assert_eq!(f(ObjectiveKind::Makespan), QTime::from_int(4));
        assert_eq!(f(ObjectiveKind::TotalCompletion), QTime::from_int(5));
        assert_eq!(f(ObjectiveKind::MaxFlow), QTime::from_int(2));
        assert_eq!(f(ObjectiveKind::TotalFlow), QTime::from_int(3));
    }
}
