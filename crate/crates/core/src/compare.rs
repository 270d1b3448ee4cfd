//! Side-by-side evaluation of strategies on one instance.

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{lower_bound_matrix, objective_floor};
use crate::engine::{simulate_instance, SimError};
use crate::model::{Instance, ObjectiveKind};
use crate::objective::{evaluate_objective, ObjectiveError};
use crate::oracle::{optimal_permutation_schedule, OracleError};
use crate::strategies::StrategyKind;
use crate::time::{format_rational, integral_form, QTime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("{strategy}: {source}")]
    Simulation { strategy: String, source: SimError },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompareRow {
    pub strategy: String,
    pub objective: ObjectiveKind,
    pub value: QTime,
    /// Offline optimum; absent in bound-only mode.
    pub optimum: Option<QTime>,
    /// Objective evaluated at the completion-time lower bounds.
    pub bound: QTime,
    pub ratio_vs_optimum: Option<QTime>,
    pub ratio_vs_bound: QTime,
}

impl CompareRow {
    /// The optimum ratio when available, the bound ratio otherwise.
    pub fn headline_ratio(&self) -> &QTime {
        self.ratio_vs_optimum
            .as_ref()
            .unwrap_or(&self.ratio_vs_bound)
    }
}

pub fn compare(
    inst: &Instance,
    strategies: &[StrategyKind],
    kind: ObjectiveKind,
    cap: usize,
    bound_only: bool,
) -> Result<Vec<CompareRow>, CompareError> {
    if inst.num_jobs() == 0 {
        return Err(ObjectiveError::NoJobs.into());
    }
    let bound = objective_floor(inst, &lower_bound_matrix(inst), kind).expect("n ≥ 1");
    let optimum = if bound_only {
        None
    } else {
        Some(optimal_permutation_schedule(inst, kind, cap)?.1)
    };
    let mut rows = Vec::new();
    for &s in strategies {
        let trace = simulate_instance(inst, s.build().as_mut()).map_err(|source| {
            CompareError::Simulation {
                strategy: s.name().to_string(),
                source,
            }
        })?;
        let value = evaluate_objective(inst, &trace.schedule, kind)?;
        rows.push(CompareRow {
            strategy: s.name().to_string(),
            objective: kind,
            ratio_vs_optimum: optimum.as_ref().map(|o| &value / o),
            ratio_vs_bound: &value / &bound,
            value,
            optimum: optimum.clone(),
            bound: bound.clone(),
        });
    }
    Ok(rows)
}

/// `p`, `p+q√5` or `p-q√5`.
fn format_surd(p: &num_bigint::BigInt, q: &num_bigint::BigInt) -> String {
    use num_traits::{Signed, Zero};
    if q.is_zero() {
        p.to_string()
    } else if q.is_negative() {
        format!("{p}-{}√5", q.abs())
    } else {
        format!("{p}+{q}√5")
    }
}

/// Columns: strategy, objective, value_a, value_b, ratio_num, ratio_den.
/// The value is `value_a + value_b·√5`; the ratio is
/// `ratio_num / ratio_den` with an integer denominator.
pub fn to_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from("strategy,objective,value_a,value_b,ratio_num,ratio_den\n");
    for r in rows {
        let (p, q, d) = integral_form(r.headline_ratio());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.strategy,
            r.objective.code(),
            format_rational(r.value.a()),
            format_rational(r.value.b()),
            format_surd(&p, &q),
            d
        ));
    }
    out
}

pub fn to_json(rows: &[CompareRow]) -> String {
    serde_json::to_string(rows).expect("rows serialize")
}
