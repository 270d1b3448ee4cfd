mod common;

use common::checks::*;
use common::{instance_strategy, rational_strategy};
use pffb::bounds::{lower_bound_matrix, pff_correspondence, simple_lower_bound, sung_bound};
use pffb::engine::simulate_instance;
use pffb::gantt::gantt_chart;
use pffb::objective::objective_from_completions;
use pffb::strategies::{FullBatch, StrategyKind, TSwitch};
use pffb::time::compare_qtime;
use pffb::{evaluate_objective, Instance, ObjectiveKind, QTime, Schedule, StageConfig};
use proptest::prelude::*;

fn qtime() -> impl Strategy<Value = QTime> {
    (rational_strategy(), rational_strategy()).prop_map(|(a, b)| QTime::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn qtime_order_agrees_with_floats(x in qtime(), y in qtime()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        prop_assume!((fx - fy).abs() > 1e-6);
        prop_assert_eq!(compare_qtime(&x, &y), fx.partial_cmp(&fy).unwrap());
    }

    #[test]
    fn qtime_field_laws(x in qtime(), y in qtime(), z in qtime()) {
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x.clone());
        }
        let f = x.floor();
        prop_assert!(QTime::from(pffb::Rational::from_integer(f.clone())) <= x);
        prop_assert!(QTime::from(pffb::Rational::from_integer(f + 1)) > x);
    }

    #[test]
    fn qtime_json_round_trip(x in qtime()) {
        let text = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<QTime>(&text).unwrap(), x);
    }

    #[test]
    fn instance_json_round_trip(inst in instance_strategy(1..=4, 0..=8, 3, 4)) {
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn schedule_json_round_trip(inst in instance_strategy(1..=3, 1..=8, 2, 3)) {
        let trace = simulate_instance(&inst, StrategyKind::NeverWait.build().as_mut()).unwrap();
        let text = trace.schedule.to_json();
        let back = Schedule::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn bound_matrix_shape(inst in instance_strategy(1..=4, 1..=12, 3, 4)) {
        let bm = lower_bound_matrix(&inst);
        for i in 0..inst.num_stages() {
            let p = &inst.stages[i].processing_time;
            for j in 0..inst.num_jobs() {
                if j > 0 {
                    prop_assert!(bm.get(i, j - 1) <= bm.get(i, j));
                }
                let above = if i == 0 { inst.release(j) } else { bm.get(i - 1, j).clone() };
                prop_assert!(*bm.get(i, j) >= &above + p);
                prop_assert!(simple_lower_bound(&inst, i, j) <= *bm.get(i, j));
            }
        }
        prop_assert!(pff_correspondence(&inst).matches(&bm));
    }

    #[test]
    fn sung_bound_below_recursion(
        stages in prop::collection::vec(common::stage_strategy(1, 4), 1..=4),
        n in 1usize..=10,
    ) {
        let inst = Instance::new(stages, vec![pffb::time::int(0); n]);
        let bm = lower_bound_matrix(&inst);
        prop_assert!(sung_bound(&inst).unwrap() <= *bm.makespan_bound().unwrap());
    }

    #[test]
    fn never_wait_invariants(inst in instance_strategy(1..=4, 1..=12, 3, 4)) {
        let mut nw = WatchedNeverWait::default();
        let trace = simulate_instance(&inst, &mut nw).unwrap();
        prop_assert!(nw.violations.is_empty(), "{:?}", nw.violations);
        let c = feasible_erd(&inst, &trace.schedule).unwrap();
        let bm = lower_bound_matrix(&inst);
        dominates_bounds(&c, &bm).unwrap();
        never_wait_bound(&inst, &c, &bm).unwrap();
        let total_c = evaluate_objective(&inst, &trace.schedule, ObjectiveKind::TotalCompletion).unwrap();
        let total_f = evaluate_objective(&inst, &trace.schedule, ObjectiveKind::TotalFlow).unwrap();
        let releases: pffb::Rational = inst.releases.iter().sum();
        prop_assert_eq!(total_f, &total_c - &QTime::from(releases));
    }

    #[test]
    fn full_batch_invariants(inst in instance_strategy(1..=4, 1..=12, 3, 4)) {
        let trace = simulate_instance(&inst, &mut FullBatch).unwrap();
        let c = feasible_erd(&inst, &trace.schedule).unwrap();
        dominates_bounds(&c, &lower_bound_matrix(&inst)).unwrap();
        full_batches(&inst, &trace.schedule).unwrap();
    }

    #[test]
    fn t_switch_invariants_hold(inst in instance_strategy(2..=2, 1..=12, 3, 4)) {
        let trace = simulate_instance(&inst, &mut TSwitch::default()).unwrap();
        let c = feasible_erd(&inst, &trace.schedule).unwrap();
        let bm = lower_bound_matrix(&inst);
        dominates_bounds(&c, &bm).unwrap();
        t_switch_invariants(&inst, &trace.schedule, &c, &bm).unwrap();
    }

    #[test]
    fn simulation_is_deterministic(inst in instance_strategy(1..=3, 0..=10, 2, 3)) {
        for kind in [StrategyKind::NeverWait, StrategyKind::FullBatch] {
            let a = simulate_instance(&inst, kind.build().as_mut()).unwrap().to_json();
            let b = simulate_instance(&inst, kind.build().as_mut()).unwrap().to_json();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn chart_bars_match_batches(inst in instance_strategy(1..=3, 1..=8, 2, 3)) {
        let trace = simulate_instance(&inst, StrategyKind::NeverWait.build().as_mut()).unwrap();
        let chart = gantt_chart(&inst, &trace.schedule).unwrap();
        for b in &trace.schedule.batches {
            let end = &b.start + &inst.stages[b.stage].processing_time;
            for &j in &b.jobs {
                let bar = &chart.rows[j].bars[b.stage];
                prop_assert_eq!(&bar.start, &b.start);
                prop_assert_eq!(&bar.end, &end);
                prop_assert_eq!(bar.machine, b.machine);
            }
        }
    }

    #[test]
    fn flow_identity_on_arbitrary_completions(inst in instance_strategy(1..=1, 1..=8, 1, 1), extra in prop::collection::vec(0i64..20, 8)) {
        let completions: Vec<QTime> = (0..inst.num_jobs())
            .map(|j| &inst.release(j) + &QTime::from_int(extra[j]))
            .collect();
        let c = objective_from_completions(&inst, &completions, ObjectiveKind::TotalCompletion).unwrap();
        let f = objective_from_completions(&inst, &completions, ObjectiveKind::TotalFlow).unwrap();
        let releases: pffb::Rational = inst.releases.iter().sum();
        prop_assert_eq!(f, &c - &QTime::from(releases));
    }
}

#[test]
fn qtime_order_on_ten_thousand_pairs() {
    use rand::Rng;
    let mut rng = common::rng(7);
    let mut checked = 0;
    for _ in 0..10_000 {
        let mut r = || pffb::time::rat(rng.gen_range(-500..=500), rng.gen_range(1..=97));
        let x = QTime::new(r(), r());
        let y = QTime::new(r(), r());
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-6 {
            assert_eq!(
                compare_qtime(&x, &y),
                fx.partial_cmp(&fy).unwrap(),
                "{x} vs {y}"
            );
            checked += 1;
        }
    }
    assert!(checked > 9_900);
}

#[test]
fn empty_instance_with_every_strategy() {
    let inst = Instance::new(
        vec![
            StageConfig::new(1, 2, pffb::time::int(1)),
            StageConfig::new(2, 1, pffb::time::int(2)),
        ],
        vec![],
    );
    for kind in StrategyKind::ALL {
        let trace = simulate_instance(&inst, kind.build().as_mut()).unwrap();
        assert!(trace.schedule.is_empty());
    }
}
