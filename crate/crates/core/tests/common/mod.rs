#![allow(dead_code)]

use pffb::time::{int, rat};
use pffb::{Instance, Rational, StageConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod checks;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_stages: usize,
    pub max_jobs: usize,
    pub max_machines: usize,
    pub max_capacity: usize,
}

impl Shape {
    pub const fn new(
        max_stages: usize,
        max_jobs: usize,
        max_machines: usize,
        max_capacity: usize,
    ) -> Self {
        Shape {
            max_stages,
            max_jobs,
            max_machines,
            max_capacity,
        }
    }
}

pub fn random_processing_time(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(1..=6), rng.gen_range(1..=3))
}

/// Sorted releases built from nonnegative rational increments, with ties.
pub fn random_releases(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let mut t = int(0);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.6) {
                t += rat(rng.gen_range(1..=4), rng.gen_range(1..=3));
            }
            t.clone()
        })
        .collect()
}

pub fn random_instance(rng: &mut impl Rng, shape: Shape) -> Instance {
    let s = rng.gen_range(1..=shape.max_stages);
    let n = rng.gen_range(1..=shape.max_jobs);
    let stages = (0..s)
        .map(|_| {
            StageConfig::new(
                rng.gen_range(1..=shape.max_machines),
                rng.gen_range(1..=shape.max_capacity),
                random_processing_time(rng),
            )
        })
        .collect();
    Instance::new(stages, random_releases(rng, n))
}

pub fn random_two_stage(
    rng: &mut impl Rng,
    max_jobs: usize,
    max_machines: usize,
    max_capacity: usize,
) -> Instance {
    let mut inst = random_instance(rng, Shape::new(2, max_jobs, max_machines, max_capacity));
    while inst.num_stages() < 2 {
        inst.stages.push(StageConfig::new(
            rng.gen_range(1..=max_machines),
            rng.gen_range(1..=max_capacity),
            random_processing_time(rng),
        ));
    }
    inst
}

/// One machine per stage and every job at time zero.
pub fn random_zero_release_pfb(
    rng: &mut impl Rng,
    max_stages: usize,
    max_jobs: usize,
    max_capacity: usize,
) -> Instance {
    let s = rng.gen_range(1..=max_stages);
    let n = rng.gen_range(1..=max_jobs);
    let stages = (0..s)
        .map(|_| {
            StageConfig::new(
                1,
                rng.gen_range(1..=max_capacity),
                random_processing_time(rng),
            )
        })
        .collect();
    Instance::new(stages, vec![int(0); n])
}

pub fn example1() -> Instance {
    Instance::new(
        vec![
            StageConfig::new(1, 3, int(3)),
            StageConfig::new(2, 2, int(4)),
        ],
        vec![int(0), int(0), int(1), int(3), int(3)],
    )
}

pub fn example2() -> Instance {
    Instance::new(
        vec![
            StageConfig::new(1, 1, int(1)),
            StageConfig::new(1, 2, int(2)),
            StageConfig::new(1, 1, int(1)),
        ],
        vec![int(0), int(0)],
    )
}

pub fn sung_instance() -> Instance {
    Instance::new(
        vec![
            StageConfig::new(1, 1, int(1)),
            StageConfig::new(1, 2, int(3)),
            StageConfig::new(1, 3, int(5)),
        ],
        vec![int(0); 6],
    )
}

pub fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

pub fn stage_strategy(
    max_machines: usize,
    max_capacity: usize,
) -> impl Strategy<Value = StageConfig> {
    (1..=max_machines, 1..=max_capacity, 1i64..=6, 1i64..=3)
        .prop_map(|(m, b, k, d)| StageConfig::new(m, b, rat(k, d)))
}

pub fn instance_strategy(
    stages: std::ops::RangeInclusive<usize>,
    jobs: std::ops::RangeInclusive<usize>,
    max_machines: usize,
    max_capacity: usize,
) -> impl Strategy<Value = Instance> {
    (
        prop::collection::vec(stage_strategy(max_machines, max_capacity), stages),
        prop::collection::vec((0i64..=4, 1i64..=3), jobs),
    )
        .prop_map(|(stages, increments)| {
            let mut t = int(0);
            let releases = increments
                .into_iter()
                .map(|(k, d)| {
                    t += rat(k, d);
                    t.clone()
                })
                .collect();
            Instance::new(stages, releases)
        })
}
