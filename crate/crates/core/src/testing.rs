//! Single-sample testing, two-stage Dorfman pooling, delayed results and
//! the test-count ledger.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, Population};
use crate::config::{PoolingType, ScenarioConfig};
use crate::transmission::bernoulli;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    /// Limit of detection, cp/ml.
    pub detection_cut: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub delay_days: u32,
    pub cost_per_test: f64,
}

impl TestSpec {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        TestSpec {
            detection_cut: config.detection_cut,
            fpr: config.fpr_single,
            fnr: config.fnr_single,
            delay_days: config.days_delay_test_results,
            cost_per_test: config.cost_per_test,
        }
    }

    pub fn is_detectable(&self, load: f64) -> bool {
        load > self.detection_cut
    }

    /// Positive probability for a sample (or pool) of the given detectability.
    pub fn positive_probability(&self, detectable: bool) -> f64 {
        if detectable {
            1.0 - self.fnr
        } else {
            self.fpr
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    fn from_bool(positive: bool) -> Self {
        if positive {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Outcome::Positive
    }
}

/// Members of one stage-1 pool and their loads on the sampling day.
#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    pub members: Vec<AgentId>,
    pub loads: Vec<f64>,
}

impl Pool {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mean_load(&self) -> f64 {
        self.loads.iter().sum::<f64>() / self.loads.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendingTestResult {
    pub agent: AgentId,
    pub sampled_day: u32,
    pub delivery_day: u32,
    pub outcome: Outcome,
    /// This member's share of the tests consumed by its pool.
    pub tests_attributed: f64,
}

/// Results awaiting delivery, keyed by delivery day.
#[derive(Debug, Clone, Default)]
pub struct PendingQueue {
    by_day: BTreeMap<u32, Vec<PendingTestResult>>,
}

impl PendingQueue {
    pub fn push(&mut self, result: PendingTestResult) {
        self.by_day.entry(result.delivery_day).or_default().push(result);
    }

    pub fn len(&self) -> usize {
        self.by_day.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_day.is_empty()
    }

    /// Removes and returns every result due on `day`, in enqueue order.
    pub fn deliver(&mut self, day: u32) -> Vec<PendingTestResult> {
        self.by_day.remove(&day).unwrap_or_default()
    }
}

/// Running count of tests administered and their cost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TestLedger {
    pub tests_today: u64,
    pub total_tests: u64,
    pub cumulative_cost: f64,
}

impl TestLedger {
    fn accrue(&mut self, tests: u64, cost_per_test: f64) {
        self.tests_today += tests;
        self.total_tests += tests;
        self.cumulative_cost += tests as f64 * cost_per_test;
    }

    pub fn start_day(&mut self) {
        self.tests_today = 0;
    }
}

pub fn single_test<R: Rng + ?Sized>(viral_load: f64, spec: &TestSpec, rng: &mut R) -> Outcome {
    let p = spec.positive_probability(spec.is_detectable(viral_load));
    Outcome::from_bool(bernoulli(rng, p))
}

/// Pool is detectable when the mean member load exceeds the cut.
pub fn pool_test_average<R: Rng + ?Sized>(pool: &Pool, spec: &TestSpec, rng: &mut R) -> Outcome {
    let p = spec.positive_probability(spec.is_detectable(pool.mean_load()));
    Outcome::from_bool(bernoulli(rng, p))
}

/// Positive with probability `fpr` when no member is detectable, else
/// `1 - fnr^k` for `k` detectable members.
pub fn pool_test_exponential<R: Rng + ?Sized>(
    pool: &Pool,
    spec: &TestSpec,
    rng: &mut R,
) -> Outcome {
    let k = pool.loads.iter().filter(|&&v| spec.is_detectable(v)).count();
    let p = if k == 0 { spec.fpr } else { 1.0 - spec.fnr.powi(k as i32) };
    Outcome::from_bool(bernoulli(rng, p))
}

/// Shuffles `eligible` and chunks it into pools of `pool_size`; the last
/// pool takes the remainder.
pub fn partition_into_pools<R: Rng + ?Sized>(
    eligible: &[AgentId],
    pool_size: usize,
    rng: &mut R,
) -> Vec<Vec<AgentId>> {
    assert!(pool_size >= 1, "pool size must be at least 1");
    let mut ids = eligible.to_vec();
    ids.shuffle(rng);
    ids.chunks(pool_size).map(<[AgentId]>::to_vec).collect()
}

/// Tests one pool, running stage 2 on every member of a positive pool of
/// two or more. Returns each member's final outcome and the number of tests
/// consumed.
pub fn dorfman_test<R: Rng + ?Sized>(
    pool: &Pool,
    spec: &TestSpec,
    pooling: PoolingType,
    rng: &mut R,
) -> (Vec<Outcome>, u64) {
    if pool.len() == 1 {
        return (vec![single_test(pool.loads[0], spec, rng)], 1);
    }
    let stage_one = match pooling {
        PoolingType::Average => pool_test_average(pool, spec, rng),
        PoolingType::Exponential => pool_test_exponential(pool, spec, rng),
    };
    if !stage_one.is_positive() {
        return (vec![Outcome::Negative; pool.len()], 1);
    }
    let outcomes = pool.loads.iter().map(|&v| single_test(v, spec, rng)).collect();
    (outcomes, 1 + pool.len() as u64)
}

/// Whether an agent can be sampled on `day`.
pub fn is_test_eligible(population: &Population, id: AgentId, day: u32, config: &ScenarioConfig) -> bool {
    let agent = population.agent(id);
    if agent.compartment.is_isolated() {
        return false;
    }
    match agent.isolation_exit_day {
        Some(exit) => day.saturating_sub(exit) >= config.no_testing_post_isolation_days,
        None => true,
    }
}

/// Samples every eligible agent, runs the pooled procedure on sampling-day
/// loads and enqueues the outcomes for `day + delay`. Returns the number of
/// tests consumed.
pub fn run_testing_day<R: Rng + ?Sized>(
    population: &Population,
    config: &ScenarioConfig,
    day: u32,
    pending: &mut PendingQueue,
    ledger: &mut TestLedger,
    rng: &mut R,
) -> u64 {
    let spec = TestSpec::from_config(config);
    let eligible: Vec<AgentId> = (0..population.len())
        .filter(|&id| is_test_eligible(population, id, day, config))
        .collect();
    let pools = partition_into_pools(&eligible, config.pool_size as usize, rng);
    let mut consumed = 0;
    for members in pools {
        let loads = members.iter().map(|&id| population.agent(id).viral_load(day)).collect();
        let pool = Pool { members, loads };
        let (outcomes, tests) = dorfman_test(&pool, &spec, config.pooling_type, rng);
        consumed += tests;
        let share = tests as f64 / pool.len() as f64;
        for (&agent, outcome) in pool.members.iter().zip(outcomes) {
            pending.push(PendingTestResult {
                agent,
                sampled_day: day,
                delivery_day: day + spec.delay_days,
                outcome,
                tests_attributed: share,
            });
        }
    }
    ledger.accrue(consumed, spec.cost_per_test);
    consumed
}
