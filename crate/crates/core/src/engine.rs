//! The daily simulation loop, replicate execution and run metrics.
//!
//! Day 0 is the initial state. Days `1..=timeHorizon` each run six stages in
//! a fixed order, and every random draw of a run comes from its single
//! [`RngStream`] in that order:
//!
//! 1. external exposure (one draw per susceptible, then infection records);
//! 2. status update: recoveries, delivered results, isolation exits,
//!    exposed→infectious, recovered→susceptible (no draws);
//! 3. self-isolation at symptom onset (no draws);
//! 4. testing on testing days (pool shuffle, then pool and follow-up tests
//!    in pool order); same-day results are applied immediately;
//! 5. internal propagation (one draw per susceptible, then records);
//! 6. vaccination (willingness draws, then the dose allocation).

use serde::{Deserialize, Serialize};

use rand::seq::index;

use crate::agent::{Agent, AgentId, Compartment, CompartmentCounts, Population};
use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::interventions::{
    apply_positive_result, isolation_exit_step, recovered_to_susceptible_step,
    self_isolation_step, vaccination_step, IsolationKind, VaccineSupply,
};
use crate::rng::RngStream;
use crate::testing::{run_testing_day, PendingQueue, PendingTestResult, TestLedger};
use crate::transmission::{external_exposure_step, infect, internal_propagation_step};
use crate::viral_load::InfectionPhase;

/// End-of-day snapshot of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyRecord {
    pub day: u32,
    pub counts: CompartmentCounts,
    pub new_exposures_external: u32,
    pub new_exposures_internal: u32,
    pub cumulative_total_infections: u64,
    pub cumulative_false_isolations: u64,
    pub tests_used_today: u64,
    pub cumulative_cost: f64,
    pub vaccinated_total: u32,
}

impl DailyRecord {
    /// Column names of [`DailyRecord::values`], in order.
    pub const VALUE_COLUMNS: [&'static str; 15] = [
        "s_u",
        "s_v",
        "e",
        "i_s",
        "i_a",
        "r",
        "iso_healthy",
        "iso_sick",
        "new_ext",
        "new_int",
        "cum_infections",
        "cum_false_iso",
        "tests_today",
        "cum_cost",
        "vaccinated_total",
    ];

    /// Every numeric field except `day`, as floats.
    pub fn values(&self) -> [f64; 15] {
        let c = &self.counts.0;
        [
            f64::from(c[0]),
            f64::from(c[1]),
            f64::from(c[2]),
            f64::from(c[3]),
            f64::from(c[4]),
            f64::from(c[5]),
            f64::from(c[6]),
            f64::from(c[7]),
            f64::from(self.new_exposures_external),
            f64::from(self.new_exposures_internal),
            self.cumulative_total_infections as f64,
            self.cumulative_false_isolations as f64,
            self.tests_used_today as f64,
            self.cumulative_cost,
            f64::from(self.vaccinated_total),
        ]
    }

    pub fn infectious(&self) -> u32 {
        self.counts.infectious()
    }

    pub fn in_population(&self) -> u32 {
        self.counts.in_population()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_index: u64,
    pub seed: u64,
    pub total_infections: u64,
    pub seeded_infections: u64,
    pub acquired_infections: u64,
    pub false_isolations: u64,
    pub total_tests: u64,
    pub total_cost: f64,
    pub cost_per_person_per_day: f64,
}

/// Cost per person per day; zero for an empty horizon or population.
pub fn cost_per_person_per_day(total_cost: f64, time_horizon: u32, pop_size: u32) -> f64 {
    if time_horizon == 0 || pop_size == 0 {
        return 0.0;
    }
    total_cost / (f64::from(time_horizon) * f64::from(pop_size))
}

/// Mutable state of a single run.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub population: Population,
    pub pending: PendingQueue,
    pub ledger: TestLedger,
    pub supply: VaccineSupply,
    pub seeded_infections: u64,
    pub cumulative_infections: u64,
    pub false_isolations: u64,
}

impl SimulationState {
    fn record(&self, day: u32, new_external: usize, new_internal: usize) -> DailyRecord {
        DailyRecord {
            day,
            counts: self.population.counts(),
            new_exposures_external: new_external as u32,
            new_exposures_internal: new_internal as u32,
            cumulative_total_infections: self.cumulative_infections,
            cumulative_false_isolations: self.false_isolations,
            tests_used_today: self.ledger.tests_today,
            cumulative_cost: self.ledger.cumulative_cost,
            vaccinated_total: self.population.vaccinated_total(),
        }
    }

    /// Snapshot of the current state labelled `day`, with no daily flows.
    pub fn snapshot(&self, day: u32) -> DailyRecord {
        self.record(day, 0, 0)
    }

    fn check_conservation(&self, day: u32, stage: &str) -> Result<(), SimError> {
        if self.population.recount_matches() {
            Ok(())
        } else {
            Err(SimError::Inconsistency {
                day,
                message: format!("compartment counts diverged after {stage}"),
            })
        }
    }

    fn apply_results(&mut self, results: Vec<PendingTestResult>, day: u32, config: &ScenarioConfig) -> Result<(), SimError> {
        for result in results {
            if !result.outcome.is_positive() {
                continue;
            }
            // agents that entered isolation since sampling are already out
            if self.population.agent(result.agent).compartment.is_isolated() {
                continue;
            }
            if let Some(rec) = apply_positive_result(&mut self.population, result.agent, day, config)? {
                if rec.kind == IsolationKind::Healthy {
                    self.false_isolations += 1;
                }
            }
        }
        Ok(())
    }
}

/// Builds the day-0 population: willingness draws for every agent, then the
/// infected seeds, then the initially vaccinated.
pub fn initialize(config: &ScenarioConfig, rng: &mut RngStream) -> Result<SimulationState, SimError> {
    config.ensure_valid()?;
    let n = config.pop_size as usize;
    let seeds = config.initial_infected as usize;
    let acceptance = config.vaccine_acceptance();

    let mut agents = Vec::with_capacity(n);
    for id in 0..n {
        agents.push(Agent::new(id, acceptance.sample(rng)?));
    }
    let mut population = Population::new(agents);

    let mut seed_ids = index::sample(rng, n, seeds).into_vec();
    seed_ids.sort_unstable();
    for &id in &seed_ids {
        infect(&mut population, id, 0, config, rng)?;
    }

    let uninfected: Vec<AgentId> = population.ids_in(Compartment::SusceptibleUnvaccinated).collect();
    let to_vaccinate =
        ((config.init_proportion_vaccinated * uninfected.len() as f64).round() as usize).min(uninfected.len());
    let mut picks: Vec<AgentId> =
        index::sample(rng, uninfected.len(), to_vaccinate).into_iter().map(|i| uninfected[i]).collect();
    picks.sort_unstable();
    for id in picks {
        population.agent_mut(id).vaccinated = true;
        population.move_to(id, Compartment::SusceptibleVaccinated);
    }

    Ok(SimulationState {
        population,
        pending: PendingQueue::default(),
        ledger: TestLedger::default(),
        supply: VaccineSupply::new(config.vaccines_available_per_day),
        seeded_infections: seeds as u64,
        cumulative_infections: seeds as u64,
        false_isolations: 0,
    })
}

/// Recoveries of infectious agents whose load has fallen to the cut.
fn advance_infections(population: &mut Population, day: u32, config: &ScenarioConfig) {
    for id in 0..population.len() {
        let agent = population.agent(id);
        if !agent.compartment.is_infectious() {
            continue;
        }
        if phase_of(agent, day, config) == Some(InfectionPhase::Recovered) {
            population.agent_mut(id).recovery_day = Some(day);
            population.move_to(id, Compartment::Recovered);
        }
    }
}

/// Exposed agents crossing the infectiousness cut (or skipping straight to
/// recovery when their peak never exceeds it).
fn exposed_transitions(population: &mut Population, day: u32, config: &ScenarioConfig) {
    for id in 0..population.len() {
        let agent = population.agent(id);
        if agent.compartment != Compartment::Exposed {
            continue;
        }
        match phase_of(agent, day, config) {
            Some(InfectionPhase::Infectious) => {
                let to = if agent.symptomatic_assignment {
                    Compartment::InfectiousSymptomatic
                } else {
                    Compartment::InfectiousAsymptomatic
                };
                population.move_to(id, to);
            }
            Some(InfectionPhase::Recovered) => {
                population.agent_mut(id).recovery_day = Some(day);
                population.move_to(id, Compartment::Recovered);
            }
            _ => {}
        }
    }
}

fn phase_of(agent: &Agent, day: u32, config: &ScenarioConfig) -> Option<InfectionPhase> {
    let profile = agent.viral_profile.as_ref()?;
    let tau = agent.time_since_exposure(day)?;
    Some(profile.status_at(tau, config.infectious_viral_load_cut).phase)
}

/// Advances the run by one day (`1 ≤ day ≤ timeHorizon`).
pub fn step(
    state: &mut SimulationState,
    day: u32,
    config: &ScenarioConfig,
    rng: &mut RngStream,
) -> Result<DailyRecord, SimError> {
    state.ledger.start_day();

    // 1. external exposure
    let external = external_exposure_step(&mut state.population, day, config, rng)?;
    state.cumulative_infections += external.len() as u64;
    state.check_conservation(day, "external exposure")?;

    // 2. status update
    advance_infections(&mut state.population, day, config);
    let due = state.pending.deliver(day);
    state.apply_results(due, day, config)?;
    isolation_exit_step(&mut state.population, day);
    exposed_transitions(&mut state.population, day, config);
    recovered_to_susceptible_step(&mut state.population, day, config);
    state.check_conservation(day, "status update")?;

    // 3. self-isolation
    self_isolation_step(&mut state.population, day, config);
    state.check_conservation(day, "self-isolation")?;

    // 4. testing
    if config.is_testing_day(day) {
        run_testing_day(&state.population, config, day, &mut state.pending, &mut state.ledger, rng);
        let same_day = state.pending.deliver(day);
        state.apply_results(same_day, day, config)?;
    }
    state.check_conservation(day, "testing")?;

    // 5. internal propagation
    let internal = internal_propagation_step(&mut state.population, day, config, rng)?;
    state.cumulative_infections += internal.len() as u64;
    state.check_conservation(day, "internal propagation")?;

    // 6. vaccination
    vaccination_step(&mut state.population, &mut state.supply, rng);
    state.check_conservation(day, "vaccination")?;

    Ok(state.record(day, external.len(), internal.len()))
}

/// Records of one run: day 0 snapshot followed by one record per day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub records: Vec<DailyRecord>,
}

/// Runs replicate `run_index` of `config` to the horizon.
pub fn run(config: &ScenarioConfig, run_index: u64) -> Result<RunOutput, SimError> {
    let mut rng = RngStream::new(config.base_seed, run_index);
    let mut state = initialize(config, &mut rng)?;
    let mut records = Vec::with_capacity(config.time_horizon as usize + 1);
    records.push(state.snapshot(0));
    for day in 1..=config.time_horizon {
        records.push(step(&mut state, day, config, &mut rng)?);
    }
    let summary = RunSummary {
        run_index,
        seed: rng.seed(),
        total_infections: state.cumulative_infections,
        seeded_infections: state.seeded_infections,
        acquired_infections: state.cumulative_infections - state.seeded_infections,
        false_isolations: state.false_isolations,
        total_tests: state.ledger.total_tests,
        total_cost: state.ledger.cumulative_cost,
        cost_per_person_per_day: cost_per_person_per_day(
            state.ledger.cumulative_cost,
            config.time_horizon,
            config.pop_size,
        ),
    };
    Ok(RunOutput { summary, records })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the current rayon pool; identical to sequential without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

/// Per-day mean and min/max envelope of every [`DailyRecord`] value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayAggregate {
    pub day: u32,
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSet {
    pub runs: Vec<RunOutput>,
    pub aggregate: Vec<DayAggregate>,
}

impl ReplicateSet {
    pub fn summaries(&self) -> impl Iterator<Item = &RunSummary> {
        self.runs.iter().map(|r| &r.summary)
    }
}

/// Aggregates equal-length record series day by day.
pub fn aggregate_runs(runs: &[RunOutput]) -> Vec<DayAggregate> {
    let Some(first) = runs.first() else { return Vec::new() };
    let n = runs.len() as f64;
    (0..first.records.len())
        .map(|d| {
            let width = DailyRecord::VALUE_COLUMNS.len();
            let mut sum = vec![0.0; width];
            let mut min = vec![f64::INFINITY; width];
            let mut max = vec![f64::NEG_INFINITY; width];
            for run in runs {
                for (k, v) in run.records[d].values().into_iter().enumerate() {
                    sum[k] += v;
                    min[k] = min[k].min(v);
                    max[k] = max[k].max(v);
                }
            }
            DayAggregate { day: first.records[d].day, mean: sum.into_iter().map(|s| s / n).collect(), min, max }
        })
        .collect()
}

/// Runs replicates `0..n_runs`; results are ordered by run index whatever
/// the execution mode.
pub fn run_replicates(config: &ScenarioConfig, n_runs: u64, execution: Execution) -> Result<ReplicateSet, SimError> {
    config.ensure_valid()?;
    let runs = run_indices(config, 0..n_runs, execution)?;
    let aggregate = aggregate_runs(&runs);
    Ok(ReplicateSet { runs, aggregate })
}

fn run_indices(
    config: &ScenarioConfig,
    indices: std::ops::Range<u64>,
    execution: Execution,
) -> Result<Vec<RunOutput>, SimError> {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            indices.into_par_iter().map(|i| run(config, i)).collect()
        }
        _ => indices.map(|i| run(config, i)).collect(),
    }
}
