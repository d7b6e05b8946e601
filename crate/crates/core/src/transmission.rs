//! Daily exposure: the external (imported) term and the internal
//! mass-action term of the exposure probability, applied as two separate
//! stages of the day.

use rand::Rng;

use crate::agent::{AgentId, Compartment, CompartmentCounts, Population};
use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::viral_load::ViralLoadProfile;

/// In-population compartment counts used by the exposure probability.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PopulationCounts {
    pub s_u: u32,
    pub s_v: u32,
    pub e: u32,
    pub i_s: u32,
    pub i_a: u32,
    pub r: u32,
}

impl PopulationCounts {
    pub fn susceptible(&self) -> u32 {
        self.s_u + self.s_v
    }

    pub fn infectious(&self) -> u32 {
        self.i_s + self.i_a
    }

    /// `P = S + E + I + R`; isolated agents are not part of it.
    pub fn in_population(&self) -> u32 {
        self.susceptible() + self.e + self.infectious() + self.r
    }
}

impl From<CompartmentCounts> for PopulationCounts {
    fn from(c: CompartmentCounts) -> Self {
        PopulationCounts {
            s_u: c.get(Compartment::SusceptibleUnvaccinated),
            s_v: c.get(Compartment::SusceptibleVaccinated),
            e: c.get(Compartment::Exposed),
            i_s: c.get(Compartment::InfectiousSymptomatic),
            i_a: c.get(Compartment::InfectiousAsymptomatic),
            r: c.get(Compartment::Recovered),
        }
    }
}

/// Which terms of the exposure probability to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExposureTerms {
    pub external: bool,
    pub internal: bool,
}

impl ExposureTerms {
    pub const BOTH: ExposureTerms = ExposureTerms { external: true, internal: true };
    pub const EXTERNAL: ExposureTerms = ExposureTerms { external: true, internal: false };
    pub const INTERNAL: ExposureTerms = ExposureTerms { external: false, internal: true };
}

/// Daily exposure probability `(α if vaccinated) · (γ + β·I/P)`, clamped
/// into `[0, 1]`.
pub fn exposure_probability(
    counts: &PopulationCounts,
    beta: f64,
    gamma: f64,
    alpha: f64,
    vaccinated: bool,
    terms: ExposureTerms,
) -> Result<f64, SimError> {
    let mut p = 0.0;
    if terms.external {
        p += gamma;
    }
    if terms.internal {
        let pop = counts.in_population();
        if pop == 0 {
            return Err(SimError::EmptyPopulation);
        }
        p += beta * f64::from(counts.infectious()) / f64::from(pop);
    }
    if vaccinated {
        p *= alpha;
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Bernoulli draw that consumes no randomness for certain outcomes.
pub(crate) fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.random::<f64>() < p
    }
}

/// Moves `id` into Exposed on `day` with a freshly drawn infection record.
/// Draw order: symptomatic flag, self-isolation propensity, viral profile.
pub fn infect<R: Rng + ?Sized>(
    population: &mut Population,
    id: AgentId,
    day: u32,
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<(), SimError> {
    let symptomatic = bernoulli(rng, config.fraction_symptomatic);
    let self_isolates = bernoulli(rng, config.self_isolation_on_symptoms_prob);
    let profile = ViralLoadProfile::sample(config, symptomatic, rng)?;
    let agent = population.agent_mut(id);
    agent.symptomatic_assignment = symptomatic;
    agent.will_self_isolate_on_symptoms = self_isolates;
    agent.self_isolation_triggered = false;
    agent.viral_profile = Some(profile);
    agent.exposure_day = Some(day);
    agent.recovery_day = None;
    population.move_to(id, Compartment::Exposed);
    Ok(())
}

fn expose_susceptibles<R: Rng + ?Sized>(
    population: &mut Population,
    p_unvaccinated: f64,
    p_vaccinated: f64,
    day: u32,
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Vec<AgentId>, SimError> {
    let mut exposed = Vec::new();
    if p_unvaccinated <= 0.0 && p_vaccinated <= 0.0 {
        return Ok(exposed);
    }
    for agent in population.agents() {
        let p = match agent.compartment {
            Compartment::SusceptibleUnvaccinated => p_unvaccinated,
            Compartment::SusceptibleVaccinated => p_vaccinated,
            _ => continue,
        };
        if bernoulli(rng, p) {
            exposed.push(agent.id);
        }
    }
    for &id in &exposed {
        infect(population, id, day, config, rng)?;
    }
    Ok(exposed)
}

/// Stage 1: exposure from outside the population (the γ term).
pub fn external_exposure_step<R: Rng + ?Sized>(
    population: &mut Population,
    day: u32,
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Vec<AgentId>, SimError> {
    let counts = PopulationCounts::from(population.counts());
    let beta = config.beta_daily;
    let gamma = config.external_exposure_prob_daily;
    let alpha = config.vaccine_infection_prob;
    let p_u = exposure_probability(&counts, beta, gamma, alpha, false, ExposureTerms::EXTERNAL)?;
    let p_v = exposure_probability(&counts, beta, gamma, alpha, true, ExposureTerms::EXTERNAL)?;
    expose_susceptibles(population, p_u, p_v, day, config, rng)
}

/// Stage 5: mass-action exposure inside the population (the β·I/P term),
/// with `I` and `P` snapshotted before any of today's stage-5 exposures.
pub fn internal_propagation_step<R: Rng + ?Sized>(
    population: &mut Population,
    day: u32,
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Vec<AgentId>, SimError> {
    let counts = PopulationCounts::from(population.counts());
    if counts.infectious() == 0 || counts.in_population() == 0 {
        return Ok(Vec::new());
    }
    let beta = config.beta_daily;
    let gamma = config.external_exposure_prob_daily;
    let alpha = config.vaccine_infection_prob;
    let p_u = exposure_probability(&counts, beta, gamma, alpha, false, ExposureTerms::INTERNAL)?;
    let p_v = exposure_probability(&counts, beta, gamma, alpha, true, ExposureTerms::INTERNAL)?;
    expose_susceptibles(population, p_u, p_v, day, config, rng)
}
