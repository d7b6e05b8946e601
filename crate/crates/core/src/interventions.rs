//! Isolation (test-driven and symptom-driven), isolation exit, waning
//! immunity and daily vaccination.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, Compartment, Population};
use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::transmission::bernoulli;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsolationKind {
    Healthy,
    Sick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolationRecord {
    pub agent: AgentId,
    pub entry_day: u32,
    pub scheduled_exit_day: u32,
    pub kind: IsolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VaccineSupply {
    pub per_day: u32,
    pub administered_today: u32,
}

impl VaccineSupply {
    pub fn new(per_day: u32) -> Self {
        VaccineSupply { per_day, administered_today: 0 }
    }
}

fn isolate(population: &mut Population, id: AgentId, day: u32, config: &ScenarioConfig, kind: IsolationKind) -> IsolationRecord {
    let exit = day + config.isolation_length;
    let agent = population.agent_mut(id);
    agent.isolation_entry_day = Some(day);
    agent.scheduled_isolation_exit_day = Some(exit);
    let to = match kind {
        IsolationKind::Healthy => Compartment::IsolatedHealthy,
        IsolationKind::Sick => Compartment::IsolatedSick,
    };
    population.move_to(id, to);
    IsolationRecord { agent: id, entry_day: day, scheduled_exit_day: exit, kind }
}

/// Applies a positive result delivered on `day`, classifying the agent by
/// its state on that day. Recovered agents stay where they are.
pub fn apply_positive_result(
    population: &mut Population,
    id: AgentId,
    day: u32,
    config: &ScenarioConfig,
) -> Result<Option<IsolationRecord>, SimError> {
    let compartment = population.agent(id).compartment;
    if compartment.is_isolated() {
        return Err(SimError::Inconsistency {
            day,
            message: format!("positive result applied to agent {id} already in {compartment:?}"),
        });
    }
    let kind = if compartment.is_susceptible() {
        IsolationKind::Healthy
    } else if compartment.is_infected() {
        IsolationKind::Sick
    } else {
        return Ok(None);
    };
    Ok(Some(isolate(population, id, day, config, kind)))
}

/// Moves agents whose symptoms start today and who are inclined to
/// self-isolate into sick isolation. The decision is taken once per
/// infection, at the first symptomatic day.
pub fn self_isolation_step(population: &mut Population, day: u32, config: &ScenarioConfig) -> Vec<AgentId> {
    let mut isolated = Vec::new();
    for id in 0..population.len() {
        let agent = population.agent(id);
        if agent.self_isolation_triggered {
            continue;
        }
        let symptomatic_now = match (&agent.viral_profile, agent.time_since_exposure(day)) {
            (Some(p), Some(tau)) => p.is_symptomatic_at(tau),
            _ => false,
        };
        if !symptomatic_now {
            continue;
        }
        let goes = agent.will_self_isolate_on_symptoms && !agent.compartment.is_isolated();
        population.agent_mut(id).self_isolation_triggered = true;
        if goes {
            isolate(population, id, day, config, IsolationKind::Sick);
            isolated.push(id);
        }
    }
    isolated
}

/// Releases agents whose isolation period is over. Sick isolation always
/// ends in Recovered; healthy isolation returns the agent to the susceptible
/// compartment matching its vaccination flag. Nobody leaves on the day they
/// entered.
pub fn isolation_exit_step(population: &mut Population, day: u32) -> Vec<(AgentId, Compartment)> {
    let mut moves = Vec::new();
    for id in 0..population.len() {
        let agent = population.agent(id);
        if !agent.compartment.is_isolated() {
            continue;
        }
        let due = matches!(agent.scheduled_isolation_exit_day, Some(exit) if day >= exit)
            && matches!(agent.isolation_entry_day, Some(entry) if day > entry);
        if !due {
            continue;
        }
        let to = match agent.compartment {
            Compartment::IsolatedSick => Compartment::Recovered,
            _ => Compartment::susceptible(agent.vaccinated),
        };
        let agent = population.agent_mut(id);
        agent.isolation_exit_day = Some(day);
        agent.isolation_entry_day = None;
        agent.scheduled_isolation_exit_day = None;
        if to == Compartment::Recovered {
            agent.recovery_day = Some(day);
        }
        population.move_to(id, to);
        moves.push((id, to));
    }
    moves
}

/// Returns recovered agents to susceptibility after `daysTilSusceptible`.
pub fn recovered_to_susceptible_step(
    population: &mut Population,
    day: u32,
    config: &ScenarioConfig,
) -> Vec<AgentId> {
    let mut returned = Vec::new();
    for id in 0..population.len() {
        let agent = population.agent(id);
        if agent.compartment != Compartment::Recovered {
            continue;
        }
        let Some(recovered) = agent.recovery_day else { continue };
        if day.saturating_sub(recovered) < config.days_til_susceptible {
            continue;
        }
        let to = Compartment::susceptible(agent.vaccinated);
        population.agent_mut(id).clear_infection();
        population.move_to(id, to);
        returned.push(id);
    }
    returned
}

/// Marks each eligible agent willing with its own probability, then
/// vaccinates a uniform random subset of the willing, limited by supply.
pub fn vaccination_step<R: Rng + ?Sized>(
    population: &mut Population,
    supply: &mut VaccineSupply,
    rng: &mut R,
) -> Vec<AgentId> {
    supply.administered_today = 0;
    if supply.per_day == 0 {
        return Vec::new();
    }
    let willing: Vec<AgentId> = (0..population.len())
        .filter(|&id| {
            let a = population.agent(id);
            !a.vaccinated && !a.compartment.is_isolated()
        })
        .filter(|&id| bernoulli(rng, population.agent(id).willingness_to_vaccinate))
        .collect();
    let doses = (supply.per_day as usize).min(willing.len());
    let mut chosen: Vec<AgentId> = if doses == willing.len() {
        willing
    } else {
        index::sample(rng, willing.len(), doses).into_iter().map(|i| willing[i]).collect()
    };
    chosen.sort_unstable();
    for &id in &chosen {
        population.agent_mut(id).vaccinated = true;
        if population.agent(id).compartment == Compartment::SusceptibleUnvaccinated {
            population.move_to(id, Compartment::SusceptibleVaccinated);
        }
    }
    supply.administered_today = chosen.len() as u32;
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::Agent;
    use crate::rng::RngStream;
    use crate::viral_load::ViralLoadProfile;

    fn population(n: usize) -> Population {
        Population::new((0..n).map(|i| Agent::new(i, 0.7)).collect())
    }

    fn symptomatic_profile() -> ViralLoadProfile {
        // onset at 3 + 2 + 1 = 6, end 12.5
        ViralLoadProfile { t0: 3.0, v0: 1e3, t_p: 2.0, v_p: 1e5, t_s: Some(1.0), t_f: 6.5, v_f: 1e3, symptomatic: true }
    }

    #[test]
    fn positive_result_routes_by_state() {
        let cfg = ScenarioConfig::default();
        let mut pop = population(3);
        pop.move_to(0, Compartment::InfectiousSymptomatic);
        pop.move_to(2, Compartment::Recovered);

        let rec = apply_positive_result(&mut pop, 0, 5, &cfg).unwrap().unwrap();
        assert_eq!(rec.kind, IsolationKind::Sick);
        assert_eq!(rec.scheduled_exit_day, 15);
        assert_eq!(pop.agent(0).compartment, Compartment::IsolatedSick);

        let rec = apply_positive_result(&mut pop, 1, 5, &cfg).unwrap().unwrap();
        assert_eq!(rec.kind, IsolationKind::Healthy);
        assert_eq!(pop.agent(1).compartment, Compartment::IsolatedHealthy);

        let before = pop.counts();
        assert!(apply_positive_result(&mut pop, 2, 5, &cfg).unwrap().is_none());
        assert_eq!(pop.counts(), before);

        assert!(apply_positive_result(&mut pop, 0, 6, &cfg).is_err());
    }

    #[test]
    fn sick_isolation_ends_in_recovered_after_length() {
        let cfg = ScenarioConfig::default();
        let mut pop = population(1);
        pop.move_to(0, Compartment::Exposed);
        apply_positive_result(&mut pop, 0, 5, &cfg).unwrap();
        for day in 6..15 {
            assert!(isolation_exit_step(&mut pop, day).is_empty());
        }
        assert_eq!(isolation_exit_step(&mut pop, 15), vec![(0, Compartment::Recovered)]);
        let a = pop.agent(0);
        assert_eq!(a.recovery_day, Some(15));
        assert_eq!(a.isolation_exit_day, Some(15));
    }

    #[test]
    fn healthy_isolation_returns_to_matching_susceptible() {
        let cfg = ScenarioConfig::default();
        let mut pop = population(2);
        pop.agent_mut(1).vaccinated = true;
        pop.move_to(1, Compartment::SusceptibleVaccinated);
        apply_positive_result(&mut pop, 0, 1, &cfg).unwrap();
        apply_positive_result(&mut pop, 1, 1, &cfg).unwrap();
        let moves = isolation_exit_step(&mut pop, 11);
        assert_eq!(
            moves,
            vec![(0, Compartment::SusceptibleUnvaccinated), (1, Compartment::SusceptibleVaccinated)]
        );
    }

    #[test]
    fn zero_length_isolation_exits_next_day() {
        let cfg = ScenarioConfig { isolation_length: 0, ..Default::default() };
        let mut pop = population(1);
        apply_positive_result(&mut pop, 0, 5, &cfg).unwrap();
        assert!(isolation_exit_step(&mut pop, 5).is_empty());
        assert_eq!(isolation_exit_step(&mut pop, 6).len(), 1);
    }

    fn symptomatic_agent(pop: &mut Population, id: AgentId, will: bool, symptomatic: bool) {
        let a = pop.agent_mut(id);
        a.exposure_day = Some(0);
        let mut p = symptomatic_profile();
        if !symptomatic {
            p.symptomatic = false;
            p.t_s = None;
        }
        a.viral_profile = Some(p);
        a.symptomatic_assignment = symptomatic;
        a.will_self_isolate_on_symptoms = will;
        pop.move_to(id, Compartment::InfectiousSymptomatic);
    }

    #[test]
    fn self_isolation_on_first_symptomatic_day() {
        let cfg = ScenarioConfig::default();
        let mut pop = population(3);
        symptomatic_agent(&mut pop, 0, true, true);
        symptomatic_agent(&mut pop, 1, false, true);
        symptomatic_agent(&mut pop, 2, true, false);
        assert!(self_isolation_step(&mut pop, 5, &cfg).is_empty());
        assert_eq!(self_isolation_step(&mut pop, 6, &cfg), vec![0]);
        assert_eq!(pop.agent(0).compartment, Compartment::IsolatedSick);
        assert_eq!(pop.agent(0).scheduled_isolation_exit_day, Some(16));
        for day in 7..20 {
            assert!(self_isolation_step(&mut pop, day, &cfg).is_empty());
        }
        assert!(pop.agent(1).self_isolation_triggered);
        assert!(!pop.agent(2).self_isolation_triggered);
    }

    #[test]
    fn waning_immunity_after_configured_days() {
        let cfg = ScenarioConfig::default();
        let mut pop = population(2);
        for id in 0..2 {
            pop.agent_mut(id).recovery_day = Some(20);
            pop.agent_mut(id).viral_profile = Some(symptomatic_profile());
            pop.move_to(id, Compartment::Recovered);
        }
        pop.agent_mut(1).vaccinated = true;
        assert!(recovered_to_susceptible_step(&mut pop, 49, &cfg).is_empty());
        assert_eq!(recovered_to_susceptible_step(&mut pop, 50, &cfg), vec![0, 1]);
        assert_eq!(pop.agent(0).compartment, Compartment::SusceptibleUnvaccinated);
        assert_eq!(pop.agent(1).compartment, Compartment::SusceptibleVaccinated);
        assert!(pop.agent(0).viral_profile.is_none());
    }

    #[test]
    fn no_supply_no_vaccination() {
        let mut pop = population(100);
        let mut rng = RngStream::new(0, 0);
        let mut supply = VaccineSupply::new(0);
        assert!(vaccination_step(&mut pop, &mut supply, &mut rng).is_empty());
    }

    #[test]
    fn supply_limited_vaccination() {
        let mut pop = population(5000);
        let mut rng = RngStream::new(0, 1);
        let mut supply = VaccineSupply::new(50);
        let done = vaccination_step(&mut pop, &mut supply, &mut rng);
        assert_eq!(done.len(), 50);
        assert_eq!(supply.administered_today, 50);
        assert_eq!(pop.counts().get(Compartment::SusceptibleVaccinated), 50);
    }

    #[test]
    fn demand_limited_vaccination() {
        let mut agents: Vec<Agent> = (0..100).map(|i| Agent::new(i, 0.0)).collect();
        for a in agents.iter_mut().take(10) {
            a.willingness_to_vaccinate = 1.0;
        }
        let mut pop = Population::new(agents);
        pop.move_to(3, Compartment::Recovered);
        let mut rng = RngStream::new(0, 2);
        let mut supply = VaccineSupply::new(50);
        let done = vaccination_step(&mut pop, &mut supply, &mut rng);
        assert_eq!(done, (0..10).collect::<Vec<_>>());
        // non-susceptible agents are flagged without moving
        assert_eq!(pop.agent(3).compartment, Compartment::Recovered);
        assert!(pop.agent(3).vaccinated);
        assert_eq!(pop.counts().get(Compartment::SusceptibleVaccinated), 9);
    }

    #[test]
    fn isolated_and_vaccinated_agents_are_skipped() {
        let mut agents: Vec<Agent> = (0..3).map(|i| Agent::new(i, 1.0)).collect();
        agents[0].vaccinated = true;
        let mut pop = Population::new(agents);
        pop.move_to(1, Compartment::IsolatedHealthy);
        let mut rng = RngStream::new(0, 3);
        let mut supply = VaccineSupply::new(10);
        assert_eq!(vaccination_step(&mut pop, &mut supply, &mut rng), vec![2]);
    }
}
