//! Agents, compartments and the population container.

use serde::{Deserialize, Serialize};

use crate::viral_load::ViralLoadProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Compartment {
    SusceptibleUnvaccinated,
    SusceptibleVaccinated,
    Exposed,
    InfectiousSymptomatic,
    InfectiousAsymptomatic,
    Recovered,
    IsolatedHealthy,
    IsolatedSick,
}

impl Compartment {
    pub const ALL: [Compartment; 8] = [
        Compartment::SusceptibleUnvaccinated,
        Compartment::SusceptibleVaccinated,
        Compartment::Exposed,
        Compartment::InfectiousSymptomatic,
        Compartment::InfectiousAsymptomatic,
        Compartment::Recovered,
        Compartment::IsolatedHealthy,
        Compartment::IsolatedSick,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// Short column name used in CSV output.
    pub const fn short_name(self) -> &'static str {
        match self {
            Compartment::SusceptibleUnvaccinated => "s_u",
            Compartment::SusceptibleVaccinated => "s_v",
            Compartment::Exposed => "e",
            Compartment::InfectiousSymptomatic => "i_s",
            Compartment::InfectiousAsymptomatic => "i_a",
            Compartment::Recovered => "r",
            Compartment::IsolatedHealthy => "iso_healthy",
            Compartment::IsolatedSick => "iso_sick",
        }
    }

    pub const fn is_isolated(self) -> bool {
        matches!(self, Compartment::IsolatedHealthy | Compartment::IsolatedSick)
    }

    pub const fn is_susceptible(self) -> bool {
        matches!(self, Compartment::SusceptibleUnvaccinated | Compartment::SusceptibleVaccinated)
    }

    pub const fn is_infectious(self) -> bool {
        matches!(self, Compartment::InfectiousSymptomatic | Compartment::InfectiousAsymptomatic)
    }

    /// Exposed or infectious.
    pub const fn is_infected(self) -> bool {
        matches!(self, Compartment::Exposed) || self.is_infectious()
    }

    /// Susceptible compartment matching a vaccination flag.
    pub const fn susceptible(vaccinated: bool) -> Compartment {
        if vaccinated {
            Compartment::SusceptibleVaccinated
        } else {
            Compartment::SusceptibleUnvaccinated
        }
    }
}

pub type AgentId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: AgentId,
    pub compartment: Compartment,
    pub vaccinated: bool,
    /// Daily probability of being willing to vaccinate, in `[0, 1]`.
    pub willingness_to_vaccinate: f64,
    /// Drawn once per exposure.
    pub will_self_isolate_on_symptoms: bool,
    pub viral_profile: Option<ViralLoadProfile>,
    pub exposure_day: Option<u32>,
    pub recovery_day: Option<u32>,
    pub isolation_entry_day: Option<u32>,
    pub scheduled_isolation_exit_day: Option<u32>,
    /// Day the agent last left isolation.
    pub isolation_exit_day: Option<u32>,
    pub symptomatic_assignment: bool,
    pub self_isolation_triggered: bool,
}

impl Agent {
    pub fn new(id: AgentId, willingness_to_vaccinate: f64) -> Self {
        Agent {
            id,
            compartment: Compartment::SusceptibleUnvaccinated,
            vaccinated: false,
            willingness_to_vaccinate,
            will_self_isolate_on_symptoms: false,
            viral_profile: None,
            exposure_day: None,
            recovery_day: None,
            isolation_entry_day: None,
            scheduled_isolation_exit_day: None,
            isolation_exit_day: None,
            symptomatic_assignment: false,
            self_isolation_triggered: false,
        }
    }

    /// Days since exposure on `day`, if the agent carries an infection record.
    pub fn time_since_exposure(&self, day: u32) -> Option<f64> {
        self.exposure_day.map(|e| f64::from(day.saturating_sub(e)))
    }

    /// Current viral load; zero without an infection record.
    pub fn viral_load(&self, day: u32) -> f64 {
        match (&self.viral_profile, self.time_since_exposure(day)) {
            (Some(p), Some(tau)) => p.load_at(tau),
            _ => 0.0,
        }
    }

    /// Drops the infection record when the agent becomes susceptible again.
    pub fn clear_infection(&mut self) {
        self.viral_profile = None;
        self.exposure_day = None;
        self.recovery_day = None;
        self.symptomatic_assignment = false;
        self.self_isolation_triggered = false;
        self.will_self_isolate_on_symptoms = false;
    }
}

/// Per-compartment head counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompartmentCounts(pub [u32; 8]);

impl CompartmentCounts {
    pub fn get(&self, c: Compartment) -> u32 {
        self.0[c.index()]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Agents not in isolation (`P`).
    pub fn in_population(&self) -> u32 {
        self.total()
            - self.get(Compartment::IsolatedHealthy)
            - self.get(Compartment::IsolatedSick)
    }

    pub fn infectious(&self) -> u32 {
        self.get(Compartment::InfectiousSymptomatic) + self.get(Compartment::InfectiousAsymptomatic)
    }
}

/// All agents of one run, with compartment counts kept in sync.
#[derive(Debug, Clone)]
pub struct Population {
    agents: Vec<Agent>,
    counts: CompartmentCounts,
}

impl Population {
    pub fn new(agents: Vec<Agent>) -> Self {
        let counts = Self::tally(&agents);
        Population { agents, counts }
    }

    fn tally(agents: &[Agent]) -> CompartmentCounts {
        let mut counts = CompartmentCounts::default();
        for a in agents {
            counts.0[a.compartment.index()] += 1;
        }
        counts
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, id: AgentId) -> &Agent {
        &self.agents[id]
    }

    /// Mutable access for non-compartment fields. Compartment changes must
    /// go through [`Population::move_to`].
    pub fn agent_mut(&mut self, id: AgentId) -> &mut Agent {
        &mut self.agents[id]
    }

    pub fn counts(&self) -> CompartmentCounts {
        self.counts
    }

    pub fn move_to(&mut self, id: AgentId, to: Compartment) {
        let from = self.agents[id].compartment;
        self.counts.0[from.index()] -= 1;
        self.counts.0[to.index()] += 1;
        self.agents[id].compartment = to;
    }

    /// Recounts from scratch and compares with the running tally.
    pub fn recount_matches(&self) -> bool {
        Self::tally(&self.agents) == self.counts && self.counts.total() as usize == self.len()
    }

    pub fn ids_in(&self, c: Compartment) -> impl Iterator<Item = AgentId> + '_ {
        self.agents.iter().filter(move |a| a.compartment == c).map(|a| a.id)
    }

    pub fn vaccinated_total(&self) -> u32 {
        self.agents.iter().filter(|a| a.vaccinated).count() as u32
    }
}
