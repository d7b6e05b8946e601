//! Seedable, discrete-time agent-based epidemic simulation.
//!
//! Agents move through susceptible (unvaccinated/vaccinated), exposed,
//! infectious (symptomatic/asymptomatic), recovered and two isolation
//! compartments. Disease progression follows per-agent hinge viral-load
//! trajectories; interventions are periodic single or two-stage pooled
//! testing with delayed results, test- and symptom-driven isolation, and
//! daily vaccination.
//!
//! Replicates run in parallel through rayon when the default `parallel`
//! feature is enabled; results never depend on scheduling.

pub mod agent;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod interventions;
pub mod output;
pub mod rng;
pub mod sweep;
pub mod testing;
pub mod transmission;
pub mod viral_load;

pub use agent::{Agent, AgentId, Compartment, CompartmentCounts, Population};
pub use config::{DistributionSpec, PoolingType, ScenarioConfig, TestKind, VaccinationScenario, ValidationReport};
pub use engine::{run, run_replicates, DailyRecord, Execution, ReplicateSet, RunOutput, RunSummary};
pub use error::SimError;
pub use rng::RngStream;
pub use viral_load::ViralLoadProfile;
