//! Hinge-shaped within-host viral load trajectories.
//!
//! A trajectory rises from `(t0, V0)` to the peak `(t0 + tP, VP)` and then
//! declines to `(end, VF)`, where `end = t0 + tP + tF` for asymptomatic
//! agents and `t0 + tP + tS + tF` for symptomatic ones. Between control
//! points the load is interpolated linearly in log10 space; outside
//! `[t0, end]` it is zero.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViralLoadProfile {
    pub t0: f64,
    pub v0: f64,
    pub t_p: f64,
    pub v_p: f64,
    /// Delay from peak to symptom onset; `None` for asymptomatic agents.
    pub t_s: Option<f64>,
    pub t_f: f64,
    pub v_f: f64,
    pub symptomatic: bool,
}

/// Disease phase at a given time since exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfectionPhase {
    Latent,
    Infectious,
    Recovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViralStatus {
    pub phase: InfectionPhase,
    pub symptomatic_now: bool,
}

impl ViralLoadProfile {
    /// Draws a profile. Sampling order is t0, V0, tP, VP, tS (symptomatic
    /// only), tF, VF.
    pub fn sample<R: Rng + ?Sized>(
        config: &ScenarioConfig,
        symptomatic: bool,
        rng: &mut R,
    ) -> Result<Self, SimError> {
        let t0 = config.t0.sample(rng)?;
        let v0 = config.v0.sample(rng)?;
        let t_p = config.t_p.sample(rng)?;
        let v_p = config.v_p.sample(rng)?;
        let t_s = if symptomatic { Some(config.t_s.sample(rng)?) } else { None };
        let t_f = config.t_f.sample(rng)?;
        let v_f = config.v_f.sample(rng)?;
        Ok(ViralLoadProfile { t0, v0, t_p, v_p, t_s, t_f, v_f, symptomatic })
    }

    pub fn peak_time(&self) -> f64 {
        self.t0 + self.t_p
    }

    pub fn end_time(&self) -> f64 {
        self.peak_time() + self.t_s.unwrap_or(0.0) + self.t_f
    }

    pub fn symptom_onset_time(&self) -> Option<f64> {
        if self.symptomatic {
            Some(self.peak_time() + self.t_s.unwrap_or(0.0))
        } else {
            None
        }
    }

    /// Viral load (cp/ml) `tau` days after exposure.
    pub fn load_at(&self, tau: f64) -> f64 {
        let peak = self.peak_time();
        let end = self.end_time();
        if tau < self.t0 || tau > end {
            return 0.0;
        }
        // exact at knots; avoids pow/log round-off
        if tau == self.t0 {
            return self.v0;
        }
        if tau == peak {
            return self.v_p;
        }
        if tau == end {
            return self.v_f;
        }
        let (ta, va, tb, vb) = if tau < peak {
            (self.t0, self.v0, peak, self.v_p)
        } else {
            (peak, self.v_p, end, self.v_f)
        };
        let frac = (tau - ta) / (tb - ta);
        let log_v = va.log10() + frac * (vb.log10() - va.log10());
        10f64.powf(log_v)
    }

    pub fn is_symptomatic_at(&self, tau: f64) -> bool {
        match self.symptom_onset_time() {
            Some(onset) => onset <= tau && tau <= self.end_time(),
            None => false,
        }
    }

    /// Phase and symptom state at `tau`, with infectiousness cut `v_i`.
    pub fn status_at(&self, tau: f64, v_i: f64) -> ViralStatus {
        let load = self.load_at(tau);
        let phase = if tau > self.end_time() {
            InfectionPhase::Recovered
        } else if load > v_i {
            InfectionPhase::Infectious
        } else if tau >= self.peak_time() {
            InfectionPhase::Recovered
        } else {
            InfectionPhase::Latent
        };
        ViralStatus { phase, symptomatic_now: self.is_symptomatic_at(tau) }
    }
}
