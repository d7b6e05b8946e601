//! Transmission-rate calibration: expected infectious duration, the
//! effective reproduction number series of a run, and β for a target R₀.

use serde::{Deserialize, Serialize};

use crate::config::{DistributionSpec, ScenarioConfig};
use crate::engine::DailyRecord;
use crate::error::SimError;

/// Susceptible-fraction threshold that defines the early window.
pub const EARLY_WINDOW_SUSCEPTIBLE_FRACTION: f64 = 0.9;
/// Minimum previous-day infectious count inside the early window.
pub const EARLY_WINDOW_MIN_INFECTIOUS: u32 = 20;

fn mean_of(field: &'static str, dist: &DistributionSpec) -> Result<f64, SimError> {
    dist.analytic_mean().ok_or_else(|| SimError::UnsupportedDistribution {
        field,
        reason: format!("{dist} has no closed-form mean"),
    })
}

/// `E[t0] + E[tP] + E[tF] + σ_s·E[tS]`.
pub fn expected_infectious_duration(config: &ScenarioConfig) -> Result<f64, SimError> {
    Ok(mean_of("t0", &config.t0)?
        + mean_of("tP", &config.t_p)?
        + mean_of("tF", &config.t_f)?
        + config.fraction_symptomatic * mean_of("tS", &config.t_s)?)
}

/// β that gives `target_r0` when the population is almost fully susceptible.
pub fn estimate_beta(target_r0: f64, config: &ScenarioConfig) -> Result<f64, SimError> {
    if !(target_r0 > 0.0 && target_r0.is_finite()) {
        return Err(SimError::NonPositiveTarget(target_r0));
    }
    let tau = expected_infectious_duration(config)?;
    if tau <= 0.0 {
        return Err(SimError::Degenerate(format!("expected infectious duration is {tau}")));
    }
    Ok(target_r0 / tau)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionPoint {
    pub day: u32,
    /// `None` when the previous day had no infectious agents.
    pub r_t: Option<f64>,
    /// Previous-day `S_u / P`.
    pub susceptible_fraction: f64,
    pub prev_infectious: u32,
    pub early_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionSeries {
    pub tau_i: f64,
    pub points: Vec<ReproductionPoint>,
}

impl ReproductionSeries {
    /// Mean `R_t` over early-window days, if there are any.
    pub fn early_window_mean(&self) -> Option<f64> {
        let vals: Vec<f64> = self.points.iter().filter(|p| p.early_window).filter_map(|p| p.r_t).collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}

/// Mean `R_t` over the early-window days of all `series` pooled together.
pub fn pooled_early_window_mean(series: &[ReproductionSeries]) -> Option<f64> {
    let vals: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.early_window)
        .filter_map(|p| p.r_t)
        .collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// `R_t = E'_i(t) / I(t-1) · τ_I` for every day after the first record.
pub fn effective_r_series(records: &[DailyRecord], tau_i: f64) -> ReproductionSeries {
    let points = records
        .windows(2)
        .map(|w| {
            let (prev, cur) = (&w[0], &w[1]);
            let prev_i = prev.infectious();
            let pop = prev.in_population();
            let s_u = prev.counts.get(crate::agent::Compartment::SusceptibleUnvaccinated);
            let susceptible_fraction = if pop == 0 { 0.0 } else { f64::from(s_u) / f64::from(pop) };
            let r_t = (prev_i > 0).then(|| f64::from(cur.new_exposures_internal) / f64::from(prev_i) * tau_i);
            ReproductionPoint {
                day: cur.day,
                r_t,
                susceptible_fraction,
                prev_infectious: prev_i,
                early_window: susceptible_fraction > EARLY_WINDOW_SUSCEPTIBLE_FRACTION
                    && prev_i >= EARLY_WINDOW_MIN_INFECTIOUS,
            }
        })
        .collect();
    ReproductionSeries { tau_i, points }
}
