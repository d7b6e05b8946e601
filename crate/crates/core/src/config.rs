//! Scenario configuration, distribution descriptors and validation.
//!
//! Field names on the wire are the camelCase parameter identifiers used in
//! config files (`popSize`, `betaDaily`, `t0`, ...). Any field missing from a
//! file takes its default value, so a config file only needs to list what it
//! changes.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// A one-dimensional distribution used for sampled model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase", from = "DistributionRepr")]
pub enum DistributionSpec {
    Constant { value: f64 },
    Uniform { low: f64, high: f64 },
    /// `Gamma(shape, scale) + shift`.
    GammaShifted { shape: f64, scale: f64, shift: f64 },
    /// Normal draw clamped into `[low, high]`.
    NormalClipped { mean: f64, std: f64, low: f64, high: f64 },
}

// Accepts a bare number as shorthand for a constant.
#[derive(Deserialize)]
#[serde(untagged)]
enum DistributionRepr {
    Bare(f64),
    Tagged(TaggedDistribution),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "camelCase", deny_unknown_fields)]
enum TaggedDistribution {
    Constant { value: f64 },
    Uniform { low: f64, high: f64 },
    GammaShifted { shape: f64, scale: f64, shift: f64 },
    NormalClipped { mean: f64, std: f64, low: f64, high: f64 },
}

impl From<DistributionRepr> for DistributionSpec {
    fn from(repr: DistributionRepr) -> Self {
        match repr {
            DistributionRepr::Bare(value) => DistributionSpec::Constant { value },
            DistributionRepr::Tagged(t) => match t {
                TaggedDistribution::Constant { value } => DistributionSpec::Constant { value },
                TaggedDistribution::Uniform { low, high } => DistributionSpec::Uniform { low, high },
                TaggedDistribution::GammaShifted { shape, scale, shift } => {
                    DistributionSpec::GammaShifted { shape, scale, shift }
                }
                TaggedDistribution::NormalClipped { mean, std, low, high } => {
                    DistributionSpec::NormalClipped { mean, std, low, high }
                }
            },
        }
    }
}

impl DistributionSpec {
    pub const fn constant(value: f64) -> Self {
        DistributionSpec::Constant { value }
    }

    pub const fn uniform(low: f64, high: f64) -> Self {
        DistributionSpec::Uniform { low, high }
    }

    pub const fn gamma_shifted(shape: f64, scale: f64, shift: f64) -> Self {
        DistributionSpec::GammaShifted { shape, scale, shift }
    }

    pub const fn normal_clipped(mean: f64, std: f64, low: f64, high: f64) -> Self {
        DistributionSpec::NormalClipped { mean, std, low, high }
    }

    /// Returns a description of the first violated parameter constraint.
    pub fn check(&self) -> Result<(), String> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            DistributionSpec::Constant { value } if !value.is_finite() => {
                Err("constant value must be finite".into())
            }
            DistributionSpec::Uniform { low, high } if !finite(&[low, high]) || low > high => {
                Err(format!("uniform requires low <= high (got {low}, {high})"))
            }
            DistributionSpec::GammaShifted { shape, scale, shift }
                if !finite(&[shape, scale, shift]) || shape <= 0.0 || scale <= 0.0 =>
            {
                Err(format!("gamma requires shape > 0 and scale > 0 (got {shape}, {scale})"))
            }
            DistributionSpec::NormalClipped { mean, std, low, high }
                if !finite(&[mean, std, low, high]) || std < 0.0 || low > high =>
            {
                Err(format!(
                    "normalClipped requires std >= 0 and low <= high (got std {std}, [{low}, {high}])"
                ))
            }
            _ => Ok(()),
        }
    }

    /// Smallest value the distribution can produce.
    pub fn support_min(&self) -> f64 {
        match *self {
            DistributionSpec::Constant { value } => value,
            DistributionSpec::Uniform { low, .. } => low,
            DistributionSpec::GammaShifted { shift, .. } => shift,
            DistributionSpec::NormalClipped { low, .. } => low,
        }
    }

    /// Largest value the distribution can produce.
    pub fn support_max(&self) -> f64 {
        match *self {
            DistributionSpec::Constant { value } => value,
            DistributionSpec::Uniform { high, .. } => high,
            DistributionSpec::GammaShifted { .. } => f64::INFINITY,
            DistributionSpec::NormalClipped { high, .. } => high,
        }
    }

    /// Closed-form mean, where one exists. Clipping a normal has no simple
    /// closed form, so `NormalClipped` yields `None`.
    pub fn analytic_mean(&self) -> Option<f64> {
        match *self {
            DistributionSpec::Constant { value } => Some(value),
            DistributionSpec::Uniform { low, high } => Some(0.5 * (low + high)),
            DistributionSpec::GammaShifted { shape, scale, shift } => Some(shape * scale + shift),
            DistributionSpec::NormalClipped { .. } => None,
        }
    }

    /// Draws one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, SimError> {
        self.check().map_err(SimError::InvalidDistribution)?;
        Ok(match *self {
            DistributionSpec::Constant { value } => value,
            DistributionSpec::Uniform { low, high } => {
                if low == high {
                    low
                } else {
                    rng.random_range(low..=high)
                }
            }
            DistributionSpec::GammaShifted { shape, scale, shift } => {
                let gamma = Gamma::new(shape, scale)
                    .map_err(|e| SimError::InvalidDistribution(e.to_string()))?;
                gamma.sample(rng) + shift
            }
            DistributionSpec::NormalClipped { mean, std, low, high } => {
                let normal = Normal::new(mean, std)
                    .map_err(|e| SimError::InvalidDistribution(e.to_string()))?;
                normal.sample(rng).clamp(low, high)
            }
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Constant { value } => write!(f, "{value}"),
            DistributionSpec::Uniform { low, high } => write!(f, "uniform({low}, {high})"),
            DistributionSpec::GammaShifted { shape, scale, shift } => {
                write!(f, "Gamma({shape}, {scale}) + {shift}")
            }
            DistributionSpec::NormalClipped { mean, std, low, high } => {
                write!(f, "normal({mean}, {std}) clipped to [{low}, {high}]")
            }
        }
    }
}

/// How stage-one pool outcomes are decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolingType {
    /// Pool is detectable when the mean member load exceeds the detection cut.
    Average,
    /// Pool positive probability depends on the number of detectable members.
    Exponential,
}

/// Every tunable model parameter for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    // run
    #[serde(rename = "popSize")]
    pub pop_size: u32,
    #[serde(rename = "timeHorizon")]
    pub time_horizon: u32,
    #[serde(rename = "initialInfected")]
    pub initial_infected: u32,
    #[serde(rename = "initProportionVaccinated")]
    pub init_proportion_vaccinated: f64,
    #[serde(rename = "baseSeed")]
    pub base_seed: u64,

    // disease
    #[serde(rename = "betaDaily")]
    pub beta_daily: f64,
    #[serde(rename = "daysTilSusceptible")]
    pub days_til_susceptible: u32,
    #[serde(rename = "externalExposureProbDaily")]
    pub external_exposure_prob_daily: f64,
    #[serde(rename = "fractionSymptomatic")]
    pub fraction_symptomatic: f64,
    #[serde(rename = "infectiousViralLoadCut")]
    pub infectious_viral_load_cut: f64,
    pub t0: DistributionSpec,
    #[serde(rename = "V0")]
    pub v0: DistributionSpec,
    #[serde(rename = "tP")]
    pub t_p: DistributionSpec,
    #[serde(rename = "VP")]
    pub v_p: DistributionSpec,
    #[serde(rename = "tS")]
    pub t_s: DistributionSpec,
    #[serde(rename = "tF")]
    pub t_f: DistributionSpec,
    #[serde(rename = "VF")]
    pub v_f: DistributionSpec,

    // testing
    /// 0 disables testing.
    #[serde(rename = "daysBetweenTesting")]
    pub days_between_testing: u32,
    #[serde(rename = "daysDelayTestResults")]
    pub days_delay_test_results: u32,
    #[serde(rename = "detectionCut")]
    pub detection_cut: f64,
    #[serde(rename = "firstDayOfTesting")]
    pub first_day_of_testing: u32,
    #[serde(rename = "fprSingle")]
    pub fpr_single: f64,
    #[serde(rename = "fnrSingle")]
    pub fnr_single: f64,
    #[serde(rename = "poolingType")]
    pub pooling_type: PoolingType,
    #[serde(rename = "poolSize")]
    pub pool_size: u32,
    #[serde(rename = "costPerTest")]
    pub cost_per_test: f64,

    // isolation
    #[serde(rename = "noTestingPostIsolationDays")]
    pub no_testing_post_isolation_days: u32,
    #[serde(rename = "isolationLength")]
    pub isolation_length: u32,
    #[serde(rename = "selfIsolationOnSymptomsProb")]
    pub self_isolation_on_symptoms_prob: f64,

    // vaccination
    #[serde(rename = "vaccineAcceptProbMean")]
    pub vaccine_accept_prob_mean: f64,
    #[serde(rename = "vaccineAcceptProbStd")]
    pub vaccine_accept_prob_std: f64,
    #[serde(rename = "vaccinesAvailablePerDay")]
    pub vaccines_available_per_day: u32,
    #[serde(rename = "vaccineInfectionProb")]
    pub vaccine_infection_prob: f64,
}

impl Default for ScenarioConfig {
    /// The no-intervention baseline: published defaults, no vaccination,
    /// testing disabled but parameterised as the PCR-like test A.
    fn default() -> Self {
        ScenarioConfig {
            pop_size: 10_000,
            time_horizon: 120,
            initial_infected: 200,
            init_proportion_vaccinated: 0.0,
            base_seed: 0,

            beta_daily: 0.4,
            days_til_susceptible: 30,
            external_exposure_prob_daily: 0.005,
            fraction_symptomatic: 0.5,
            infectious_viral_load_cut: 1e3,
            t0: DistributionSpec::uniform(2.5, 3.5),
            v0: DistributionSpec::constant(1e3),
            t_p: DistributionSpec::gamma_shifted(1.5, 1.0, 0.5),
            v_p: DistributionSpec::uniform(1e4, 1e7),
            t_s: DistributionSpec::uniform(0.0, 3.0),
            t_f: DistributionSpec::uniform(4.0, 9.0),
            v_f: DistributionSpec::constant(1e3),

            days_between_testing: 0,
            days_delay_test_results: TestKind::A.days_delay_test_results(),
            detection_cut: TestKind::A.detection_cut(),
            first_day_of_testing: 7,
            fpr_single: TestKind::A.fpr_single(),
            fnr_single: TestKind::A.fnr_single(),
            pooling_type: PoolingType::Average,
            pool_size: 1,
            cost_per_test: TestKind::A.cost_per_test(),

            no_testing_post_isolation_days: 0,
            isolation_length: 10,
            self_isolation_on_symptoms_prob: 0.7,

            vaccine_accept_prob_mean: 0.7,
            vaccine_accept_prob_std: 0.05,
            vaccines_available_per_day: 0,
            vaccine_infection_prob: 0.3,
        }
    }
}

/// The two test products compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    /// PCR-like: sensitive, slow.
    A,
    /// Antigen-like: less sensitive, same-day.
    B,
}

impl TestKind {
    pub fn label(self) -> &'static str {
        match self {
            TestKind::A => "A",
            TestKind::B => "B",
        }
    }

    pub fn fpr_single(self) -> f64 {
        match self {
            TestKind::A => 0.014,
            TestKind::B => 0.007,
        }
    }

    pub fn fnr_single(self) -> f64 {
        match self {
            TestKind::A => 0.06,
            TestKind::B => 0.15,
        }
    }

    pub fn detection_cut(self) -> f64 {
        match self {
            TestKind::A => 100.0,
            TestKind::B => 1.0e6,
        }
    }

    pub fn days_delay_test_results(self) -> u32 {
        match self {
            TestKind::A => 3,
            TestKind::B => 0,
        }
    }

    pub fn cost_per_test(self) -> f64 {
        match self {
            TestKind::A => 100.0,
            TestKind::B => 50.0,
        }
    }
}

/// Vaccination settings from the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VaccinationScenario {
    /// No vaccination.
    A,
    /// Rollout into an unvaccinated population.
    B,
    /// Continued rollout into a half-vaccinated population.
    C,
}

impl VaccinationScenario {
    pub fn label(self) -> &'static str {
        match self {
            VaccinationScenario::A => "A",
            VaccinationScenario::B => "B",
            VaccinationScenario::C => "C",
        }
    }

    pub fn init_proportion_vaccinated(self) -> f64 {
        match self {
            VaccinationScenario::A | VaccinationScenario::B => 0.0,
            VaccinationScenario::C => 0.5,
        }
    }

    pub fn vaccines_available_per_day(self) -> u32 {
        match self {
            VaccinationScenario::A => 0,
            VaccinationScenario::B | VaccinationScenario::C => 50,
        }
    }
}

impl ScenarioConfig {
    /// Sets every test-product parameter (rates, cut, delay, cost).
    pub fn with_test(mut self, test: TestKind) -> Self {
        self.fpr_single = test.fpr_single();
        self.fnr_single = test.fnr_single();
        self.detection_cut = test.detection_cut();
        self.days_delay_test_results = test.days_delay_test_results();
        self.cost_per_test = test.cost_per_test();
        self
    }

    pub fn with_testing(mut self, test: TestKind, pool_size: u32, interval_days: u32) -> Self {
        self = self.with_test(test);
        self.pool_size = pool_size;
        self.days_between_testing = interval_days;
        self
    }

    pub fn with_vaccination(mut self, scenario: VaccinationScenario) -> Self {
        self.init_proportion_vaccinated = scenario.init_proportion_vaccinated();
        self.vaccines_available_per_day = scenario.vaccines_available_per_day();
        self
    }

    pub fn testing_enabled(&self) -> bool {
        self.days_between_testing > 0
    }

    pub fn is_testing_day(&self, day: u32) -> bool {
        self.testing_enabled()
            && day >= self.first_day_of_testing
            && (day - self.first_day_of_testing).is_multiple_of(self.days_between_testing)
    }

    /// Distribution of per-agent willingness to vaccinate.
    pub fn vaccine_acceptance(&self) -> DistributionSpec {
        DistributionSpec::normal_clipped(
            self.vaccine_accept_prob_mean,
            self.vaccine_accept_prob_std,
            0.0,
            1.0,
        )
    }

    /// Checks every parameter constraint; see [`ValidationReport`].
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();

        let probabilities = [
            ("initProportionVaccinated", self.init_proportion_vaccinated),
            ("externalExposureProbDaily", self.external_exposure_prob_daily),
            ("fractionSymptomatic", self.fraction_symptomatic),
            ("fprSingle", self.fpr_single),
            ("fnrSingle", self.fnr_single),
            ("selfIsolationOnSymptomsProb", self.self_isolation_on_symptoms_prob),
            ("vaccineAcceptProbMean", self.vaccine_accept_prob_mean),
            ("vaccineInfectionProb", self.vaccine_infection_prob),
        ];
        for (field, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                report.push(field, format!("{field} = {p} ∉ [0,1]"));
            }
        }

        let non_negative = [
            ("betaDaily", self.beta_daily),
            ("costPerTest", self.cost_per_test),
            ("vaccineAcceptProbStd", self.vaccine_accept_prob_std),
        ];
        for (field, x) in non_negative {
            if !(x.is_finite() && x >= 0.0) {
                report.push(field, format!("{field} = {x} must be finite and ≥ 0"));
            }
        }

        let positive = [
            ("infectiousViralLoadCut", self.infectious_viral_load_cut),
            ("detectionCut", self.detection_cut),
        ];
        for (field, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                report.push(field, format!("{field} = {x} must be finite and > 0"));
            }
        }

        if self.pool_size < 1 {
            report.push("poolSize", "poolSize ≥ 1 required (got 0)".to_string());
        }
        if self.initial_infected > self.pop_size {
            report.push(
                "initialInfected",
                format!(
                    "popSize ≥ initialInfected required (got {} > {})",
                    self.initial_infected, self.pop_size
                ),
            );
        }

        let viral = [
            ("t0", &self.t0),
            ("V0", &self.v0),
            ("tP", &self.t_p),
            ("VP", &self.v_p),
            ("tS", &self.t_s),
            ("tF", &self.t_f),
            ("VF", &self.v_f),
        ];
        for (field, dist) in viral {
            if let Err(msg) = dist.check() {
                report.push(field, msg);
            }
        }
        for (field, dist) in [("t0", &self.t0), ("tP", &self.t_p), ("tF", &self.t_f)] {
            // gamma draws are strictly positive, so a zero shift is fine
            let strictly_positive = match dist {
                DistributionSpec::GammaShifted { shift, .. } => *shift >= 0.0,
                d => d.support_min() > 0.0,
            };
            if !strictly_positive {
                report.push(field, format!("{field} must be strictly positive (got {dist})"));
            }
        }
        if self.t_s.support_min() < 0.0 {
            report.push("tS", format!("tS must be ≥ 0 (got {})", self.t_s));
        }
        for (field, dist) in [("V0", &self.v0), ("VP", &self.v_p), ("VF", &self.v_f)] {
            if dist.support_min() <= 0.0 {
                report.push(field, format!("{field} must be > 0 (got {dist})"));
            }
        }
        if self.v_p.support_min() < self.v0.support_max() {
            report.push(
                "VP",
                format!("VP ≥ V0 required (VP {} may fall below V0 {})", self.v_p, self.v0),
            );
        }
        if let Err(msg) = self.vaccine_acceptance().check() {
            report.push("vaccineAcceptProbStd", msg);
        }

        report
    }

    /// Validates and converts any violations into an error.
    pub fn ensure_valid(&self) -> Result<(), SimError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(report))
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// A single failed constraint, keyed by the config field it concerns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Outcome of [`ScenarioConfig::validate`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, field: &str, message: String) {
        self.violations.push(Violation { field: field.to_string(), message });
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.violations.iter().map(|v| v.field.as_str())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn defaults_are_valid() {
        let report = ScenarioConfig::default().validate();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn probability_out_of_range_is_reported() {
        let cfg = ScenarioConfig { fpr_single: 1.5, ..Default::default() };
        let report = cfg.validate();
        assert_eq!(report.fields().collect::<Vec<_>>(), vec!["fprSingle"]);
        assert!(report.violations[0].message.contains("fprSingle"));
        assert!(report.violations[0].message.contains("∉ [0,1]"));
    }

    #[test]
    fn zero_pool_size_is_reported() {
        let cfg = ScenarioConfig { pool_size: 0, ..Default::default() };
        let report = cfg.validate();
        assert_eq!(report.fields().collect::<Vec<_>>(), vec!["poolSize"]);
        assert!(report.violations[0].message.contains("poolSize ≥ 1"));
    }

    #[test]
    fn every_violation_is_collected() {
        let cfg = ScenarioConfig {
            fpr_single: -0.1,
            pool_size: 0,
            initial_infected: 20_000,
            t0: DistributionSpec::uniform(3.0, 1.0),
            ..Default::default()
        };
        let fields: Vec<_> = cfg.validate().fields().map(str::to_owned).collect();
        for f in ["fprSingle", "poolSize", "initialInfected", "t0"] {
            assert!(fields.iter().any(|x| x == f), "missing {f} in {fields:?}");
        }
    }

    #[test]
    fn constant_samples_its_value() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(DistributionSpec::constant(1000.0).sample(&mut rng).unwrap(), 1000.0);
    }

    #[test]
    fn invalid_distribution_is_a_config_error() {
        let mut rng = RngStream::new(1, 0);
        let err = DistributionSpec::gamma_shifted(0.0, 1.0, 0.0).sample(&mut rng);
        assert!(matches!(err, Err(SimError::InvalidDistribution(_))));
    }

    #[test]
    fn degenerate_uniform_returns_bound() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(DistributionSpec::uniform(2.0, 2.0).sample(&mut rng).unwrap(), 2.0);
    }

    #[test]
    fn uniform_mean_matches_closed_form() {
        let mut rng = RngStream::new(7, 3);
        let d = DistributionSpec::uniform(2.5, 3.5);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = d.sample(&mut rng).unwrap();
            assert!((2.5..=3.5).contains(&x));
            sum += x;
        }
        let mean = sum / n as f64;
        // sd of U(2.5,3.5) is 1/sqrt(12); 3 standard errors ≈ 0.0027
        assert!((mean - 3.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn shifted_gamma_mean_matches_closed_form() {
        let mut rng = RngStream::new(7, 4);
        let d = DistributionSpec::gamma_shifted(1.5, 1.0, 0.5);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = d.sample(&mut rng).unwrap();
            assert!(x >= 0.5);
            sum += x;
        }
        let mean = sum / n as f64;
        // sd = sqrt(1.5); 3 standard errors ≈ 0.0116
        assert!((mean - 2.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn normal_clipped_stays_in_bounds() {
        let mut rng = RngStream::new(7, 5);
        let d = DistributionSpec::normal_clipped(0.9, 0.5, 0.0, 1.0);
        for _ in 0..10_000 {
            let x = d.sample(&mut rng).unwrap();
            assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn bare_numbers_parse_as_constants() {
        let cfg = ScenarioConfig::from_json(r#"{"V0": 1000, "tF": {"type": "uniform", "low": 4, "high": 9}}"#)
            .unwrap();
        assert_eq!(cfg.v0, DistributionSpec::constant(1000.0));
        assert_eq!(cfg.t_f, DistributionSpec::uniform(4.0, 9.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"popsize": 10}"#).is_err());
    }

    #[test]
    fn wire_names_match_parameter_identifiers() {
        let value: serde_json::Value =
            serde_json::from_str(&ScenarioConfig::default().to_json_pretty()).unwrap();
        let obj = value.as_object().unwrap();
        for key in [
            "popSize", "timeHorizon", "initialInfected", "initProportionVaccinated", "baseSeed",
            "betaDaily", "daysTilSusceptible", "externalExposureProbDaily", "fractionSymptomatic",
            "infectiousViralLoadCut", "t0", "V0", "tP", "VP", "tS", "tF", "VF",
            "daysBetweenTesting", "daysDelayTestResults", "detectionCut", "firstDayOfTesting",
            "fprSingle", "fnrSingle", "poolingType", "poolSize", "costPerTest",
            "noTestingPostIsolationDays", "isolationLength", "selfIsolationOnSymptomsProb",
            "vaccineAcceptProbMean", "vaccineAcceptProbStd", "vaccinesAvailablePerDay",
            "vaccineInfectionProb",
        ] {
            assert!(obj.contains_key(key), "missing {key}");
        }
        assert_eq!(obj.len(), 33);
        assert_eq!(obj["tP"]["type"], "gammaShifted");
        assert_eq!(obj["poolingType"], "average");
    }

    #[test]
    fn testing_days_follow_interval() {
        let cfg = ScenarioConfig::default().with_testing(TestKind::A, 1, 4);
        let days: Vec<u32> = (0..20).filter(|&d| cfg.is_testing_day(d)).collect();
        assert_eq!(days, vec![7, 11, 15, 19]);
        assert!(!(0..200).any(|d| ScenarioConfig::default().is_testing_day(d)));
    }
}
