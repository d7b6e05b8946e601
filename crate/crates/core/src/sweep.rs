//! Scenario grids: expanding a base config along parameter axes, running
//! every cell, and summarising cells into a comparison report.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::config::{ScenarioConfig, TestKind, ValidationReport, VaccinationScenario};
use crate::engine::{cost_per_person_per_day, run_replicates, Execution, ReplicateSet, RunSummary};
use crate::error::SimError;

pub const DEFAULT_MAX_RUNS: u64 = 100_000;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("axis `{axis}` references unknown config field `{field}`")]
    UnknownField { axis: String, field: String },

    #[error("cell `{label}` has an invalid configuration:\n{report}")]
    InvalidCell { label: String, report: ValidationReport },

    #[error("cell `{label}`: {message}")]
    MalformedCell { label: String, message: String },

    #[error("sweep needs {runs} runs, above the cap of {cap}")]
    TooManyRuns { runs: u64, cap: u64 },

    #[error("sweep needs at least one replicate per cell")]
    NoReplicates,

    #[error("duplicate scenario label `{0}`")]
    DuplicateLabel(String),

    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One value of an axis: a label and the config fields it sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisLevel {
    pub label: String,
    pub set: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "AxisRepr")]
pub struct Axis {
    pub name: String,
    pub levels: Vec<AxisLevel>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AxisRepr {
    Levels { name: String, levels: Vec<AxisLevel> },
    Path { path: String, values: Vec<Value>, #[serde(default)] labels: Option<Vec<String>> },
}

impl From<AxisRepr> for Axis {
    fn from(repr: AxisRepr) -> Self {
        match repr {
            AxisRepr::Levels { name, levels } => Axis { name, levels },
            AxisRepr::Path { path, values, labels } => {
                let levels = values
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let label = labels
                            .as_ref()
                            .and_then(|l| l.get(i).cloned())
                            .unwrap_or_else(|| default_label(&path, &v));
                        let mut set = Map::new();
                        set.insert(path.clone(), v);
                        AxisLevel { label, set }
                    })
                    .collect();
                Axis { name: path, levels }
            }
        }
    }
}

fn default_label(path: &str, value: &Value) -> String {
    let v = match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match path {
        "poolSize" => format!("PS {v}"),
        "daysBetweenTesting" => format!("{v} days"),
        _ => format!("{path}={v}"),
    }
}

impl Axis {
    pub fn path(path: &str, values: impl IntoIterator<Item = Value>) -> Self {
        AxisRepr::Path { path: path.to_string(), values: values.into_iter().collect(), labels: None }.into()
    }

    /// Test-product axis; each level sets every test parameter.
    pub fn tests(kinds: &[TestKind]) -> Self {
        let levels = kinds
            .iter()
            .map(|&k| {
                let mut set = Map::new();
                set.insert("fprSingle".into(), k.fpr_single().into());
                set.insert("fnrSingle".into(), k.fnr_single().into());
                set.insert("detectionCut".into(), k.detection_cut().into());
                set.insert("daysDelayTestResults".into(), k.days_delay_test_results().into());
                set.insert("costPerTest".into(), k.cost_per_test().into());
                AxisLevel { label: k.label().to_string(), set }
            })
            .collect();
        Axis { name: "test".into(), levels }
    }
}

/// A grid of scenarios, each run `replicates` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub base: ScenarioConfig,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default = "one")]
    pub replicates: u64,
    #[serde(default, rename = "outDir", skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<std::path::PathBuf>,
    #[serde(default = "default_cap", rename = "maxRuns")]
    pub max_runs: u64,
}

fn one() -> u64 {
    1
}

fn default_cap() -> u64 {
    DEFAULT_MAX_RUNS
}

impl SweepSpec {
    pub fn new(base: ScenarioConfig, axes: Vec<Axis>, replicates: u64) -> Self {
        SweepSpec { base, axes, replicates, out_dir: None, max_runs: DEFAULT_MAX_RUNS }
    }

    /// Test {A, B} × pool size {1, 5} × interval {4, 7} under one
    /// vaccination setting.
    pub fn testing_grid(vaccination: VaccinationScenario, replicates: u64) -> Self {
        let base = ScenarioConfig::default().with_vaccination(vaccination);
        let axes = vec![
            Axis::tests(&[TestKind::A, TestKind::B]),
            Axis::path("poolSize", [1.into(), 5.into()]),
            Axis::path("daysBetweenTesting", [4.into(), 7.into()]),
        ];
        SweepSpec::new(base, axes, replicates)
    }

    pub fn cell_count(&self) -> u64 {
        self.axes.iter().map(|a| a.levels.len() as u64).product()
    }

    /// All cells in row-major order (first axis outermost).
    pub fn expand(&self) -> Result<Vec<Cell>, SweepError> {
        if self.replicates == 0 {
            return Err(SweepError::NoReplicates);
        }
        let runs = self.cell_count().saturating_mul(self.replicates);
        if runs > self.max_runs {
            return Err(SweepError::TooManyRuns { runs, cap: self.max_runs });
        }
        let base = match serde_json::to_value(&self.base).expect("config serialises") {
            Value::Object(m) => m,
            _ => unreachable!("config serialises to an object"),
        };
        for axis in &self.axes {
            for level in &axis.levels {
                if let Some(field) = level.set.keys().find(|k| !base.contains_key(*k)) {
                    return Err(SweepError::UnknownField { axis: axis.name.clone(), field: field.clone() });
                }
            }
        }

        let mut combos: Vec<Vec<&AxisLevel>> = vec![Vec::new()];
        for axis in &self.axes {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    axis.levels.iter().map(move |level| {
                        let mut c = prefix.clone();
                        c.push(level);
                        c
                    })
                })
                .collect();
        }

        let mut seen = HashSet::new();
        let mut cells = Vec::with_capacity(combos.len());
        for combo in combos {
            let label = if combo.is_empty() {
                "base".to_string()
            } else {
                combo.iter().map(|l| l.label.as_str()).collect::<Vec<_>>().join("/")
            };
            if !seen.insert(label.clone()) {
                return Err(SweepError::DuplicateLabel(label));
            }
            let mut obj = base.clone();
            for level in &combo {
                for (k, v) in &level.set {
                    obj.insert(k.clone(), v.clone());
                }
            }
            let config: ScenarioConfig = serde_json::from_value(Value::Object(obj))
                .map_err(|e| SweepError::MalformedCell { label: label.clone(), message: e.to_string() })?;
            let report = config.validate();
            if !report.is_ok() {
                return Err(SweepError::InvalidCell { label, report });
            }
            cells.push(Cell { label, config });
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub label: String,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: Cell,
    pub replicates: ReplicateSet,
}

/// Runs every cell of the grid.
pub fn run_sweep(spec: &SweepSpec, execution: Execution) -> Result<Vec<CellResult>, SweepError> {
    spec.expand()?
        .into_iter()
        .map(|cell| {
            let replicates = run_replicates(&cell.config, spec.replicates, execution)?;
            Ok(CellResult { cell, replicates })
        })
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Outcome statistics for one scenario; standard deviations are sample
/// (n − 1) deviations, zero for a single replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioStats {
    pub label: String,
    pub replicates: usize,
    pub total_infections_mean: f64,
    pub total_infections_std: f64,
    pub false_isolations_mean: f64,
    pub false_isolations_std: f64,
    pub cost_per_person_per_day_mean: f64,
    pub cost_per_person_per_day_std: f64,
    pub total_tests_mean: f64,
}

/// The per-run outcomes a report is computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    pub total_infections: f64,
    pub false_isolations: f64,
    pub total_tests: f64,
    pub cost_per_person_per_day: f64,
}

impl From<&RunSummary> for RunOutcome {
    fn from(s: &RunSummary) -> Self {
        RunOutcome {
            total_infections: s.total_infections as f64,
            false_isolations: s.false_isolations as f64,
            total_tests: s.total_tests as f64,
            cost_per_person_per_day: s.cost_per_person_per_day,
        }
    }
}

impl ScenarioStats {
    pub fn from_outcomes(label: &str, outcomes: &[RunOutcome]) -> Self {
        assert!(!outcomes.is_empty(), "statistics need at least one replicate");
        let col = |f: fn(&RunOutcome) -> f64| outcomes.iter().map(f).collect::<Vec<_>>();
        let (ti_m, ti_s) = mean_std(&col(|o| o.total_infections));
        let (fi_m, fi_s) = mean_std(&col(|o| o.false_isolations));
        let (c_m, c_s) = mean_std(&col(|o| o.cost_per_person_per_day));
        let (t_m, _) = mean_std(&col(|o| o.total_tests));
        ScenarioStats {
            label: label.to_string(),
            replicates: outcomes.len(),
            total_infections_mean: ti_m,
            total_infections_std: ti_s,
            false_isolations_mean: fi_m,
            false_isolations_std: fi_s,
            cost_per_person_per_day_mean: c_m,
            cost_per_person_per_day_std: c_s,
            total_tests_mean: t_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenarios: Vec<ScenarioStats>,
}

impl ComparisonReport {
    pub fn from_results(results: &[CellResult]) -> Self {
        let scenarios = results
            .iter()
            .map(|r| {
                let outcomes: Vec<RunOutcome> = r.replicates.summaries().map(RunOutcome::from).collect();
                ScenarioStats::from_outcomes(&r.cell.label, &outcomes)
            })
            .collect();
        ComparisonReport { scenarios }
    }

    pub fn get(&self, label: &str) -> Option<&ScenarioStats> {
        self.scenarios.iter().find(|s| s.label == label)
    }
}

/// Cost per person per day from ledger totals.
pub fn compute_cost_metrics(total_cost: f64, config: &ScenarioConfig) -> f64 {
    cost_per_person_per_day(total_cost, config.time_horizon, config.pop_size)
}
