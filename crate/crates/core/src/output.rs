//! CSV and JSON encodings of run records, aggregates and reports.
//!
//! Run CSV columns, in order:
//! `day, s_u, s_v, e, i_s, i_a, r, iso_healthy, iso_sick, new_ext, new_int,
//! cum_infections, cum_false_iso, tests_today, cum_cost, vaccinated_total`.

use std::io::{Read, Write};

use thiserror::Error;

use crate::agent::CompartmentCounts;
use crate::calibration::ReproductionSeries;
use crate::cli::Calibration;
use crate::engine::{cost_per_person_per_day, DailyRecord, DayAggregate};
use crate::sweep::{ComparisonReport, RunOutcome};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed run CSV: {0}")]
    Malformed(String),
}

pub fn run_csv_header() -> Vec<&'static str> {
    std::iter::once("day").chain(DailyRecord::VALUE_COLUMNS).collect()
}

fn record_row(r: &DailyRecord) -> Vec<String> {
    let mut row = Vec::with_capacity(16);
    row.push(r.day.to_string());
    row.extend(r.counts.0.iter().map(u32::to_string));
    row.push(r.new_exposures_external.to_string());
    row.push(r.new_exposures_internal.to_string());
    row.push(r.cumulative_total_infections.to_string());
    row.push(r.cumulative_false_isolations.to_string());
    row.push(r.tests_used_today.to_string());
    row.push(r.cumulative_cost.to_string());
    row.push(r.vaccinated_total.to_string());
    row
}

pub fn write_run_csv<W: Write>(out: W, records: &[DailyRecord]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(run_csv_header())?;
    for r in records {
        w.write_record(record_row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_run_csv<R: Read>(input: R) -> Result<Vec<DailyRecord>, OutputError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != run_csv_header() {
        return Err(OutputError::Malformed(format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let field = |i: usize| -> Result<&str, OutputError> {
            row.get(i).ok_or_else(|| OutputError::Malformed(format!("missing column {i}")))
        };
        let int = |i: usize| -> Result<u64, OutputError> {
            field(i)?.parse::<u64>().map_err(|e| OutputError::Malformed(format!("column {i}: {e}")))
        };
        let mut counts = CompartmentCounts::default();
        for (k, slot) in counts.0.iter_mut().enumerate() {
            *slot = int(1 + k)? as u32;
        }
        records.push(DailyRecord {
            day: int(0)? as u32,
            counts,
            new_exposures_external: int(9)? as u32,
            new_exposures_internal: int(10)? as u32,
            cumulative_total_infections: int(11)?,
            cumulative_false_isolations: int(12)?,
            tests_used_today: int(13)?,
            cumulative_cost: field(14)?
                .parse()
                .map_err(|e| OutputError::Malformed(format!("cum_cost: {e}")))?,
            vaccinated_total: int(15)? as u32,
        });
    }
    Ok(records)
}

/// `day`, then `<column>_mean`, `<column>_min`, `<column>_max` per value.
pub fn write_aggregate_csv<W: Write>(out: W, aggregate: &[DayAggregate]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["day".to_string()];
    for c in DailyRecord::VALUE_COLUMNS {
        header.extend([format!("{c}_mean"), format!("{c}_min"), format!("{c}_max")]);
    }
    w.write_record(&header)?;
    for day in aggregate {
        let mut row = vec![day.day.to_string()];
        for k in 0..day.mean.len() {
            row.extend([day.mean[k].to_string(), day.min[k].to_string(), day.max[k].to_string()]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_csv<W: Write>(out: W, report: &ComparisonReport) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "replicates",
        "total_infections_mean",
        "total_infections_std",
        "false_isolations_mean",
        "false_isolations_std",
        "cost_per_person_per_day_mean",
        "cost_per_person_per_day_std",
        "total_tests_mean",
    ])?;
    for s in &report.scenarios {
        w.write_record([
            s.label.clone(),
            s.replicates.to_string(),
            s.total_infections_mean.to_string(),
            s.total_infections_std.to_string(),
            s.false_isolations_mean.to_string(),
            s.false_isolations_std.to_string(),
            s.cost_per_person_per_day_mean.to_string(),
            s.cost_per_person_per_day_std.to_string(),
            s.total_tests_mean.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_calibration_csv<W: Write>(out: W, cal: &Calibration) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["target_r0", "tau_i", "beta", "early_window_r_t", "validation_runs"])?;
    w.write_record([
        cal.target_r0.to_string(),
        cal.tau_i.to_string(),
        cal.beta.to_string(),
        cal.early_window_r_t.map(|r| r.to_string()).unwrap_or_default(),
        cal.validation_runs.map(|n| n.to_string()).unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(())
}

/// One row per run and day; `r_t` is empty where undefined.
pub fn write_r_series_csv<W: Write>(out: W, series: &[ReproductionSeries]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["run", "day", "r_t", "susceptible_fraction", "prev_infectious", "early_window"])?;
    for (run, s) in series.iter().enumerate() {
        for p in &s.points {
            w.write_record([
                run.to_string(),
                p.day.to_string(),
                p.r_t.map(|r| r.to_string()).unwrap_or_default(),
                p.susceptible_fraction.to_string(),
                p.prev_infectious.to_string(),
                u8::from(p.early_window).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Recovers the report inputs of one run from its records alone: population
/// size from the compartment total, horizon from the last day.
pub fn outcome_from_records(records: &[DailyRecord]) -> Option<RunOutcome> {
    let last = records.last()?;
    Some(RunOutcome {
        total_infections: last.cumulative_total_infections as f64,
        false_isolations: last.cumulative_false_isolations as f64,
        total_tests: records.iter().map(|r| r.tests_used_today as f64).sum(),
        cost_per_person_per_day: cost_per_person_per_day(last.cumulative_cost, last.day, last.counts.total()),
    })
}
