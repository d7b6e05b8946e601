//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::time::Instant;

use outbreak_sim::calibration::{
    effective_r_series, estimate_beta, expected_infectious_duration, pooled_early_window_mean,
};
use outbreak_sim::cli::{cmd_run, Jobs, RunArgs};
use outbreak_sim::config::{PoolingType, ScenarioConfig, TestKind, VaccinationScenario};
use outbreak_sim::engine::{run_replicates, Execution, RunOutput};
use outbreak_sim::sweep::{run_sweep, SweepSpec};
use outbreak_sim::testing::{
    pool_test_exponential, run_testing_day, single_test, PendingQueue, Pool, TestLedger, TestSpec,
};
use outbreak_sim::{Agent, Compartment, Population, RngStream, ViralLoadProfile};
use statrs::distribution::{ContinuousCDF, Normal};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// One-sided Mann–Whitney p-value for "`x` tends to be smaller than `y`",
/// normal approximation with tie and continuity corrections.
fn rank_test_less(x: &[f64], y: &[f64]) -> f64 {
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let mut all: Vec<(f64, bool)> = x.iter().map(|&v| (v, true)).chain(y.iter().map(|&v| (v, false))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = all.len();
    let mut rank_sum_x = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_sum_x += all[i..=j].iter().filter(|e| e.1).count() as f64 * avg_rank;
        i = j + 1;
    }
    let u = rank_sum_x - nx * (nx + 1.0) / 2.0;
    let nf = n as f64;
    let var = nx * ny / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var == 0.0 {
        return 1.0;
    }
    let z = (u - nx * ny / 2.0 + 0.5) / var.sqrt();
    Normal::standard().cdf(z)
}

/// Means ordered and rank test significant at 0.05.
fn less_than(what: &str, x_label: &str, x: &[f64], y_label: &str, y: &[f64]) -> Verdict {
    let (mx, my) = (mean(x), mean(y));
    let p = rank_test_less(x, y);
    check(
        mx < my && p < 0.05,
        format!("{what}: {x_label} {mx:.2} < {y_label} {my:.2} (p = {p:.2e})"),
    )
}

fn within_3_sigma(label: &str, freq: f64, p: f64, n: f64) -> Verdict {
    let sigma = (p * (1.0 - p) / n).sqrt();
    check(
        (freq - p).abs() <= 3.0 * sigma,
        format!("{label}: {freq:.5} vs {p:.5} ± {:.5}", 3.0 * sigma),
    )
}

fn all_of(parts: Vec<Verdict>) -> Verdict {
    let ok = parts.iter().all(Result::is_ok);
    let text = parts
        .into_iter()
        .map(|p| match p {
            Ok(s) => s,
            Err(s) => format!("[failed] {s}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    check(ok, text)
}

fn criterion_1() -> Verdict {
    let tau = expected_infectious_duration(&ScenarioConfig::default()).map_err(|e| e.to_string())?;
    check(tau == 12.25, format!("τ_I = {tau}"))
}

fn criterion_2() -> Verdict {
    let beta = estimate_beta(5.0, &ScenarioConfig::default()).map_err(|e| e.to_string())?;
    check((0.405..=0.412).contains(&beta), format!("β = {beta:.5}"))
}

/// Number of peaks in `curve` that rise at least `prominence` above the
/// lowest point since the previous peak and fall at least as far after.
fn prominent_peaks(curve: &[f64], prominence: f64) -> usize {
    let mut peaks = 0;
    let mut low = curve[0];
    let mut high = f64::NEG_INFINITY;
    let mut rising = true;
    for &v in curve {
        if rising {
            if v > high {
                high = v;
            }
            if high - low >= prominence && high - v >= prominence {
                peaks += 1;
                rising = false;
                low = v;
            }
        } else if v < low {
            low = v;
        } else if v - low >= prominence {
            rising = true;
            high = v;
        }
    }
    peaks
}

fn criterion_3(runs: &mut Vec<RunOutput>) -> Verdict {
    let start = Instant::now();
    let cfg = ScenarioConfig::default();
    let set = run_replicates(&cfg, 20, Execution::Parallel).map_err(|e| e.to_string())?;
    let tau = expected_infectious_duration(&cfg).map_err(|e| e.to_string())?;
    let series: Vec<_> = set.runs.iter().map(|r| effective_r_series(&r.records, tau)).collect();
    let window_days: usize = series.iter().map(|s| s.points.iter().filter(|p| p.early_window).count()).sum();
    let r = pooled_early_window_mean(&series).ok_or("no early-window days")?;

    // E + I, averaged over replicates
    let curve: Vec<f64> = (0..set.aggregate.len())
        .map(|d| {
            let m = &set.aggregate[d].mean;
            m[2] + m[3] + m[4]
        })
        .collect();
    let peak = curve.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let peak_day = curve.iter().position(|&v| v == peak).unwrap_or(0);
    let last = *curve.last().unwrap();
    let peaks = prominent_peaks(&curve, 0.1 * peak);
    let shape_ok = peaks == 1 && peak_day > 0 && last < 0.5 * peak;
    let elapsed = start.elapsed().as_secs_f64();
    runs.extend(set.runs);
    all_of(vec![
        check((4.0..=6.0).contains(&r), format!("early-window mean R_t = {r:.3} over {window_days} run-days")),
        check(
            shape_ok,
            format!("E+I: {peaks} prominent peak(s), first max {peak:.0} on day {peak_day}, day-120 value {last:.0}"),
        ),
        check(elapsed < 300.0, format!("{elapsed:.1} s")),
    ])
}

fn criterion_4(runs: &[RunOutput], pop_size_of: impl Fn(usize) -> u32) -> Verdict {
    let mut violations = 0;
    let mut records = 0;
    for (i, run) in runs.iter().enumerate() {
        for r in &run.records {
            records += 1;
            if r.counts.total() != pop_size_of(i) {
                violations += 1;
            }
        }
    }
    check(violations == 0, format!("{violations} violations in {records} records of {} runs", runs.len()))
}

fn criterion_5() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg_path = dir.path().join("config.json");
    let cfg = ScenarioConfig { time_horizon: 60, ..ScenarioConfig::default().with_testing(TestKind::A, 5, 4) }
        .with_vaccination(VaccinationScenario::C);
    fs::write(&cfg_path, cfg.to_json_pretty()).map_err(|e| e.to_string())?;
    let mut outs = Vec::new();
    for (k, jobs) in [Some(1), None].into_iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let args = RunArgs { config: Some(cfg_path.clone()), seed: Some(2024), runs: 3, out: out.clone(), jobs: Jobs { jobs } };
        cmd_run(&args).map_err(|e| e.to_string())?;
        outs.push(out);
    }
    let mut compared = 0;
    for i in 0..3 {
        let name = format!("run_{i:03}.csv");
        let a = fs::read(outs[0].join(&name)).map_err(|e| e.to_string())?;
        let b = fs::read(outs[1].join(&name)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{name} differs"));
        }
        compared += 1;
    }
    Ok(format!("{compared} run CSVs byte-identical across two invocations"))
}

fn criterion_6() -> Verdict {
    const N: usize = 100_000;
    let mut parts = Vec::new();
    for (k, kind) in [TestKind::A, TestKind::B].into_iter().enumerate() {
        let spec = TestSpec::from_config(&ScenarioConfig::default().with_test(kind));
        for (j, (load, p)) in [(0.0, spec.fpr), (1e7, 1.0 - spec.fnr)].into_iter().enumerate() {
            let mut rng = RngStream::new(6, (k * 2 + j) as u64);
            let hits = (0..N).filter(|_| single_test(load, &spec, &mut rng).is_positive()).count();
            parts.push(within_3_sigma(&format!("test {} load {load:e}", kind.label()), hits as f64 / N as f64, p, N as f64));
        }
    }
    let spec = TestSpec { fnr: 0.15, ..TestSpec::from_config(&ScenarioConfig::default().with_test(TestKind::B)) };
    let pool = Pool { members: (0..5).collect(), loads: vec![1e7, 1e7, 0.0, 0.0, 0.0] };
    let mut rng = RngStream::new(6, 9);
    let hits = (0..N).filter(|_| pool_test_exponential(&pool, &spec, &mut rng).is_positive()).count();
    parts.push(within_3_sigma("exponential pool k=2", hits as f64 / N as f64, 0.9775, N as f64));
    all_of(parts)
}

fn infected(id: usize, exposure_day: u32) -> Agent {
    let mut a = Agent::new(id, 0.7);
    a.viral_profile = Some(ViralLoadProfile {
        t0: 3.0,
        v0: 1e3,
        t_p: 2.0,
        v_p: 1e5,
        t_s: None,
        t_f: 6.5,
        v_f: 1e3,
        symptomatic: false,
    });
    a.exposure_day = Some(exposure_day);
    a
}

fn criterion_7() -> Verdict {
    // 100 eligible agents, 3 of them at peak load; certain test outcomes
    let cfg = ScenarioConfig { pop_size: 100, initial_infected: 3, fpr_single: 0.0, fnr_single: 0.0, ..Default::default() }
        .with_testing(TestKind::A, 5, 4);
    let cfg = ScenarioConfig { fpr_single: 0.0, fnr_single: 0.0, ..cfg };
    let day = 10;
    let agents: Vec<Agent> = (0..100).map(|id| if id < 3 { infected(id, day - 5) } else { Agent::new(id, 0.7) }).collect();
    let mut pop = Population::new(agents);
    for id in 0..3 {
        pop.move_to(id, Compartment::InfectiousAsymptomatic);
    }
    // take the first partition that separates the three infected agents
    for stream in 0..100 {
        let mut pending = PendingQueue::default();
        let mut ledger = TestLedger::default();
        let mut rng = RngStream::new(7, stream);
        let consumed = run_testing_day(&pop, &cfg, day, &mut pending, &mut ledger, &mut rng);
        let results = pending.deliver(day + cfg.days_delay_test_results);
        let in_positive_pools = results.iter().filter(|r| r.tests_attributed > 1.0).count();
        if in_positive_pools != 15 {
            continue;
        }
        let positives = results.iter().filter(|r| r.outcome.is_positive()).count();
        return check(
            consumed == 35 && ledger.total_tests == 35 && ledger.cumulative_cost == 3500.0 && positives == 3,
            format!("{} results, 3 positive pools -> {consumed} tests, cost {}", results.len(), ledger.cumulative_cost),
        );
    }
    Err("no partition with three positive pools".into())
}

fn grid_samples(results: &[outbreak_sim::sweep::CellResult], label: &str, f: fn(&RunOutput) -> f64) -> Vec<f64> {
    results
        .iter()
        .find(|r| r.cell.label == label)
        .map(|r| r.replicates.runs.iter().map(f).collect())
        .unwrap_or_default()
}

fn criterion_8(runs: &mut Vec<RunOutput>) -> Verdict {
    let start = Instant::now();
    let spec = SweepSpec::testing_grid(VaccinationScenario::A, 20);
    let results = run_sweep(&spec, Execution::Parallel).map_err(|e| e.to_string())?;
    let infections = |r: &RunOutput| r.summary.total_infections as f64;
    let false_iso = |r: &RunOutput| r.summary.false_isolations as f64;
    let cost = |r: &RunOutput| r.summary.cost_per_person_per_day;
    let mut parts = vec![
        less_than(
            "(a) infections",
            "B/PS 1/4 days",
            &grid_samples(&results, "B/PS 1/4 days", infections),
            "B/PS 1/7 days",
            &grid_samples(&results, "B/PS 1/7 days", infections),
        ),
        less_than(
            "(b) false isolations",
            "A/PS 5/7 days",
            &grid_samples(&results, "A/PS 5/7 days", false_iso),
            "A/PS 1/7 days",
            &grid_samples(&results, "A/PS 1/7 days", false_iso),
        ),
    ];
    for test in ["A", "B"] {
        for interval in [4, 7] {
            let pooled = format!("{test}/PS 5/{interval} days");
            let single = format!("{test}/PS 1/{interval} days");
            parts.push(less_than(
                "(c) cost",
                &pooled,
                &grid_samples(&results, &pooled, cost),
                &single,
                &grid_samples(&results, &single, cost),
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    parts.push(check(elapsed < 1800.0, format!("{elapsed:.1} s")));
    runs.extend(results.into_iter().flat_map(|r| r.replicates.runs));
    all_of(parts)
}

fn criterion_9(runs: &mut Vec<RunOutput>) -> Verdict {
    let mut samples = Vec::new();
    for v in [VaccinationScenario::A, VaccinationScenario::B, VaccinationScenario::C] {
        let cfg = ScenarioConfig::default().with_vaccination(v).with_testing(TestKind::B, 5, 4);
        let set = run_replicates(&cfg, 20, Execution::Parallel).map_err(|e| e.to_string())?;
        samples.push(set.summaries().map(|s| s.total_infections as f64).collect::<Vec<_>>());
        runs.extend(set.runs);
    }
    all_of(vec![
        less_than("infections", "C", &samples[2], "B", &samples[1]),
        less_than("infections", "B", &samples[1], "A", &samples[0]),
    ])
}

fn criterion_10() -> Verdict {
    // 1000 agents, half at peak load, tested on 100 independent days
    let cfg = ScenarioConfig { pop_size: 1000, ..Default::default() }.with_testing(TestKind::A, 1, 1);
    let cfg = ScenarioConfig { pooling_type: PoolingType::Average, ..cfg };
    let spec = TestSpec::from_config(&cfg);
    let day = 10;
    let agents: Vec<Agent> =
        (0..1000).map(|id| if id % 2 == 0 { infected(id, day - 5) } else { Agent::new(id, 0.7) }).collect();
    let pop = Population::new(agents);
    let (mut pos_det, mut n_det, mut pos_und, mut n_und) = (0u64, 0u64, 0u64, 0u64);
    let mut tests = 0;
    for stream in 0..100 {
        let mut pending = PendingQueue::default();
        let mut ledger = TestLedger::default();
        let mut rng = RngStream::new(10, stream);
        tests += run_testing_day(&pop, &cfg, day, &mut pending, &mut ledger, &mut rng);
        for r in pending.deliver(day + spec.delay_days) {
            let positive = u64::from(r.outcome.is_positive());
            if r.agent % 2 == 0 {
                pos_det += positive;
                n_det += 1;
            } else {
                pos_und += positive;
                n_und += 1;
            }
        }
    }
    // direct single tests on the same loads
    let mut rng = RngStream::new(10, 1000);
    let direct_det = (0..n_det).filter(|_| single_test(1e5, &spec, &mut rng).is_positive()).count() as f64;
    let direct_und = (0..n_und).filter(|_| single_test(0.0, &spec, &mut rng).is_positive()).count() as f64;
    let two_sample = |label: &str, a: f64, n: f64, b: f64| {
        let (pa, pb) = (a / n, b / n);
        let pooled = (a + b) / (2.0 * n);
        let sigma = (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
        check((pa - pb).abs() <= 3.0 * sigma, format!("{label}: {pa:.5} vs single {pb:.5} ± {:.5}", 3.0 * sigma))
    };
    all_of(vec![
        check(tests == 100_000, format!("{tests} agent-tests")),
        two_sample("detectable", pos_det as f64, n_det as f64, direct_det),
        two_sample("undetectable", pos_und as f64, n_und as f64, direct_und),
        within_3_sigma("detectable vs 1-φ_n", pos_det as f64 / n_det as f64, 1.0 - spec.fnr, n_det as f64),
        within_3_sigma("undetectable vs φ_p", pos_und as f64 / n_und as f64, spec.fpr, n_und as f64),
    ])
}

fn main() {
    let mut runs: Vec<RunOutput> = Vec::new();
    let mut verdicts: Vec<(u32, &str, Verdict)> = Vec::new();
    verdicts.push((1, "expected infectious duration", criterion_1()));
    verdicts.push((2, "beta estimate", criterion_2()));
    verdicts.push((3, "baseline R0 round trip", criterion_3(&mut runs)));
    let c5 = criterion_5();
    let c6 = criterion_6();
    let c7 = criterion_7();
    let c8 = criterion_8(&mut runs);
    let c9 = criterion_9(&mut runs);
    let c10 = criterion_10();
    let c4 = criterion_4(&runs, |_| 10_000);
    verdicts.push((4, "conservation", c4));
    verdicts.push((5, "determinism", c5));
    verdicts.push((6, "test-rate oracles", c6));
    verdicts.push((7, "Dorfman cost accounting", c7));
    verdicts.push((8, "testing-grid trends", c8));
    verdicts.push((9, "vaccination effect", c9));
    verdicts.push((10, "pool-size-1 equivalence", c10));

    let mut failed = 0;
    for (n, name, v) in &verdicts {
        match v {
            Ok(d) => println!("PASS  criterion {n:>2} {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  criterion {n:>2} {name}: {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
