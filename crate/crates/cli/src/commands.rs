//! Subcommand bodies. Each writes its CSV files into the experiment's output
//! directory and returns what it computed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rach_core::sim::{run, RunSummary, SlotTrace, SUMMARY_COLUMNS, TRACE_COLUMNS};

use crate::config::ExperimentSpec;
use crate::plot::{plot_fade, plot_sweep, Table};
use crate::scenario::{run_fade, FadeReport};
use crate::sweep::{aggregate, aggregate_header, cells, run_cells, Aggregate, SweepCell};
use crate::verify::{all_suites, SuiteReport};

pub const RUN_TRACE: &str = "run_trace.csv";
pub const RUN_SUMMARY: &str = "run_summary.csv";
pub const SWEEP_SUMMARY: &str = "summary.csv";
pub const SWEEP_AGGREGATE: &str = "aggregate.csv";
pub const SWEEP_FAILURES: &str = "failures.csv";
pub const FADE_TRACE: &str = "fade_trace.csv";
pub const FADE_REPORT: &str = "fade_report.csv";
pub const VERIFY_REPORT: &str = "verify.csv";
pub const PLOT_DIR: &str = "plots";

/// Writes `header` and `rows` with a trailing newline per line.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn trace_csv(path: &Path, trace: &[SlotTrace]) -> Result<()> {
    write_csv(
        path,
        &TRACE_COLUMNS.join(","),
        trace.iter().map(SlotTrace::csv_row),
    )
}

/// Free text inside a CSV field without quoting.
fn field(s: &str) -> String {
    s.replace(',', ";").replace('\n', " ")
}

pub fn cmd_run(spec: &ExperimentSpec) -> Result<RunSummary> {
    let out = run(&spec.base)?;
    trace_csv(&spec.out_dir.join(RUN_TRACE), &out.trace)?;
    write_csv(
        &spec.out_dir.join(RUN_SUMMARY),
        &SUMMARY_COLUMNS.join(","),
        [out.summary.csv_row()],
    )?;
    Ok(out.summary)
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<RunSummary>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<(SweepCell, String)>,
}

pub fn cmd_sweep(spec: &ExperimentSpec) -> Result<SweepOutcome> {
    let grid = cells(spec);
    let results = run_cells(&spec.base, &grid, spec.workers)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (cell, r) in grid.into_iter().zip(results) {
        match r {
            Ok(s) => rows.push(s),
            Err(e) => failures.push((cell, e)),
        }
    }
    let aggregates = aggregate(&rows);
    write_csv(
        &spec.out_dir.join(SWEEP_SUMMARY),
        &SUMMARY_COLUMNS.join(","),
        rows.iter().map(RunSummary::csv_row),
    )?;
    write_csv(
        &spec.out_dir.join(SWEEP_AGGREGATE),
        &aggregate_header(),
        aggregates.iter().map(Aggregate::csv_row),
    )?;
    write_csv(
        &spec.out_dir.join(SWEEP_FAILURES),
        "protocol,N,A,seed,error",
        failures.iter().map(|(c, e)| {
            format!(
                "{},{},{},{},{}",
                c.protocol,
                c.users,
                c.idle_bound,
                c.seed,
                field(e)
            )
        }),
    )?;
    Ok(SweepOutcome {
        rows,
        aggregates,
        failures,
    })
}

pub fn cmd_scenario_fade(spec: &ExperimentSpec) -> Result<FadeReport> {
    let report = run_fade(spec)?;
    trace_csv(&spec.out_dir.join(FADE_TRACE), &report.trace)?;
    let recovered = report
        .recovered_after
        .map(|t| t.to_string())
        .unwrap_or_default();
    write_csv(
        &spec.out_dir.join(FADE_REPORT),
        "protocol,seed,fade_start,fade_end,pre_mean_power,fade_mean_power,recovered_after,dmr_in_band,power_rises,power_recovers,dmr_contained",
        [format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            report.summary.protocol,
            report.summary.seed,
            report.fade_start,
            report.fade_end,
            report.pre_mean_power,
            report.fade_mean_power,
            recovered,
            report.dmr_in_band,
            report.power_rises(),
            report.power_recovers(),
            report.dmr_contained(),
        )],
    )?;
    Ok(report)
}

pub fn cmd_verify(spec: &ExperimentSpec) -> Result<Vec<SuiteReport>> {
    let reports = all_suites(spec.base.seed);
    write_csv(
        &spec.out_dir.join(VERIFY_REPORT),
        "suite,check,passed,detail",
        reports.iter().flat_map(|r| {
            r.checks.iter().map(move |c| {
                format!(
                    "{},{},{},{}",
                    r.name,
                    field(&c.name),
                    c.passed,
                    field(&c.detail)
                )
            })
        }),
    )?;
    Ok(reports)
}

/// Renders the sweep figures from the aggregate CSV and the fade figure from
/// the fade trace, running the fade scenario first if its trace is missing.
pub fn cmd_plot(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let agg_path = spec.out_dir.join(SWEEP_AGGREGATE);
    if !agg_path.exists() {
        bail!(
            "{} not found; run `sweep` with the same --out first",
            agg_path.display()
        );
    }
    let fade_path = spec.out_dir.join(FADE_TRACE);
    if !fade_path.exists() {
        cmd_scenario_fade(spec)?;
    }
    let dir = spec.out_dir.join(PLOT_DIR);
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut files = plot_sweep(&Table::read(&agg_path)?, &dir)?;
    files.push(plot_fade(&Table::read(&fade_path)?, &dir)?);
    Ok(files)
}
