//! Parallel parameter sweeps and their aggregation.

use anyhow::{Context, Result};
use rach_core::sim::{run, Protocol, RunSummary, SimConfig};
use rayon::prelude::*;

use crate::config::ExperimentSpec;

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub protocol: Protocol,
    pub users: usize,
    pub idle_bound: f64,
    pub seed: u64,
}

impl SweepCell {
    pub fn config(&self, base: &SimConfig) -> SimConfig {
        let mut cfg = base.clone();
        cfg.protocol = self.protocol;
        cfg.users = self.users;
        cfg.contention.idle_bound = self.idle_bound;
        cfg.seed = self.seed;
        cfg
    }
}

/// Grid in (protocol, N, A, seed) order.
pub fn cells(spec: &ExperimentSpec) -> Vec<SweepCell> {
    let mut out = Vec::new();
    for &protocol in &spec.protocols {
        for &users in &spec.users {
            for &idle_bound in &spec.idle_bounds {
                for &seed in &spec.seeds {
                    out.push(SweepCell {
                        protocol,
                        users,
                        idle_bound,
                        seed,
                    });
                }
            }
        }
    }
    out
}

/// Runs every cell on a pool of `workers` threads. The result order matches
/// `cells` whatever the scheduling; a failing cell yields its error message
/// and does not stop the others.
pub fn run_cells(
    base: &SimConfig,
    cells: &[SweepCell],
    workers: usize,
) -> Result<Vec<std::result::Result<RunSummary, String>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("cannot start worker pool")?;
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                run(&c.config(base))
                    .map(|o| o.summary)
                    .map_err(|e| e.to_string())
            })
            .collect()
    }))
}

/// Seed-averaged metrics for one (protocol, N, A).
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub protocol: Protocol,
    pub users: usize,
    pub idle_bound: f64,
    pub runs: usize,
    /// In `RunSummary::metrics` order.
    pub mean: [f64; 8],
    /// Sample standard deviation over seeds (0 for a single run).
    pub std: [f64; 8],
}

pub const METRIC_NAMES: [&str; 8] = [
    "mean_delay",
    "mean_power",
    "drop_rate",
    "mean_efforts",
    "mean_V",
    "idle_rate",
    "dmr",
    "cr",
];

pub fn aggregate_header() -> String {
    let mut cols = vec![
        "protocol".to_string(),
        "N".into(),
        "A".into(),
        "runs".into(),
    ];
    for m in METRIC_NAMES {
        cols.push(m.to_string());
        cols.push(format!("{m}_std"));
    }
    cols.join(",")
}

impl Aggregate {
    pub fn csv_row(&self) -> String {
        let mut fields = vec![
            self.protocol.to_string(),
            self.users.to_string(),
            self.idle_bound.to_string(),
            self.runs.to_string(),
        ];
        for (m, s) in self.mean.iter().zip(&self.std) {
            fields.push(m.to_string());
            fields.push(s.to_string());
        }
        fields.join(",")
    }

    pub fn metric(&self, name: &str) -> Option<(f64, f64)> {
        METRIC_NAMES
            .iter()
            .position(|&m| m == name)
            .map(|i| (self.mean[i], self.std[i]))
    }
}

/// Groups rows by (protocol, N, A) in first-appearance order.
pub fn aggregate(rows: &[RunSummary]) -> Vec<Aggregate> {
    let mut groups: Vec<(Protocol, usize, f64, Vec<[f64; 8]>)> = Vec::new();
    for r in rows {
        match groups
            .iter_mut()
            .find(|g| g.0 == r.protocol && g.1 == r.users && g.2 == r.idle_bound)
        {
            Some(g) => g.3.push(r.metrics()),
            None => groups.push((r.protocol, r.users, r.idle_bound, vec![r.metrics()])),
        }
    }
    groups
        .into_iter()
        .map(|(protocol, users, idle_bound, samples)| {
            let n = samples.len() as f64;
            let mut mean = [0.0; 8];
            let mut std = [0.0; 8];
            for i in 0..8 {
                mean[i] = samples.iter().map(|s| s[i]).sum::<f64>() / n;
                if samples.len() > 1 {
                    let ss: f64 = samples.iter().map(|s| (s[i] - mean[i]).powi(2)).sum();
                    std[i] = (ss / (n - 1.0)).sqrt();
                }
            }
            Aggregate {
                protocol,
                users,
                idle_bound,
                runs: samples.len(),
                mean,
                std,
            }
        })
        .collect()
}
