use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use rach_cli::commands::{cmd_plot, cmd_run, cmd_scenario_fade, cmd_sweep, cmd_verify};
use rach_cli::config::{load_layered, ENV_PREFIX};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Fpfb,
    Fpdb,
    Dpdb,
}

#[derive(Debug, Parser)]
#[command(
    name = "rach",
    version,
    about = "Measurement-adaptive random-access simulator and verification harness",
    after_help = "Any config key can also be set through an environment variable named \
                  RACH_<KEY> (e.g. RACH_USERS=12, RACH_SWEEP_USERS=4,8). Precedence: \
                  flags > environment > config file > built-in defaults."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config file (flat keys)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed; sweep seeds start here unless `seeds` is set explicitly
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long, global = true, value_name = "INT")]
    workers: Option<usize>,
    /// Protocol for single runs; restricts sweeps to this protocol
    #[arg(long, global = true, value_enum)]
    protocol: Option<ProtocolArg>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One simulation run: per-slot trace and summary CSV
    Run,
    /// Protocol x N x A x seed grid with seed-averaged aggregates
    Sweep,
    /// Deep-fade scenario with power and miss-detection tracking
    ScenarioFade,
    /// Oracle, controller and MDP verification suites
    Verify,
    /// SVG figures from sweep and fade output
    Plot,
}

fn flag_layer(cli: &Cli) -> Result<Vec<(String, toml::Value)>> {
    let mut flags = Vec::new();
    if let Some(s) = cli.seed {
        let s =
            i64::try_from(s).map_err(|_| anyhow::anyhow!("invalid value for `seed`: too large"))?;
        flags.push(("seed".into(), toml::Value::Integer(s)));
    }
    if let Some(o) = &cli.out {
        flags.push(("out".into(), toml::Value::String(o.display().to_string())));
    }
    if let Some(w) = cli.workers {
        flags.push(("workers".into(), toml::Value::Integer(w as i64)));
    }
    if let Some(p) = cli.protocol {
        let name = format!("{p:?}").to_ascii_lowercase();
        flags.push(("protocol".into(), toml::Value::String(name.clone())));
        flags.push((
            "sweep_protocols".into(),
            toml::Value::Array(vec![toml::Value::String(name)]),
        ));
    }
    Ok(flags)
}

fn execute(cli: &Cli) -> Result<bool> {
    let spec = load_layered(cli.config.as_deref(), flag_layer(cli)?)?;
    let out = spec.out_dir.display();
    match cli.command {
        Command::Run => {
            let s = cmd_run(&spec)?;
            println!(
                "{} N={} seed={}: delay {:.3}, power {:.2} mW, drop {:.4}, efforts {:.3}, V {:.3}, idle {:.4}",
                s.protocol, s.users, s.seed, s.mean_delay, s.mean_power, s.drop_rate, s.mean_efforts,
                s.mean_lyapunov, s.idle_rate
            );
            println!("wrote {out}/run_trace.csv and {out}/run_summary.csv");
        }
        Command::Sweep => {
            let o = cmd_sweep(&spec)?;
            println!(
                "{} runs, {} aggregate rows written to {out}",
                o.rows.len(),
                o.aggregates.len()
            );
            for (c, e) in &o.failures {
                eprintln!(
                    "cell {} N={} A={} seed={} failed: {e}",
                    c.protocol, c.users, c.idle_bound, c.seed
                );
            }
            return Ok(o.failures.is_empty());
        }
        Command::ScenarioFade => {
            let r = cmd_scenario_fade(&spec)?;
            for line in r.lines() {
                println!("{line}");
            }
            println!("wrote {out}/fade_trace.csv and {out}/fade_report.csv");
        }
        Command::Verify => {
            let reports = cmd_verify(&spec)?;
            let mut ok = true;
            for r in &reports {
                println!("[{}] {:.2} s", r.name, r.elapsed.as_secs_f64());
                for c in &r.checks {
                    println!("  {c}");
                }
                ok &= r.passed();
            }
            println!(
                "{}",
                if ok {
                    "all suites passed"
                } else {
                    "verification FAILED"
                }
            );
            return Ok(ok);
        }
        Command::Plot => {
            for f in cmd_plot(&spec)? {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            eprintln!("(environment overrides use the {ENV_PREFIX} prefix)");
            ExitCode::from(2)
        }
    }
}
