//! Experiment configuration: flat TOML keys, `RACH_*` environment
//! overrides, defaults for every omitted key and per-key validation.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rach_core::controller::AccessFunction;
use rach_core::sim::{FadingSchedule, Protocol, SimConfig};
use serde::Deserialize;

/// Prefix of environment variables overriding config keys, e.g.
/// `RACH_USERS=12` or `RACH_SWEEP_USERS=4,8,12`.
pub const ENV_PREFIX: &str = "RACH_";

/// Every key accepted in a config file. All are optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub users: Option<usize>,
    pub max_effort: Option<usize>,
    pub pool_size: Option<usize>,
    pub slots: Option<u64>,
    pub window: Option<usize>,
    pub fixed_power: Option<f64>,
    pub fixed_backoff: Option<Vec<f64>>,
    pub power_ramp: Option<f64>,
    pub p_max: Option<f64>,
    pub p_min: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub dmr_high: Option<f64>,
    pub dmr_low: Option<f64>,
    pub idle_bound: Option<f64>,
    pub root_tolerance: Option<f64>,
    pub access_exponent: Option<f64>,
    pub pathloss_const: Option<f64>,
    pub pathloss_slope: Option<f64>,
    pub noise_dbm: Option<f64>,
    pub snr_threshold: Option<f64>,
    pub cell_radius: Option<f64>,
    pub fading_factor: Option<f64>,
    pub fluctuation: Option<f64>,
    pub min_distance: Option<f64>,
    pub protocol: Option<String>,
    pub seed: Option<u64>,
    pub sweep_users: Option<Vec<usize>>,
    pub sweep_idle_bounds: Option<Vec<f64>>,
    pub sweep_protocols: Option<Vec<String>>,
    pub replications: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub fade_start: Option<u64>,
    pub fade_end: Option<u64>,
    pub fade_mean: Option<f64>,
    pub fade_half_width: Option<f64>,
    pub out: Option<String>,
    pub workers: Option<usize>,
}

/// Deep-fade scenario layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FadeSpec {
    pub start: u64,
    pub end: u64,
    pub mean: f64,
    pub half_width: f64,
}

impl Default for FadeSpec {
    fn default() -> Self {
        Self {
            start: 6_000,
            end: 10_000,
            mean: 0.8,
            half_width: 0.3,
        }
    }
}

impl FadeSpec {
    pub fn schedule(&self) -> FadingSchedule {
        let mut s = FadingSchedule::deep_fade(self.start, self.end);
        s.half_width = self.half_width;
        s.segments[1].mean = self.mean;
        s
    }
}

/// A validated experiment: base run parameters plus sweep axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: SimConfig,
    pub users: Vec<usize>,
    pub idle_bounds: Vec<f64>,
    pub protocols: Vec<Protocol>,
    pub seeds: Vec<u64>,
    pub fade: FadeSpec,
    pub out_dir: PathBuf,
    pub workers: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        build(RawConfig::default()).expect("defaults are valid")
    }
}

fn invalid(key: &str, reason: impl std::fmt::Display) -> anyhow::Error {
    anyhow!("invalid value for `{key}`: {reason}")
}

fn parse_protocol(key: &str, s: &str) -> Result<Protocol> {
    s.parse().map_err(|e: String| invalid(key, e))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Applies defaults and checks every key.
pub fn build(raw: RawConfig) -> Result<ExperimentSpec> {
    let mut base = SimConfig::default();
    macro_rules! set {
        ($key:ident => $target:expr) => {
            if let Some(v) = raw.$key.clone() {
                $target = v;
            }
        };
    }
    set!(users => base.users);
    set!(max_effort => base.max_effort);
    set!(pool_size => base.pool_size);
    set!(slots => base.slots);
    set!(window => base.window);
    set!(fixed_power => base.fixed_power_mw);
    set!(power_ramp => base.power.ramp);
    set!(p_max => base.power.p_max);
    set!(p_min => base.power.p_min);
    set!(delta1 => base.power.delta1);
    set!(delta2 => base.power.delta2);
    set!(dmr_high => base.power.dmr_high);
    set!(dmr_low => base.power.dmr_low);
    set!(idle_bound => base.contention.idle_bound);
    set!(root_tolerance => base.contention.root_tolerance);
    set!(pathloss_const => base.channel.pathloss_const_db);
    set!(pathloss_slope => base.channel.pathloss_slope_db);
    set!(noise_dbm => base.channel.noise_dbm);
    set!(snr_threshold => base.channel.snr_threshold_db);
    set!(cell_radius => base.channel.cell_radius_km);
    set!(fading_factor => base.channel.fading_factor);
    set!(min_distance => base.min_distance_km);
    set!(seed => base.seed);
    if let Some(a) = raw.access_exponent {
        base.contention.access = AccessFunction::PowerLaw { exponent: a };
    }
    if let Some(w) = raw.fluctuation {
        base.fading.half_width = w;
    }
    match raw.fixed_backoff.clone() {
        Some(b) => base.fixed_backoff = b,
        None if base.max_effort != 5 => {
            bail!(invalid(
                "fixed_backoff",
                "must be given when max_effort is not 5"
            ))
        }
        None => {}
    }
    if let Some(p) = &raw.protocol {
        base.protocol = parse_protocol("protocol", p)?;
    }

    let checks: [(&str, bool, &str); 20] = [
        (
            "users",
            (1..=64).contains(&base.users),
            "must lie in 1..=64",
        ),
        ("max_effort", base.max_effort >= 1, "must be at least 1"),
        ("pool_size", base.pool_size >= 1, "must be at least 1"),
        ("window", base.window >= 1, "must be at least 1"),
        (
            "fixed_power",
            base.fixed_power_mw > 0.0 && base.fixed_power_mw <= base.power.p_max,
            "must lie in (0, p_max]",
        ),
        (
            "fixed_backoff",
            base.fixed_backoff.len() == base.max_effort,
            "needs one entry per effort",
        ),
        (
            "fixed_backoff",
            base.fixed_backoff.iter().all(|b| (0.0..=1.0).contains(b)),
            "entries must lie in [0, 1]",
        ),
        ("power_ramp", base.power.ramp >= 0.0, "must be non-negative"),
        (
            "p_max",
            base.power.p_max > 0.0 && base.power.p_max.is_finite(),
            "must be positive and finite",
        ),
        (
            "p_min",
            base.power.p_min >= 0.0 && base.power.p_min < base.power.p_max,
            "must lie in [0, p_max)",
        ),
        ("delta1", base.power.delta1 > 0.0, "must be positive"),
        ("delta2", base.power.delta2 > 0.0, "must be positive"),
        (
            "dmr_low",
            (0.0..=1.0).contains(&base.power.dmr_low) && base.power.dmr_low < base.power.dmr_high,
            "must lie in [0, dmr_high)",
        ),
        (
            "dmr_high",
            (0.0..=1.0).contains(&base.power.dmr_high),
            "must lie in [0, 1]",
        ),
        (
            "idle_bound",
            base.contention.idle_bound > 0.0 && base.contention.idle_bound < 1.0,
            "must lie in (0, 1)",
        ),
        (
            "root_tolerance",
            base.contention.root_tolerance > 0.0,
            "must be positive",
        ),
        (
            "snr_threshold",
            base.channel.snr_threshold_db.is_finite(),
            "must be finite",
        ),
        (
            "cell_radius",
            base.channel.cell_radius_km > 0.0,
            "must be positive",
        ),
        (
            "fading_factor",
            base.channel.fading_factor > 0.0,
            "must be positive",
        ),
        (
            "min_distance",
            base.min_distance_km > 0.0 && base.min_distance_km < base.channel.cell_radius_km,
            "must lie in (0, cell_radius)",
        ),
    ];
    for (key, ok, reason) in checks {
        if !ok {
            bail!(invalid(key, reason));
        }
    }
    if let AccessFunction::PowerLaw { exponent } = base.contention.access {
        if !exponent.is_finite() {
            bail!(invalid("access_exponent", "must be finite"));
        }
    }
    if let Err(e) = base.fading.validate() {
        bail!(invalid("fluctuation", e));
    }

    let users = raw
        .sweep_users
        .clone()
        .unwrap_or_else(|| (1..=14).collect());
    if users.is_empty() || users.iter().any(|n| !(1..=64).contains(n)) {
        bail!(invalid(
            "sweep_users",
            "needs at least one entry, each in 1..=64"
        ));
    }
    let idle_bounds = raw
        .sweep_idle_bounds
        .clone()
        .unwrap_or_else(|| vec![0.05, 0.25, 0.5]);
    if idle_bounds.is_empty() || idle_bounds.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        bail!(invalid(
            "sweep_idle_bounds",
            "needs at least one entry, each in (0, 1)"
        ));
    }
    let protocols = match &raw.sweep_protocols {
        Some(list) if list.is_empty() => {
            bail!(invalid("sweep_protocols", "needs at least one entry"))
        }
        Some(list) => list
            .iter()
            .map(|p| parse_protocol("sweep_protocols", p))
            .collect::<Result<Vec<_>>>()?,
        None => Protocol::ALL.to_vec(),
    };
    let seeds = match (&raw.seeds, raw.replications) {
        (Some(_), Some(_)) => bail!(invalid(
            "seeds",
            "give either `seeds` or `replications`, not both"
        )),
        (Some(s), None) => s.clone(),
        (None, r) => {
            let r = r.unwrap_or(5);
            if r == 0 {
                bail!(invalid("replications", "must be at least 1"));
            }
            (0..r as u64).map(|i| base.seed + i).collect()
        }
    };
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if seeds.is_empty() || sorted.len() != seeds.len() {
        bail!(invalid(
            "seeds",
            "needs at least one seed and no duplicates"
        ));
    }

    let defaults = FadeSpec::default();
    let fade = FadeSpec {
        start: raw.fade_start.unwrap_or(defaults.start),
        end: raw.fade_end.unwrap_or(defaults.end),
        mean: raw.fade_mean.unwrap_or(defaults.mean),
        half_width: raw.fade_half_width.unwrap_or(defaults.half_width),
    };
    if fade.start == 0 || fade.start >= fade.end {
        bail!(invalid(
            "fade_start",
            "must satisfy 0 < fade_start < fade_end"
        ));
    }
    if let Err(e) = fade.schedule().validate() {
        bail!(invalid("fade_mean", e));
    }

    let workers = raw.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        bail!(invalid("workers", "must be at least 1"));
    }
    let spec = ExperimentSpec {
        base,
        users,
        idle_bounds,
        protocols,
        seeds,
        fade,
        out_dir: PathBuf::from(raw.out.clone().unwrap_or_else(|| "out".into())),
        workers,
    };
    spec.base
        .validate()
        .map_err(|e| anyhow!("invalid configuration: {e}"))?;
    Ok(spec)
}

/// Turns an environment value into a TOML value: numbers, booleans and
/// arrays parse as TOML, bare comma lists become arrays, anything else is a
/// string.
fn env_value(raw: &str) -> toml::Value {
    let parse = |s: &str| -> Option<toml::Value> {
        let doc: toml::Table = format!("v = {s}").parse().ok()?;
        doc.get("v").cloned()
    };
    let trimmed = raw.trim();
    if let Some(v) = parse(trimmed) {
        return v;
    }
    if trimmed.contains(',') {
        let items: Vec<toml::Value> = trimmed
            .split(',')
            .map(|s| parse(s.trim()).unwrap_or_else(|| toml::Value::String(s.trim().into())))
            .collect();
        return toml::Value::Array(items);
    }
    toml::Value::String(trimmed.into())
}

/// Parses config text and layers `env` overrides (names without the prefix
/// are ignored) on top.
pub fn parse_config<I>(text: &str, env: I) -> Result<ExperimentSpec>
where
    I: IntoIterator<Item = (String, String)>,
{
    parse_layered(text, env, Vec::new())
}

/// Like [`parse_config`], with a last layer of `(key, value)` pairs that wins
/// over both the file and the environment.
pub fn parse_layered<I>(
    text: &str,
    env: I,
    flags: Vec<(String, toml::Value)>,
) -> Result<ExperimentSpec>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut table: toml::Table = text.parse().context("config is not valid TOML")?;
    let mut overrides: Vec<(String, String)> = env
        .into_iter()
        .filter_map(|(k, v)| {
            k.strip_prefix(ENV_PREFIX)
                .map(|k| (k.to_ascii_lowercase(), v))
        })
        .collect();
    overrides.sort();
    for (key, value) in overrides {
        table.insert(key, env_value(&value));
    }
    for (key, value) in flags {
        table.insert(key, value);
    }
    let raw: RawConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| anyhow!("{}", e.message().trim()))?;
    build(raw)
}

/// Reads `path` (or starts from an empty config) and applies the process
/// environment's `RACH_*` overrides.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentSpec> {
    load_layered(path, Vec::new())
}

pub fn load_layered(
    path: Option<&Path>,
    flags: Vec<(String, toml::Value)>,
) -> Result<ExperimentSpec> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .with_context(|| format!("cannot read config file {}", p.display()))?,
        None => String::new(),
    };
    parse_layered(&text, std::env::vars(), flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentSpec> {
        parse_config(text, Vec::new())
    }

    #[test]
    fn empty_file_gives_defaults() {
        let spec = parse("").unwrap();
        assert_eq!(spec.base, SimConfig::default());
        assert_eq!(spec.users, (1..=14).collect::<Vec<_>>());
        assert_eq!(spec.idle_bounds, vec![0.05, 0.25, 0.5]);
        assert_eq!(spec.seeds, vec![1, 2, 3, 4, 5]);
        assert_eq!(spec.protocols, Protocol::ALL.to_vec());
    }

    #[test]
    fn zero_users_rejected() {
        assert!(parse("users = 0")
            .unwrap_err()
            .to_string()
            .contains("`users`"));
        assert!(parse("sweep_users = [0, 3]")
            .unwrap_err()
            .to_string()
            .contains("`sweep_users`"));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse("userz = 3").unwrap_err().to_string();
        assert!(err.contains("userz"), "{err}");
    }

    #[test]
    fn out_of_range_value_names_key() {
        let err = parse("idle_bound = 1.5").unwrap_err().to_string();
        assert!(err.contains("`idle_bound`"), "{err}");
        let err = parse("fixed_backoff = [0.5, 0.5]").unwrap_err().to_string();
        assert!(err.contains("`fixed_backoff`"), "{err}");
        let err = parse("protocol = \"xyz\"").unwrap_err().to_string();
        assert!(err.contains("`protocol`"), "{err}");
        let err = parse("seeds = [1, 1]").unwrap_err().to_string();
        assert!(err.contains("`seeds`"), "{err}");
    }

    #[test]
    fn wrong_type_is_reported() {
        let err = parse("users = \"ten\"").unwrap_err().to_string();
        assert!(
            err.contains("users") || err.contains("invalid type"),
            "{err}"
        );
    }

    #[test]
    fn env_overrides_file() {
        let env = vec![
            ("RACH_USERS".to_string(), "12".to_string()),
            ("RACH_SWEEP_USERS".to_string(), "4,8".to_string()),
            ("RACH_PROTOCOL".to_string(), "fpdb".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ];
        let spec = parse_config("users = 3\nprotocol = \"dpdb\"", env).unwrap();
        assert_eq!(spec.base.users, 12);
        assert_eq!(spec.users, vec![4, 8]);
        assert_eq!(spec.base.protocol, Protocol::Fpdb);
    }

    #[test]
    fn unknown_env_key_is_rejected() {
        let env = vec![("RACH_NOPE".to_string(), "1".to_string())];
        assert!(parse_config("", env)
            .unwrap_err()
            .to_string()
            .contains("nope"));
    }

    #[test]
    fn flags_beat_environment_and_file() {
        let env = vec![("RACH_SEED".to_string(), "7".to_string())];
        let flags = vec![("seed".to_string(), toml::Value::Integer(9))];
        let spec = parse_layered("seed = 3", env, flags).unwrap();
        assert_eq!(spec.base.seed, 9);
    }

    #[test]
    fn replications_derive_seeds_from_base_seed() {
        let spec = parse("seed = 10\nreplications = 3").unwrap();
        assert_eq!(spec.seeds, vec![10, 11, 12]);
    }

    #[test]
    fn fade_layout_checked() {
        assert!(parse("fade_start = 9000\nfade_end = 100").is_err());
        let spec = parse("fade_start = 100\nfade_end = 200\nfade_mean = 0.5").unwrap();
        let s = spec.fade.schedule();
        assert_eq!(s.mean_at(150), 0.5);
        assert_eq!(s.mean_at(250), 1.0);
    }
}
