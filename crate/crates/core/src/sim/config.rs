use std::fmt;
use std::str::FromStr;

use super::fading::FadingSchedule;
use crate::controller::{ContentionConfig, PowerConfig};
use crate::error::{ModelError, Result};
use crate::model::ChannelParams;

/// Protocol variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    /// Fixed power, fixed back-off vector (open loop).
    Fpfb,
    /// Fixed power, drift-minimising contention level.
    Fpdb,
    /// MIAD power level and drift-minimising contention level.
    Dpdb,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Fpfb, Protocol::Fpdb, Protocol::Dpdb];

    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Fpfb => "FPFB",
            Protocol::Fpdb => "FPDB",
            Protocol::Dpdb => "DPDB",
        }
    }

    pub fn dynamic_backoff(&self) -> bool {
        !matches!(self, Protocol::Fpfb)
    }

    pub fn dynamic_power(&self) -> bool {
        matches!(self, Protocol::Dpdb)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fpfb" => Ok(Protocol::Fpfb),
            "fpdb" => Ok(Protocol::Fpdb),
            "dpdb" => Ok(Protocol::Dpdb),
            other => Err(format!(
                "unknown protocol {other:?} (expected fpfb, fpdb or dpdb)"
            )),
        }
    }
}

/// Parameters of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub users: usize,
    pub max_effort: usize,
    pub pool_size: usize,
    pub slots: u64,
    pub window: usize,
    pub fixed_power_mw: f64,
    pub fixed_backoff: Vec<f64>,
    pub channel: ChannelParams<f64>,
    pub contention: ContentionConfig<f64>,
    /// Also carries the power ramp and `p_max` used by every protocol.
    pub power: PowerConfig<f64>,
    pub protocol: Protocol,
    pub seed: u64,
    pub fading: FadingSchedule,
    /// Users are never placed closer than this to the base station.
    pub min_distance_km: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            users: 10,
            max_effort: 5,
            pool_size: 10,
            slots: 15_000,
            window: 200,
            fixed_power_mw: 250.0,
            fixed_backoff: vec![0.5, 0.4, 0.3, 0.2, 0.1],
            channel: ChannelParams::default(),
            contention: ContentionConfig::default(),
            power: PowerConfig::default(),
            protocol: Protocol::Dpdb,
            seed: 1,
            fading: FadingSchedule::default(),
            min_distance_km: 0.01,
        }
    }
}

impl SimConfig {
    /// Collects every violated constraint, each tagged with its field name.
    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<(String, String)> = Vec::new();
        let mut bad = |field: &str, reason: String| problems.push((field.into(), reason));

        if self.max_effort == 0 {
            bad("max_effort", "must be at least 1".into());
        }
        if self.pool_size == 0 {
            bad("pool_size", "must be at least 1".into());
        }
        if self.window == 0 {
            bad("window", "must be at least 1".into());
        }
        if !(self.fixed_power_mw > 0.0 && self.fixed_power_mw <= self.power.p_max) {
            bad(
                "fixed_power",
                format!("must lie in (0, p_max], got {}", self.fixed_power_mw),
            );
        }
        if self.fixed_backoff.len() != self.max_effort {
            bad(
                "fixed_backoff",
                format!(
                    "needs {} entries, got {}",
                    self.max_effort,
                    self.fixed_backoff.len()
                ),
            );
        }
        if self.fixed_backoff.iter().any(|b| !(0.0..=1.0).contains(b)) {
            bad("fixed_backoff", "entries must be probabilities".into());
        }
        if let Err(e) = self.channel.validate() {
            bad("channel", e.to_string());
        }
        if let Err(e) = self.contention.validate() {
            bad("contention", e.to_string());
        }
        if let Err(e) = self.power.validate() {
            bad("power", e.to_string());
        }
        if let Err(e) = self.fading.validate() {
            bad("fading", e);
        }
        if !(self.min_distance_km > 0.0 && self.min_distance_km < self.channel.cell_radius_km) {
            bad("min_distance", "must lie in (0, cell_radius)".into());
        }

        match problems.len() {
            0 => Ok(()),
            _ => {
                let (fields, reasons): (Vec<_>, Vec<_>) = problems.into_iter().unzip();
                Err(ModelError::Config {
                    field: fields.join(", "),
                    reason: reasons.join("; "),
                })
            }
        }
    }
}
