use std::fmt::Write as _;

use super::config::Protocol;

/// Column order of the per-slot trace CSV.
pub const TRACE_COLUMNS: [&str; 11] = [
    "slot", "V", "L", "p", "idle", "N_d", "N_s", "R_c", "R_o", "drops", "bracket",
];

/// Column order of the per-run summary CSV.
pub const SUMMARY_COLUMNS: [&str; 13] = [
    "protocol",
    "N",
    "A",
    "seed",
    "mean_delay",
    "mean_power",
    "drop_rate",
    "mean_efforts",
    "mean_V",
    "idle_rate",
    "dmr",
    "cr",
    "flagged_slots",
];

/// One row of the per-slot trace. `None` renders as an empty field.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotTrace {
    pub slot: u64,
    pub lyapunov: usize,
    /// Broadcast contention level; `None` while a fixed back-off vector is used.
    pub contention_level: Option<f64>,
    pub power_level: f64,
    pub idle: bool,
    pub detected: u64,
    pub successes: u64,
    pub contention_rate: Option<f64>,
    pub miss_detection_rate: Option<f64>,
    pub drops: u64,
    pub bracket: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SlotTrace {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.slot,
            self.lyapunov,
            opt(self.contention_level),
            self.power_level,
            u8::from(self.idle),
            self.detected,
            self.successes,
            opt(self.contention_rate),
            opt(self.miss_detection_rate),
            self.drops,
            opt(self.bracket),
        )
    }
}

/// Running totals over a simulation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsAccumulator {
    pub slots: u64,
    pub idle_slots: u64,
    pub successes: u64,
    pub drops: u64,
    /// Fresh users inserted after a departure.
    pub replacements: u64,
    pub transmissions: u64,
    pub detections: u64,
    pub flagged_slots: u64,
    pub sum_delay: u64,
    pub sum_power_mw: f64,
    pub sum_efforts: u64,
    pub sum_lyapunov: u64,
}

impl MetricsAccumulator {
    pub fn departures(&self) -> u64 {
        self.successes + self.drops
    }

    fn per_success(&self, total: f64) -> f64 {
        if self.successes == 0 {
            f64::NAN
        } else {
            total / self.successes as f64
        }
    }

    /// Slots from arrival to success, back-off slots included.
    pub fn mean_delay(&self) -> f64 {
        self.per_success(self.sum_delay as f64)
    }

    /// Sum of transmit powers of all attempts of a succeeding user.
    pub fn mean_power(&self) -> f64 {
        self.per_success(self.sum_power_mw)
    }

    pub fn mean_efforts(&self) -> f64 {
        self.per_success(self.sum_efforts as f64)
    }

    pub fn drop_rate(&self) -> f64 {
        match self.departures() {
            0 => 0.0,
            d => self.drops as f64 / d as f64,
        }
    }

    pub fn mean_lyapunov(&self) -> f64 {
        match self.slots {
            0 => f64::NAN,
            s => self.sum_lyapunov as f64 / s as f64,
        }
    }

    pub fn idle_rate(&self) -> f64 {
        match self.slots {
            0 => f64::NAN,
            s => self.idle_slots as f64 / s as f64,
        }
    }

    /// Fraction of transmissions the base station missed.
    pub fn miss_detection_ratio(&self) -> f64 {
        match self.transmissions {
            0 => 0.0,
            t => 1.0 - self.detections as f64 / t as f64,
        }
    }

    /// Fraction of detected preambles that collided.
    pub fn contention_ratio(&self) -> f64 {
        match self.detections {
            0 => 0.0,
            d => 1.0 - self.successes as f64 / d as f64,
        }
    }
}

/// Per-run summary, one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub protocol: Protocol,
    pub users: usize,
    pub idle_bound: f64,
    pub seed: u64,
    pub mean_delay: f64,
    pub mean_power: f64,
    pub drop_rate: f64,
    pub mean_efforts: f64,
    pub mean_lyapunov: f64,
    pub idle_rate: f64,
    pub dmr: f64,
    pub cr: f64,
    pub flagged_slots: u64,
}

impl RunSummary {
    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.protocol,
            self.users,
            self.idle_bound,
            self.seed,
            self.mean_delay,
            self.mean_power,
            self.drop_rate,
            self.mean_efforts,
            self.mean_lyapunov,
            self.idle_rate,
            self.dmr,
            self.cr,
            self.flagged_slots,
        )
        .expect("writing to String cannot fail");
        s
    }

    /// Metric columns in `SUMMARY_COLUMNS` order, starting at `mean_delay`.
    pub fn metrics(&self) -> [f64; 8] {
        [
            self.mean_delay,
            self.mean_power,
            self.drop_rate,
            self.mean_efforts,
            self.mean_lyapunov,
            self.idle_rate,
            self.dmr,
            self.cr,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_accumulator_conventions() {
        let m = MetricsAccumulator::default();
        assert!(m.mean_delay().is_nan());
        assert_eq!(m.drop_rate(), 0.0);
        assert_eq!(m.miss_detection_ratio(), 0.0);
    }

    #[test]
    fn trace_row_has_one_field_per_column() {
        let t = SlotTrace {
            slot: 3,
            lyapunov: 12,
            contention_level: None,
            power_level: 250.0,
            idle: true,
            detected: 4,
            successes: 2,
            contention_rate: Some(0.5),
            miss_detection_rate: None,
            drops: 0,
            bracket: None,
        };
        let row = t.csv_row();
        assert_eq!(row.split(',').count(), TRACE_COLUMNS.len());
        assert_eq!(row, "3,12,,250,1,4,2,0.5,,0,");
    }
}
