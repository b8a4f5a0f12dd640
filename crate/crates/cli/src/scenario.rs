//! Deep-fade scenario: the fading mean drops for a while and recovers; the
//! report tracks how the broadcast power and the measured miss-detection
//! rate respond.

use anyhow::Result;
use rach_core::sim::{run, RunSummary, SlotTrace};

use crate::config::ExperimentSpec;

/// Slots after the fade ends within which the power must come back.
pub const RECOVERY_SLOTS: u64 = 3_000;
/// Pre-fade averaging span.
pub const PRE_FADE_SLOTS: u64 = 2_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FadeReport {
    pub trace: Vec<SlotTrace>,
    pub summary: RunSummary,
    pub fade_start: u64,
    pub fade_end: u64,
    pub pre_mean_power: f64,
    pub fade_mean_power: f64,
    /// First `t - fade_end` at which the trailing `W`-slot mean power is back
    /// within `2 delta2` of the pre-fade mean.
    pub recovered_after: Option<u64>,
    /// Share of fade slots whose windowed miss-detection rate is defined and
    /// below `2 DMR^H`.
    pub dmr_in_band: f64,
    pub delta2: f64,
    pub dmr_high: f64,
}

impl FadeReport {
    pub fn power_rises(&self) -> bool {
        self.fade_mean_power >= self.pre_mean_power + self.delta2
    }

    pub fn power_recovers(&self) -> bool {
        self.recovered_after.is_some_and(|t| t <= RECOVERY_SLOTS)
    }

    pub fn dmr_contained(&self) -> bool {
        self.dmr_in_band >= 0.9
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            format!(
                "fade interval            [{}, {})",
                self.fade_start, self.fade_end
            ),
            format!("pre-fade mean power      {:.3} mW", self.pre_mean_power),
            format!("fade mean power          {:.3} mW", self.fade_mean_power),
            format!(
                "recovered after          {}",
                self.recovered_after
                    .map_or("not within the run".to_string(), |t| format!("{t} slots"))
            ),
            format!(
                "fade slots with R_o < {:.3}: {:.3}",
                2.0 * self.dmr_high,
                self.dmr_in_band
            ),
        ]
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

pub fn run_fade(spec: &ExperimentSpec) -> Result<FadeReport> {
    let fade = &spec.fade;
    let mut cfg = spec.base.clone();
    cfg.fading = fade.schedule();
    cfg.slots = cfg.slots.max(fade.end + RECOVERY_SLOTS);
    cfg.validate()?;
    let out = run(&cfg)?;
    let power: Vec<f64> = out.trace.iter().map(|t| t.power_level).collect();
    let w = cfg.window as u64;

    let pre_lo = fade
        .start
        .saturating_sub(PRE_FADE_SLOTS)
        .max(w.min(fade.start - 1));
    let pre_mean_power = mean(power[pre_lo as usize..fade.start as usize].iter().copied());
    let fade_mean_power = mean(
        power[fade.start as usize..fade.end as usize]
            .iter()
            .copied(),
    );
    let band = 2.0 * cfg.power.delta2;
    let last = (fade.end + RECOVERY_SLOTS).min(cfg.slots);
    let recovered_after = (fade.end + w..=last).find_map(|t| {
        let m = mean(power[(t - w) as usize..t as usize].iter().copied());
        ((m - pre_mean_power).abs() <= band).then_some(t - fade.end)
    });
    let limit = 2.0 * cfg.power.dmr_high;
    let in_band = out.trace[fade.start as usize..fade.end as usize]
        .iter()
        .filter(|t| t.miss_detection_rate.is_some_and(|r| r < limit))
        .count();
    Ok(FadeReport {
        fade_start: fade.start,
        fade_end: fade.end,
        pre_mean_power,
        fade_mean_power,
        recovered_after,
        dmr_in_band: in_band as f64 / (fade.end - fade.start) as f64,
        delta2: cfg.power.delta2,
        dmr_high: cfg.power.dmr_high,
        summary: out.summary,
        trace: out.trace,
    })
}
