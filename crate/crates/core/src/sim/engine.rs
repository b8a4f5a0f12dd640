use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Protocol, SimConfig};
use super::metrics::{MetricsAccumulator, RunSummary, SlotTrace};
use crate::controller::{decide_contention, miad_update, user_action, BroadcastInfo};
use crate::error::Result;
use crate::estimator::{rates, steady_state, MeasurementWindow, SlotEvents};
use crate::model::{detect, lyapunov, snr_db, ActionPair, Position, SystemState, UserState};

/// A user leaving the cell after a success or a drop.
#[derive(Debug, Clone, PartialEq)]
pub struct Departure {
    pub user: usize,
    pub effort: usize,
    pub succeeded: bool,
    pub delay_slots: u64,
    pub power_mw: f64,
}

/// What happened in one slot. All indices refer to positions in
/// `SystemState::users` at the start of the slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotOutcome {
    pub transmitting: Vec<usize>,
    pub detected: Vec<usize>,
    /// Sequences picked by more than one detected user.
    pub collided_sequences: Vec<usize>,
    pub succeeded: Vec<usize>,
    /// Transmitted and failed below the last effort.
    pub failed: Vec<usize>,
    pub backed_off: Vec<usize>,
    pub departures: Vec<Departure>,
}

impl SlotOutcome {
    pub fn is_idle(&self) -> bool {
        self.transmitting.is_empty()
    }

    pub fn drops(&self) -> u64 {
        self.departures.iter().filter(|d| !d.succeeded).count() as u64
    }
}

/// Uniform over the annulus `[min_distance, radius]` around the base station.
fn draw_position<R: Rng + ?Sized>(rng: &mut R, radius: f64, min_distance: f64) -> Position {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let r =
        (u * (radius * radius - min_distance * min_distance) + min_distance * min_distance).sqrt();
    let theta = std::f64::consts::TAU * v;
    Position {
        x_km: r * theta.cos(),
        y_km: r * theta.sin(),
    }
}

/// `N` users placed uniformly in the cell, all at effort 1.
pub fn init_cell<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> SystemState {
    let users = (0..cfg.users)
        .map(|_| {
            let pos = draw_position(rng, cfg.channel.cell_radius_km, cfg.min_distance_km);
            UserState::fresh(pos, 0)
        })
        .collect();
    SystemState::new(users, cfg.max_effort).expect("fresh users start at effort 1")
}

/// Plays one slot and advances `state` in place.
///
/// Random draws happen in a fixed order: for every user in index order one
/// uniform for the transmit decision, then for transmitters the sequence
/// index and the fading factor; afterwards two uniforms per departing user
/// (index order) for the replacement's position.
pub fn run_slot<R: Rng + ?Sized>(
    state: &mut SystemState,
    actions: &[ActionPair<f64>],
    cfg: &SimConfig,
    slot: u64,
    rng: &mut R,
) -> SlotOutcome {
    assert_eq!(actions.len(), state.num_users(), "one action per user");
    let mut out = SlotOutcome::default();
    let ch = &cfg.channel;

    for (i, (user, action)) in state.users.iter_mut().zip(actions).enumerate() {
        user.sequence = None;
        user.transmitted = rng.gen::<f64>() < action.access_prob;
        if !user.transmitted {
            out.backed_off.push(i);
            continue;
        }
        out.transmitting.push(i);
        user.sequence = Some(rng.gen_range(0..cfg.pool_size));
        let beta = ch.fading_factor * cfg.fading.eval(slot, rng);
        user.power_spent_mw += action.tx_power_mw;
        let distance = user.position.distance_km();
        let heard = snr_db(action.tx_power_mw, distance, beta, ch)
            .map(|snr| detect(snr, ch))
            .unwrap_or(false);
        if heard {
            out.detected.push(i);
        }
    }

    let mut picks = vec![0usize; cfg.pool_size];
    for &i in &out.detected {
        picks[state.users[i].sequence.expect("detected users transmitted")] += 1;
    }
    out.collided_sequences = (0..cfg.pool_size).filter(|&s| picks[s] > 1).collect();

    let max_effort = state.max_effort();
    let mut detected = out.detected.iter().peekable();
    for &i in &out.transmitting {
        let is_detected = detected.next_if_eq(&&i).is_some();
        let user = &mut state.users[i];
        let success = is_detected && picks[user.sequence.expect("transmitted")] == 1;
        if success || user.effort == max_effort {
            if success {
                out.succeeded.push(i);
            }
            out.departures.push(Departure {
                user: i,
                effort: user.effort,
                succeeded: success,
                delay_slots: slot + 1 - user.arrived_at,
                power_mw: user.power_spent_mw,
            });
        } else {
            out.failed.push(i);
            user.effort += 1;
        }
    }

    for d in &out.departures {
        let pos = draw_position(rng, ch.cell_radius_km, cfg.min_distance_km);
        state.users[d.user] = UserState::fresh(pos, slot + 1);
    }
    state.recount();
    out
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub metrics: MetricsAccumulator,
    pub trace: Vec<SlotTrace>,
}

/// Base station plus cell, advanced one slot at a time.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: SimConfig,
    rng: ChaCha8Rng,
    state: SystemState,
    window: MeasurementWindow,
    power_level: f64,
    contention_level: f64,
    /// Last defined `R^s_m`; undefined rates reuse these.
    success_rates: Vec<f64>,
    backoff_ratios: Vec<f64>,
    slot: u64,
    metrics: MetricsAccumulator,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let state = init_cell(&cfg, &mut rng);
        let window = MeasurementWindow::new(cfg.window, cfg.max_effort)?;
        let f = cfg.contention.access.values::<f64>(cfg.max_effort);
        Ok(Self {
            rng,
            state,
            window,
            power_level: cfg.fixed_power_mw,
            contention_level: crate::controller::l_min(&f),
            success_rates: vec![1.0; cfg.max_effort],
            backoff_ratios: cfg.contention.access.backoff_ratios(cfg.max_effort),
            slot: 0,
            metrics: MetricsAccumulator::default(),
            cfg,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn window(&self) -> &MeasurementWindow {
        &self.window
    }

    pub fn metrics(&self) -> &MetricsAccumulator {
        &self.metrics
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    fn fixed_actions(&self) -> Vec<ActionPair<f64>> {
        let power = &self.cfg.power;
        self.state
            .users
            .iter()
            .map(|u| ActionPair {
                access_prob: self.cfg.fixed_backoff[u.effort - 1],
                tx_power_mw: (self.cfg.fixed_power_mw + (u.effort - 1) as f64 * power.ramp)
                    .min(power.p_max),
            })
            .collect()
    }

    /// Steps 1-4 at the base station. Returns the broadcast pair, or `None`
    /// while the fixed back-off vector is in force (FPFB, or the first `W`
    /// slots of the adaptive variants), plus the bracket value and a flag.
    fn broadcast(&mut self) -> Result<(Option<BroadcastInfo<f64>>, Option<f64>, bool)> {
        if !self.cfg.protocol.dynamic_backoff() || !self.window.is_full() {
            return Ok((None, None, false));
        }
        let est = rates::<f64>(&self.window);
        for (last, r) in self.success_rates.iter_mut().zip(&est.success_per_effort) {
            if let Some(r) = r {
                *last = *r;
            }
        }
        let pi = steady_state(&self.success_rates, &self.backoff_ratios)?;
        let arrival = self.window.successes() as f64 / self.window.window_len() as f64;
        let (bracket, flagged) = if arrival > 0.0 {
            let d = decide_contention(&pi, arrival, &self.success_rates, &self.cfg.contention)?;
            self.contention_level = d.level;
            (Some(d.bracket), d.flagged)
        } else {
            (None, true)
        };
        if self.cfg.protocol.dynamic_power() {
            self.power_level = miad_update(self.power_level, est.miss_detection, &self.cfg.power);
        }
        let info = BroadcastInfo {
            contention_level: self.contention_level,
            power_level: self.power_level,
        };
        Ok((Some(info), bracket, flagged))
    }

    /// Runs one full slot: broadcast, user actions, channel, measurement.
    pub fn step(&mut self) -> Result<SlotTrace> {
        let v = lyapunov(&self.state);
        let (info, bracket, flagged) = self.broadcast()?;
        let actions = match &info {
            None => self.fixed_actions(),
            Some(info) => self
                .state
                .users
                .iter()
                .map(|u| {
                    user_action(
                        u.effort,
                        info,
                        &self.cfg.contention.access,
                        self.cfg.power.ramp,
                        self.cfg.power.p_max,
                    )
                })
                .collect(),
        };

        let outcome = run_slot(
            &mut self.state,
            &actions,
            &self.cfg,
            self.slot,
            &mut self.rng,
        );

        let reports: Vec<usize> = outcome
            .departures
            .iter()
            .filter(|d| d.succeeded)
            .map(|d| d.effort)
            .collect();
        self.window.record_slot(&SlotEvents {
            detected: outcome.detected.len() as u64,
            successes: reports.len() as u64,
            success_reports: reports,
        })?;

        let m = &mut self.metrics;
        m.slots += 1;
        m.sum_lyapunov += v as u64;
        m.idle_slots += u64::from(outcome.is_idle());
        m.transmissions += outcome.transmitting.len() as u64;
        m.detections += outcome.detected.len() as u64;
        m.flagged_slots += u64::from(flagged);
        for d in &outcome.departures {
            m.replacements += 1;
            if d.succeeded {
                m.successes += 1;
                m.sum_delay += d.delay_slots;
                m.sum_power_mw += d.power_mw;
                m.sum_efforts += d.effort as u64;
            } else {
                m.drops += 1;
            }
        }

        let est = rates::<f64>(&self.window);
        let trace = SlotTrace {
            slot: self.slot,
            lyapunov: v,
            contention_level: info.map(|i| i.contention_level),
            power_level: info.map_or(self.cfg.fixed_power_mw, |i| i.power_level),
            idle: outcome.is_idle(),
            detected: self.window.detected(),
            successes: self.window.successes(),
            contention_rate: est.contention,
            miss_detection_rate: est.miss_detection,
            drops: outcome.drops(),
            bracket,
        };
        self.slot += 1;
        Ok(trace)
    }

    pub fn summary(&self) -> RunSummary {
        let m = &self.metrics;
        RunSummary {
            protocol: self.cfg.protocol,
            users: self.cfg.users,
            idle_bound: self.cfg.contention.idle_bound,
            seed: self.cfg.seed,
            mean_delay: m.mean_delay(),
            mean_power: m.mean_power(),
            drop_rate: m.drop_rate(),
            mean_efforts: m.mean_efforts(),
            mean_lyapunov: m.mean_lyapunov(),
            idle_rate: m.idle_rate(),
            dmr: m.miss_detection_ratio(),
            cr: m.contention_ratio(),
            flagged_slots: m.flagged_slots,
        }
    }
}

/// Runs `cfg.slots` slots and collects the summary and per-slot trace.
pub fn run(cfg: &SimConfig) -> Result<RunOutput> {
    let mut sim = Simulator::new(cfg.clone())?;
    let mut trace = Vec::with_capacity(cfg.slots as usize);
    for _ in 0..cfg.slots {
        trace.push(sim.step()?);
    }
    Ok(RunOutput {
        summary: sim.summary(),
        metrics: sim.metrics.clone(),
        trace,
    })
}

impl Protocol {
    /// Convenience for sweeps: the same config under another protocol.
    pub fn apply(self, cfg: &SimConfig) -> SimConfig {
        SimConfig {
            protocol: self,
            ..cfg.clone()
        }
    }
}
