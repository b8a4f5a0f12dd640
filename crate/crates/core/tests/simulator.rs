use rach_core::model::{ActionPair, SystemState};
use rach_core::sim::{init_cell, run, run_slot, FadingSchedule, Protocol, SimConfig, Simulator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg(protocol: Protocol, users: usize, slots: u64) -> SimConfig {
    SimConfig {
        users,
        slots,
        protocol,
        ..SimConfig::default()
    }
}

fn uniform(b: f64, p: f64, n: usize) -> Vec<ActionPair<f64>> {
    vec![
        ActionPair {
            access_prob: b,
            tx_power_mw: p,
        };
        n
    ]
}

#[test]
fn effort_transitions_follow_the_class_chain() {
    // one user, always heard, no collisions possible: effort 1 -> leave with
    // probability b_1; the empirical rate should match within 4 sigma
    let mut c = cfg(Protocol::Fpfb, 1, 1);
    c.channel.cell_radius_km = 0.3;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut state = init_cell(&c, &mut rng);
    let trials = 40_000;
    let mut departures = 0u32;
    for t in 0..trials {
        state.users[0].effort = 1;
        state.recount();
        let out = run_slot(&mut state, &uniform(0.3, 500.0, 1), &c, t, &mut rng);
        departures += out.succeeded.len() as u32;
    }
    let rate = departures as f64 / trials as f64;
    let sd = (0.3f64 * 0.7 / trials as f64).sqrt();
    assert!((rate - 0.3).abs() < 4.0 * sd, "rate {rate}");
}

#[test]
fn two_user_collision_frequency_matches_pool_size() {
    let mut c = cfg(Protocol::Fpfb, 2, 1);
    c.channel.cell_radius_km = 0.3;
    c.pool_size = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut state = init_cell(&c, &mut rng);
    let trials = 40_000;
    let mut collided = 0u32;
    for t in 0..trials {
        let out = run_slot(&mut state, &uniform(1.0, 500.0, 2), &c, t, &mut rng);
        collided += u32::from(!out.collided_sequences.is_empty());
        for u in &mut state.users {
            u.effort = 1;
        }
        state.recount();
    }
    let rate = collided as f64 / trials as f64;
    let sd = (0.25f64 * 0.75 / trials as f64).sqrt();
    assert!((rate - 0.25).abs() < 4.0 * sd, "rate {rate}");
}

#[test]
fn idle_rate_of_fixed_vector_is_product_of_silences() {
    // all users pinned at effort 1 with b = 0.5 and N = 3: P(idle) = 1/8
    let c = cfg(Protocol::Fpfb, 3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut state = init_cell(&c, &mut rng);
    let trials = 40_000;
    let mut idle = 0u32;
    for t in 0..trials {
        let out = run_slot(&mut state, &uniform(0.5, 250.0, 3), &c, t, &mut rng);
        idle += u32::from(out.is_idle());
        for u in &mut state.users {
            u.effort = 1;
        }
        state.recount();
    }
    let rate = idle as f64 / trials as f64;
    let sd = (0.125f64 * 0.875 / trials as f64).sqrt();
    assert!((rate - 0.125).abs() < 4.0 * sd, "rate {rate}");
}

#[test]
fn population_is_conserved_for_every_protocol() {
    for protocol in Protocol::ALL {
        for users in [1usize, 5, 14] {
            let mut sim = Simulator::new(cfg(protocol, users, 0)).unwrap();
            for _ in 0..2_000 {
                let trace = sim.step().unwrap();
                let s: &SystemState = sim.state();
                assert_eq!(s.num_users(), users);
                assert!(trace.lyapunov >= users && trace.lyapunov <= users * s.max_effort());
                if let Some(l) = trace.contention_level {
                    assert!(l >= 1.0);
                }
                assert!(trace.power_level >= 1.0 && trace.power_level <= 500.0);
            }
            let m = sim.metrics();
            assert_eq!(m.successes + m.drops, m.replacements);
            assert!(m.detections <= m.transmissions);
        }
    }
}

#[test]
fn runs_are_reproducible_including_fading() {
    let mut c = cfg(Protocol::Dpdb, 10, 3_000);
    c.fading = FadingSchedule::deep_fade(1_000, 2_000);
    let a = run(&c).unwrap();
    let b = run(&c).unwrap();
    let rows =
        |o: &rach_core::sim::RunOutput| o.trace.iter().map(|t| t.csv_row()).collect::<Vec<_>>();
    assert_eq!(rows(&a), rows(&b));
    assert_eq!(a.summary.csv_row(), b.summary.csv_row());
}

#[test]
fn warm_up_uses_the_fixed_vector() {
    let out = run(&cfg(Protocol::Dpdb, 6, 400)).unwrap();
    assert!(out.trace[..200]
        .iter()
        .all(|t| t.contention_level.is_none() && t.power_level == 250.0));
    assert!(out.trace[200..]
        .iter()
        .all(|t| t.contention_level.is_some()));
}

#[test]
fn out_of_range_users_are_always_dropped() {
    let mut c = cfg(Protocol::Fpfb, 4, 3_000);
    c.channel.snr_threshold_db = 500.0;
    let out = run(&c).unwrap();
    assert_eq!(out.metrics.successes, 0);
    assert_eq!(out.metrics.detections, 0);
    assert!(out.metrics.drops > 0);
    assert_eq!(out.summary.drop_rate, 1.0);
}
