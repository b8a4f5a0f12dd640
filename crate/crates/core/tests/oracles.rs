use num_rational::Ratio;
use proptest::prelude::*;
use rach_core::estimator::steady_state;
use rach_core::model::{
    class_transition_matrix, collision_given_detected, collision_prob_k_detected,
    collision_prob_oracle, drift_exact, lyapunov_of_counts, transmit_prob_exact, SequencePool,
};
use rach_core::oracle::{
    all_effort_vectors, collision_prob_by_assignment, drift_by_enumeration,
    stationary_by_power_iteration, transmit_distribution_dp,
};
use rach_core::Exact;

fn q(n: i128, d: i128) -> Exact {
    Ratio::new(n, d)
}

/// Probabilities strictly inside (0, 1) with small denominators.
fn open_prob() -> impl Strategy<Value = Exact> {
    (2i128..=24).prop_flat_map(|d| (1..d).prop_map(move |n| q(n, d)))
}

fn closed_prob() -> impl Strategy<Value = Exact> {
    (1i128..=24).prop_flat_map(|d| (0..=d).prop_map(move |n| q(n, d)))
}

proptest! {
    #[test]
    fn fewer_transmissions_mean_fewer_collisions(
        b in prop::collection::vec(open_prob(), 1..=4),
        k in 2usize..=4,
    ) {
        let n = b.len();
        prop_assume!(k <= n);
        let pool = SequencePool::default();
        let partial = collision_prob_k_detected(&b, k, pool).unwrap();
        let full = collision_prob_k_detected(&vec![Exact::from_integer(1); n], k, pool).unwrap();
        prop_assert!(partial < full);
    }

    #[test]
    fn transmit_distribution_sums_to_one(b in prop::collection::vec(closed_prob(), 0..=8)) {
        let total: Exact = (0..=b.len()).map(|j| transmit_prob_exact(&b, j).unwrap()).sum();
        prop_assert_eq!(total, Exact::from_integer(1));
        let dp = transmit_distribution_dp(&b);
        for (j, d) in dp.iter().enumerate() {
            prop_assert_eq!(*d, transmit_prob_exact(&b, j).unwrap());
        }
    }

    #[test]
    fn class_rows_sum_to_one_exactly(
        bq in prop::collection::vec((closed_prob(), closed_prob()), 1..=6),
    ) {
        let (b, qs): (Vec<_>, Vec<_>) = bq.into_iter().unzip();
        let p = class_transition_matrix(&b, &qs).unwrap();
        for i in 0..p.dim() {
            prop_assert_eq!(p.row(i).iter().copied().sum::<Exact>(), Exact::from_integer(1));
        }
    }

    #[test]
    fn collision_oracles_agree(
        bd in prop::collection::vec((closed_prob(), closed_prob()), 1..=3),
        k in 1usize..=4,
    ) {
        let (b, d): (Vec<_>, Vec<_>) = bd.into_iter().unzip();
        let closed = collision_prob_oracle(&b, &d, SequencePool::new(k).unwrap()).unwrap();
        let listed = collision_prob_by_assignment(&b, &d, k).unwrap();
        prop_assert_eq!(closed, listed);
    }

    #[test]
    fn steady_state_is_the_chain_fixed_point(
        rs in prop::collection::vec(0.0f64..=1.0, 5),
        level in 1.0f64..8.0,
    ) {
        let f: Vec<f64> = (1..=5).map(|m| 1.0 / m as f64).collect();
        let ratios: Vec<f64> = f.iter().map(|v| f[0] / v).collect();
        let pi = steady_state(&rs, &ratios).unwrap();
        let b: Vec<f64> = f.iter().map(|v| v / level).collect();
        let chain = class_transition_matrix(&b, &rs).unwrap();
        let moved = chain.left_mul(&pi);
        for (a, c) in moved.iter().zip(&pi) {
            prop_assert!((a - c).abs() <= 1e-10);
        }
        let pow = stationary_by_power_iteration(&chain, 1e-15, 1_000_000);
        if let Ok(pow) = pow {
            for (a, c) in pow.iter().zip(&pi) {
                prop_assert!((a - c).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn single_detection_never_collides() {
    // with one detected preamble the collision probability is 0 for every b,
    // so the strict inequality above starts at k = 2
    let pool = SequencePool::default();
    for n in 1..=4 {
        let b = vec![q(1, 3); n];
        assert_eq!(
            collision_prob_k_detected(&b, 1, pool).unwrap(),
            Exact::from_integer(0)
        );
    }
}

#[test]
fn collision_given_detected_monotone() {
    for size in 1..=64usize {
        let pool = SequencePool::new(size).unwrap();
        for k in 0..10 {
            let a: f64 = collision_given_detected(k, pool);
            let b: f64 = collision_given_detected(k + 1, pool);
            assert!(a <= b);
            if size > 1 {
                let smaller: f64 =
                    collision_given_detected(k, SequencePool::new(size - 1).unwrap());
                assert!(a <= smaller);
            }
        }
    }
}

#[test]
fn drift_matches_enumeration_on_every_state() {
    // M^N = 4^4 = 256 joint states, 3^4 outcomes each
    let (n, m) = (4usize, 4usize);
    let b = [q(1, 1), q(1, 2), q(1, 3), q(1, 4)];
    let qs = [q(3, 5), q(1, 2), q(2, 7), q(1, 9)];
    for efforts in all_effort_vectors(n, m) {
        let mut counts = vec![0usize; m];
        for &e in &efforts {
            counts[e - 1] += 1;
        }
        let v = lyapunov_of_counts(&counts);
        assert!(v >= n && v <= m * n);
        let closed = drift_exact(&counts, &b, &qs).unwrap();
        let ub: Vec<Exact> = efforts.iter().map(|&e| b[e - 1]).collect();
        let uq: Vec<Exact> = efforts.iter().map(|&e| qs[e - 1]).collect();
        assert_eq!(closed, drift_by_enumeration(&efforts, m, &ub, &uq).unwrap());
    }
}
