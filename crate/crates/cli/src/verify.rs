//! Verification suites: exact oracles for the probability model and the
//! estimator, controller checks against brute force, and the MDP checks.

use std::fmt;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rach_core::controller::{
    decide_contention, idle_log_probability, l_max, miad_update, ContentionConfig, PowerConfig,
};
use rach_core::estimator::steady_state;
use rach_core::mdp::{
    bellman_residual, brute_force_optimal, drift_sum_identity_check, evaluate_policy,
    myopic_policy, performance_metric, solve_bellman, Convention, Horizon, SyntheticModel,
};
use rach_core::model::{
    class_transition_matrix, collision_prob_k_detected, collision_prob_oracle, drift_exact,
    transmit_prob_exact, SequencePool,
};
use rach_core::oracle::{
    all_effort_vectors, collision_prob_by_assignment, drift_by_enumeration, grid_argmin,
    stationary_by_power_iteration, transmit_distribution_dp,
};
use rach_core::{Exact, ModelError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn timed(name: &'static str, f: impl FnOnce() -> Vec<Check>) -> Self {
        let start = Instant::now();
        let checks = f();
        Self {
            name,
            checks,
            elapsed: start.elapsed(),
        }
    }
}

fn open_ratio<R: Rng>(rng: &mut R) -> Exact {
    let d: i128 = rng.gen_range(2..=50);
    Ratio::new(rng.gen_range(1..d), d)
}

fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Model and estimator oracles.
pub fn oracle_suite(seed: u64) -> SuiteReport {
    SuiteReport::timed("oracles", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = SequencePool::default();
        let one = Exact::from_integer(1);
        let zero = Exact::from_integer(0);
        let mut checks = Vec::new();

        // back-off lowers the collision probability for every k >= 2; with a
        // single detection both sides are zero
        let (mut strict, mut single_zero, mut cases, mut worst) = (true, true, 0, String::new());
        for n in 1..=4usize {
            for _ in 0..100 {
                let b: Vec<Exact> = (0..n).map(|_| open_ratio(&mut rng)).collect();
                for k in 1..=n {
                    cases += 1;
                    let partial = collision_prob_k_detected(&b, k, pool).unwrap();
                    let full = collision_prob_k_detected(&vec![one; n], k, pool).unwrap();
                    if k == 1 {
                        single_zero &= partial == zero && full == zero;
                    } else if partial >= full {
                        strict = false;
                        worst = format!("b = {b:?}, k = {k}");
                    }
                }
            }
        }
        checks.push(Check::new(
            "collision drops strictly under back-off (k >= 2)",
            strict,
            if strict {
                format!("{cases} exact cases")
            } else {
                worst
            },
        ));
        checks.push(Check::new(
            "single detection never collides (k = 1)",
            single_zero,
            "both sides exactly 0",
        ));

        let mut normal = true;
        for _ in 0..100 {
            let n = rng.gen_range(1..=8);
            let b: Vec<Exact> = (0..n).map(|_| open_ratio(&mut rng)).collect();
            let total: Exact = (0..=n).map(|j| transmit_prob_exact(&b, j).unwrap()).sum();
            let dp = transmit_distribution_dp(&b);
            normal &= total == one
                && dp
                    .iter()
                    .enumerate()
                    .all(|(j, &d)| d == transmit_prob_exact(&b, j).unwrap());
        }
        checks.push(Check::new(
            "transmitter-count law sums to 1",
            normal,
            "100 exact vectors, agrees with the one-user-at-a-time recursion",
        ));

        let mut rows = true;
        for _ in 0..100 {
            let m = rng.gen_range(1..=8);
            let b: Vec<Exact> = (0..m).map(|_| open_ratio(&mut rng)).collect();
            let qs: Vec<Exact> = (0..m).map(|_| open_ratio(&mut rng)).collect();
            let p = class_transition_matrix(&b, &qs).unwrap();
            rows &= (0..m).all(|i| p.row(i).iter().copied().sum::<Exact>() == one);
        }
        checks.push(Check::new(
            "transition rows sum to 1",
            rows,
            "100 exact matrices",
        ));

        let mut agree = true;
        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=4);
            let b: Vec<Exact> = (0..n).map(|_| open_ratio(&mut rng)).collect();
            let d: Vec<Exact> = (0..n).map(|_| open_ratio(&mut rng)).collect();
            let p = SequencePool::new(k).unwrap();
            agree &= collision_prob_oracle(&b, &d, p).unwrap()
                == collision_prob_by_assignment(&b, &d, k).unwrap();
        }
        checks.push(Check::new(
            "collision law matches sequence enumeration",
            agree,
            "50 exact instances",
        ));

        let (m, n) = (4usize, 6usize);
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
        let qs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut worst = 0.0f64;
        for efforts in all_effort_vectors(n, m) {
            let mut counts = vec![0usize; m];
            for &e in &efforts {
                counts[e - 1] += 1;
            }
            let ub: Vec<f64> = efforts.iter().map(|&e| b[e - 1]).collect();
            let uq: Vec<f64> = efforts.iter().map(|&e| qs[e - 1]).collect();
            let closed = drift_exact(&counts, &b, &qs).unwrap();
            worst =
                worst.max((closed - drift_by_enumeration(&efforts, m, &ub, &uq).unwrap()).abs());
        }
        checks.push(Check::new(
            "drift closed form vs full enumeration",
            worst <= 1e-10,
            format!("M^N = {} states, max error {worst:.2e}", m.pow(n as u32)),
        ));

        let mut worst = 0.0f64;
        for _ in 0..100 {
            let m = rng.gen_range(1..=8);
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..0.9)).collect();
            let rs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..0.9)).collect();
            let ratios: Vec<f64> = b.iter().map(|v| b[0] / v).collect();
            let pi = steady_state(&rs, &ratios).unwrap();
            let chain = class_transition_matrix(&b, &rs).unwrap();
            let eig = stationary_by_power_iteration(&chain, 1e-15, 10_000_000).unwrap();
            for (a, c) in pi.iter().zip(&eig) {
                worst = worst.max((a - c).abs());
            }
        }
        checks.push(Check::new(
            "steady state vs left eigenvector",
            worst <= 1e-10,
            format!("100 chains, max error {worst:.2e}"),
        ));
        checks
    })
}

/// Contention-level choice against grid search, idle-bound root residuals
/// and the MIAD worked examples.
pub fn controller_suite(seed: u64) -> SuiteReport {
    SuiteReport::timed("controller", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checks = Vec::new();
        let (mut argmin_ok, mut residual_worst, mut mismatch) = (0, 0.0f64, None);
        // roots closer to the pole at L_min than one ulp cannot be met to any
        // residual in f64; the solver reports them with a one-ulp bracket
        let (mut converged, mut ulp_limited, mut unexplained) = (0, 0, 0);
        let instances = 50;
        for i in 0..instances {
            let m = rng.gen_range(2..=8);
            let pi = random_simplex(&mut rng, m);
            let arrival = rng.gen_range(0.05..2.0);
            let rs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            let cfg = ContentionConfig {
                idle_bound: rng.gen_range(0.01..0.6),
                ..ContentionConfig::default()
            };
            let d = decide_contention(&pi, arrival, &rs, &cfg).unwrap();
            let f = cfg.access.values::<f64>(m);
            match l_max(&pi, arrival, &f, cfg.idle_bound, cfg.root_tolerance) {
                Ok(ub) if ub.feasible => {
                    converged += 1;
                    let r = idle_log_probability(&pi, arrival, &f, ub.value) - cfg.idle_bound.ln();
                    residual_worst = residual_worst.max(r.abs());
                }
                Err(ModelError::NoConvergence { lo, hi, .. }) if hi.next_down() <= lo => {
                    ulp_limited += 1
                }
                _ => unexplained += 1,
            }
            let (x, _) = grid_argmin(|l| d.bracket / l, d.l_min, d.l_max, 10_000);
            if x == d.level {
                argmin_ok += 1;
            } else if mismatch.is_none() {
                mismatch = Some(format!("instance {i}: chose {} vs grid {x}", d.level));
            }
        }
        checks.push(Check::new(
            "optimal level equals grid argmin",
            argmin_ok == instances,
            mismatch.unwrap_or(format!("{instances} instances, 10^4 grid points")),
        ));
        checks.push(Check::new(
            "idle-bound root residual",
            residual_worst <= 1e-9 && unexplained == 0,
            format!(
                "{converged} roots with max |log residual| {residual_worst:.2e}; \
                 {ulp_limited} roots within one ulp of L_min (bracket of adjacent doubles); \
                 {unexplained} other failures"
            ),
        ));

        let pc = PowerConfig::<f64>::default();
        let examples = [
            (Some(0.04), 250.05),
            (Some(0.02), 242.0),
            (Some(0.03), 250.0),
        ];
        let got: Vec<f64> = examples
            .iter()
            .map(|(r, _)| miad_update(250.0, *r, &pc))
            .collect();
        let exact = examples.iter().zip(&got).all(|((_, want), g)| g == want);
        checks.push(Check::new(
            "power update worked examples",
            exact,
            format!("250 -> {:?}", got),
        ));
        checks
    })
}

/// Drift telescoping, Bellman fixed point and the myopic-vs-optimal ordering.
pub fn mdp_suite(seed: u64) -> SuiteReport {
    SuiteReport::timed("mdp", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gamma = 0.999;
        let tol = 1e-9;
        let mut checks = Vec::new();
        let (mut tele, mut resid, mut gap) = (0.0f64, 0.0f64, f64::INFINITY);
        let mut errors = Vec::new();
        for i in 0..20 {
            let model = SyntheticModel::<f64>::random(&mut rng, 64).unwrap();
            let policy: Vec<usize> = (0..model.num_states())
                .map(|_| rng.gen_range(0..model.num_actions()))
                .collect();
            let s0 = rng.gen_range(0..model.num_states());
            let horizon = rng.gen_range(1..=200);
            tele = tele.max(drift_sum_identity_check(&model, &policy, s0, horizon).unwrap());
            let conv = Convention::Discounted(gamma);
            match solve_bellman(&model, conv, tol, 10_000_000) {
                Ok(sol) => {
                    resid = resid.max(bellman_residual(&model, conv, &sol));
                    let myopic = myopic_policy(&model);
                    let jm = evaluate_policy(&model, &myopic.actions, gamma).unwrap();
                    for (m, o) in jm.iter().zip(&sol.policy.values) {
                        gap = gap.min(m - o);
                    }
                    let pm =
                        performance_metric(&model, &myopic.actions, s0, Horizon::Discounted(gamma))
                            .unwrap();
                    let po = performance_metric(
                        &model,
                        &sol.policy.actions,
                        s0,
                        Horizon::Discounted(gamma),
                    )
                    .unwrap();
                    gap = gap.min(pm - po);
                }
                Err(e) => errors.push(format!("instance {i}: {e}")),
            }
        }
        checks.push(Check::new(
            "drift sums telescope",
            tele <= 1e-9,
            format!("20 random (model, policy, T <= 200), max residual {tele:.2e}"),
        ));
        checks.push(Check::new(
            "Bellman residual within tolerance",
            errors.is_empty() && resid <= tol,
            if errors.is_empty() {
                format!("max residual {resid:.2e} (tol {tol:.0e})")
            } else {
                errors.join("; ")
            },
        ));
        checks.push(Check::new(
            "myopic no better than optimal",
            gap >= -1e-9,
            format!("min (myopic - optimal) {gap:.3e}"),
        ));

        let small = SyntheticModel::<f64>::default_instance(1, 2).unwrap();
        let brute = brute_force_optimal(&small, gamma).unwrap();
        let sol = solve_bellman(&small, Convention::Discounted(gamma), tol, 10_000_000).unwrap();
        let diff = brute
            .values
            .iter()
            .zip(&sol.policy.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(
            "value iteration matches policy enumeration (M=2, N=1)",
            diff <= 1e-7,
            format!(
                "{} policies enumerated, max value gap {diff:.2e}",
                small.num_actions().pow(small.num_states() as u32)
            ),
        ));

        let pair = SyntheticModel::<f64>::default_instance(2, 2).unwrap();
        let avg = solve_bellman(&pair, Convention::Average, tol, 10_000_000).unwrap();
        let myopic = myopic_policy(&pair);
        let pm = performance_metric(&pair, &myopic.actions, 0, Horizon::Stationary).unwrap();
        let po = performance_metric(&pair, &avg.policy.actions, 0, Horizon::Stationary).unwrap();
        checks.push(Check::new(
            "long-run ordering on the default M=2, N=2 instance",
            pm >= po - 1e-9,
            format!("myopic {pm:.6}, optimal {po:.6}"),
        ));
        checks
    })
}

pub fn all_suites(seed: u64) -> Vec<SuiteReport> {
    vec![oracle_suite(seed), controller_suite(seed), mdp_suite(seed)]
}
