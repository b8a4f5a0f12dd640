//! Exact MDP over the joint effort space `{1..M}^N` of a small synthetic
//! cell, used to check the drift-sum telescoping identity, Bellman
//! optimality and the ordering between the myopic (per-slot drift
//! minimising) policy and the optimal one.
//!
//! Success law: a user transmitting at power `p` is detected with
//! probability `exp(-c / p)`; a detected user succeeds when no other
//! detected user picked its sequence, each other user `j` doing so with
//! probability `b_j d_j / K`. Users move independently given the state and
//! the broadcast action.

use rand::Rng;

use crate::controller::AccessFunction;
use crate::error::{domain, ModelError, Result};
use crate::model::drift_exact;
use crate::scalar::Real;

/// Largest joint state space the solver builds.
pub const MAX_STATES: usize = 4096;
/// Largest number of stationary policies [`brute_force_optimal`] enumerates.
pub const MAX_ENUMERATED_POLICIES: usize = 1 << 16;
/// Largest state space for which dense linear solves are used.
pub const DENSE_SOLVE_MAX_STATES: usize = 1024;

/// Broadcast pair `(L, p*)` of the synthetic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpAction<T> {
    pub level: T,
    pub power: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel<T> {
    users: usize,
    max_effort: usize,
    pool_size: usize,
    access: AccessFunction,
    ramp: T,
    p_max: T,
    outage_scale: T,
    actions: Vec<MdpAction<T>>,
    states: Vec<Vec<usize>>,
    lyapunov: Vec<T>,
    /// `kernel[s * A + a]` lists `(next_state, probability)`.
    kernel: Vec<Vec<(usize, T)>>,
    drift: Vec<T>,
}

/// Per-user transmit, detect and success probabilities in one state.
#[derive(Debug, Clone, PartialEq)]
pub struct UserLaw<T> {
    pub access: Vec<T>,
    pub detect: Vec<T>,
    pub success: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable<T> {
    /// Action index per state.
    pub actions: Vec<usize>,
    /// Value (cost-to-go, relative value or one-step drift) per state.
    pub values: Vec<T>,
}

/// Objective convention for [`solve_bellman`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convention<T> {
    /// Minimise `sum_t gamma^t drift_t`.
    Discounted(T),
    /// Minimise the long-run average drift (relative value iteration on the
    /// lazy chain `(I + P) / 2`).
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon<T> {
    /// `E[V(S_T) | S_0]`.
    Finite(usize),
    /// `lim_t E[V(S_t) | S_0]`.
    Stationary,
    /// `(1 - gamma) sum_t gamma^t E[V(S_t) | S_0]`.
    Discounted(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellmanSolution<T> {
    pub policy: PolicyTable<T>,
    pub iterations: usize,
    /// Sup-norm change of the last value-iteration sweep.
    pub last_change: T,
    /// Average drift; only set under [`Convention::Average`].
    pub gain: Option<T>,
}

fn encode(efforts: &[usize], m: usize) -> usize {
    efforts.iter().fold(0, |acc, &e| acc * m + (e - 1))
}

impl<T: Real> SyntheticModel<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        users: usize,
        max_effort: usize,
        pool_size: usize,
        access: AccessFunction,
        ramp: T,
        p_max: T,
        outage_scale: T,
        actions: Vec<MdpAction<T>>,
    ) -> Result<Self> {
        if max_effort == 0 || pool_size == 0 {
            return domain("M and K must be positive");
        }
        let n_states = max_effort
            .checked_pow(users as u32)
            .filter(|&s| s <= MAX_STATES)
            .ok_or(ModelError::Capacity {
                what: "M^N",
                got: max_effort.saturating_pow(users as u32),
                cap: MAX_STATES,
            })?;
        if actions.is_empty() {
            return domain("action grid is empty");
        }
        let min_level: T = access
            .values::<T>(max_effort)
            .into_iter()
            .fold(T::zero(), T::max);
        for a in &actions {
            if !(a.level >= min_level && a.power > T::zero() && a.power.is_finite()) {
                return domain(format!("invalid action {a:?}"));
            }
        }
        if !(outage_scale >= T::zero() && ramp >= T::zero() && p_max > T::zero()) {
            return domain("outage scale and ramp must be non-negative, p_max positive");
        }
        let states = crate::oracle::all_effort_vectors(users, max_effort);
        debug_assert_eq!(states.len(), n_states);
        let mut model = Self {
            users,
            max_effort,
            pool_size,
            access,
            ramp,
            p_max,
            outage_scale,
            lyapunov: states
                .iter()
                .map(|s| T::of_usize(s.iter().sum::<usize>()))
                .collect(),
            states,
            actions,
            kernel: Vec::new(),
            drift: Vec::new(),
        };
        model.build()?;
        Ok(model)
    }

    /// Small default instance: levels `{1, 2, 4}` times powers `{20, 250}` mW,
    /// `c = 60` mW, ramp 20 mW, `K = 3`.
    pub fn default_instance(users: usize, max_effort: usize) -> Result<Self> {
        let mut actions = Vec::new();
        for level in [1.0, 2.0, 4.0] {
            for power in [20.0, 250.0] {
                actions.push(MdpAction {
                    level: T::of_f64(level),
                    power: T::of_f64(power),
                });
            }
        }
        Self::new(
            users,
            max_effort,
            3,
            AccessFunction::default(),
            T::of_f64(20.0),
            T::of_f64(500.0),
            T::of_f64(60.0),
            actions,
        )
    }

    /// Random instance with at most `max_states` joint states.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_states: usize) -> Result<Self> {
        loop {
            let users: usize = rng.gen_range(1..=3);
            let m: usize = rng.gen_range(2..=4);
            if m.pow(users as u32) > max_states {
                continue;
            }
            let n_levels = rng.gen_range(1..=3);
            let n_powers = rng.gen_range(1..=2);
            let mut actions = Vec::new();
            for _ in 0..n_levels {
                let level = T::of_f64(rng.gen_range(1.0..6.0));
                for _ in 0..n_powers {
                    actions.push(MdpAction {
                        level,
                        power: T::of_f64(rng.gen_range(5.0..500.0)),
                    });
                }
            }
            return Self::new(
                users,
                m,
                rng.gen_range(1..=4),
                AccessFunction::default(),
                T::of_f64(rng.gen_range(0.0..40.0)),
                T::of_f64(500.0),
                T::of_f64(rng.gen_range(1.0..200.0)),
                actions,
            );
        }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn max_effort(&self) -> usize {
        self.max_effort
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[MdpAction<T>] {
        &self.actions
    }

    pub fn state(&self, s: usize) -> &[usize] {
        &self.states[s]
    }

    pub fn state_index(&self, efforts: &[usize]) -> usize {
        encode(efforts, self.max_effort)
    }

    pub fn lyapunov(&self, s: usize) -> T {
        self.lyapunov[s]
    }

    pub fn transitions(&self, s: usize, a: usize) -> &[(usize, T)] {
        &self.kernel[s * self.num_actions() + a]
    }

    /// Closed-form one-slot drift of `V` in state `s` under action `a`.
    pub fn drift(&self, s: usize, a: usize) -> T {
        self.drift[s * self.num_actions() + a]
    }

    /// Drift recomputed from the transition kernel, `sum P V' - V`.
    pub fn kernel_drift(&self, s: usize, a: usize) -> T {
        self.transitions(s, a)
            .iter()
            .map(|&(t, p)| p * self.lyapunov[t])
            .sum::<T>()
            - self.lyapunov[s]
    }

    pub fn user_law(&self, s: usize, a: usize) -> UserLaw<T> {
        let act = self.actions[a];
        let efforts = &self.states[s];
        let access: Vec<T> = efforts
            .iter()
            .map(|&m| (self.access.value::<T>(m) / act.level).min(T::one()))
            .collect();
        let detect: Vec<T> = efforts
            .iter()
            .map(|&m| {
                let p = (act.power + T::of_usize(m - 1) * self.ramp).min(self.p_max);
                (-self.outage_scale / p).exp()
            })
            .collect();
        let k = T::of_usize(self.pool_size);
        let success = (0..efforts.len())
            .map(|i| {
                let clash_free = (0..efforts.len())
                    .filter(|&j| j != i)
                    .fold(T::one(), |acc, j| {
                        acc * (T::one() - access[j] * detect[j] / k)
                    });
                detect[i] * clash_free
            })
            .collect();
        UserLaw {
            access,
            detect,
            success,
        }
    }

    fn build(&mut self) -> Result<()> {
        let n_s = self.num_states();
        let n_a = self.num_actions();
        let m = self.max_effort;
        let mut dense = vec![T::zero(); n_s];
        let mut touched = Vec::new();
        for s in 0..n_s {
            let efforts = self.states[s].clone();
            let mut counts = vec![0usize; m];
            for &e in &efforts {
                counts[e - 1] += 1;
            }
            for a in 0..n_a {
                let law = self.user_law(s, a);
                let mut class_b = vec![T::zero(); m];
                let mut class_q = vec![T::zero(); m];
                for (i, &e) in efforts.iter().enumerate() {
                    class_b[e - 1] = law.access[i];
                    class_q[e - 1] = law.success[i];
                }
                self.drift.push(drift_exact(&counts, &class_b, &class_q)?);

                // per-user next-effort distributions, then their product
                let mut next = vec![0usize; self.users];
                let outcomes = 3usize.pow(self.users as u32);
                for code in 0..outcomes {
                    let mut c = code;
                    let mut prob = T::one();
                    for (i, &e) in efforts.iter().enumerate() {
                        let (p, to) = match c % 3 {
                            0 => (T::one() - law.access[i], e),
                            1 => (law.access[i] * law.success[i], 1),
                            _ => (
                                law.access[i] * (T::one() - law.success[i]),
                                if e == m { 1 } else { e + 1 },
                            ),
                        };
                        prob = prob * p;
                        next[i] = to;
                        c /= 3;
                    }
                    if prob == T::zero() {
                        continue;
                    }
                    let t = encode(&next, m);
                    if dense[t] == T::zero() {
                        touched.push(t);
                    }
                    dense[t] = dense[t] + prob;
                }
                touched.sort_unstable();
                let row = touched.iter().map(|&t| (t, dense[t])).collect();
                for &t in &touched {
                    dense[t] = T::zero();
                }
                touched.clear();
                self.kernel.push(row);
            }
        }
        Ok(())
    }

    fn check_policy(&self, policy: &[usize]) -> Result<()> {
        if policy.len() != self.num_states() {
            return domain("policy length differs from number of states");
        }
        if let Some(&a) = policy.iter().find(|&&a| a >= self.num_actions()) {
            return domain(format!("action index {a} out of range"));
        }
        Ok(())
    }

    /// One step of the state distribution under `policy`.
    pub fn propagate(&self, mu: &[T], policy: &[usize]) -> Vec<T> {
        let mut out = vec![T::zero(); mu.len()];
        for (s, &w) in mu.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            for &(t, p) in self.transitions(s, policy[s]) {
                out[t] = out[t] + w * p;
            }
        }
        out
    }

    fn policy_matrix(&self, policy: &[usize]) -> Vec<Vec<T>> {
        let n = self.num_states();
        let mut p = vec![vec![T::zero(); n]; n];
        for (s, row) in p.iter_mut().enumerate() {
            for &(t, q) in self.transitions(s, policy[s]) {
                row[t] = q;
            }
        }
        p
    }
}

/// Solves `A x = rhs` by Gaussian elimination with partial pivoting.
pub fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut rhs: Vec<T>) -> Result<Vec<T>> {
    let n = rhs.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return domain("matrix must be square and match the right-hand side");
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() <= T::epsilon() {
            return domain("singular matrix");
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            let (upper, lower) = a.split_at_mut(row);
            for (x, &v) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x = *x - factor * v;
            }
            let v = rhs[col];
            rhs[row] = rhs[row] - factor * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let tail: T = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Stationary distribution of the chain under `policy`, from
/// `pi (P - I) = 0, sum pi = 1` (last balance equation replaced by the
/// normalisation). Requires a single recurrent class.
pub fn stationary_distribution<T: Real>(
    model: &SyntheticModel<T>,
    policy: &[usize],
) -> Result<Vec<T>> {
    model.check_policy(policy)?;
    let n = model.num_states();
    if n > DENSE_SOLVE_MAX_STATES {
        return Err(ModelError::Capacity {
            what: "states for dense solve",
            got: n,
            cap: DENSE_SOLVE_MAX_STATES,
        });
    }
    let p = model.policy_matrix(policy);
    // transpose of (P - I), last row replaced by ones
    let mut a = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            a[j][i] = p[i][j] - if i == j { T::one() } else { T::zero() };
        }
    }
    a[n - 1] = vec![T::one(); n];
    let mut rhs = vec![T::zero(); n];
    rhs[n - 1] = T::one();
    solve_dense(a, rhs)
}

const PROPAGATION_TOL: f64 = 1e-14;
const PROPAGATION_MAX_STEPS: usize = 1_000_000;

/// Performance of `policy` started in state `s0`.
pub fn performance_metric<T: Real>(
    model: &SyntheticModel<T>,
    policy: &[usize],
    s0: usize,
    horizon: Horizon<T>,
) -> Result<T> {
    model.check_policy(policy)?;
    if s0 >= model.num_states() {
        return domain("initial state out of range");
    }
    let n = model.num_states();
    let mut mu = vec![T::zero(); n];
    mu[s0] = T::one();
    let expect = |mu: &[T]| {
        mu.iter()
            .zip(&model.lyapunov)
            .map(|(&w, &v)| w * v)
            .sum::<T>()
    };
    match horizon {
        Horizon::Finite(t) => {
            for _ in 0..t {
                mu = model.propagate(&mu, policy);
            }
            Ok(expect(&mu))
        }
        Horizon::Stationary => {
            let tol = T::of_f64(PROPAGATION_TOL);
            for step in 0..PROPAGATION_MAX_STEPS {
                let next = model.propagate(&mu, policy);
                let change: T = next.iter().zip(&mu).map(|(a, b)| (*a - *b).abs()).sum();
                mu = next;
                if change <= tol {
                    return Ok(expect(&mu));
                }
                if step + 1 == PROPAGATION_MAX_STEPS {
                    return Err(ModelError::NoConvergence {
                        iterations: step + 1,
                        lo: 0.0,
                        hi: 0.0,
                        residual: change.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            unreachable!()
        }
        Horizon::Discounted(gamma) => {
            if !(gamma > T::zero() && gamma < T::one()) {
                return domain("discount factor must lie in (0, 1)");
            }
            // x = V + gamma P x; result (1 - gamma) x(s0)
            let x = discounted_solve(model, policy, &model.lyapunov, gamma)?;
            Ok((T::one() - gamma) * x[s0])
        }
    }
}

/// `x = c + gamma P_pi x`, densely when small, otherwise by iteration.
fn discounted_solve<T: Real>(
    model: &SyntheticModel<T>,
    policy: &[usize],
    cost: &[T],
    gamma: T,
) -> Result<Vec<T>> {
    let n = model.num_states();
    if n <= DENSE_SOLVE_MAX_STATES {
        let p = model.policy_matrix(policy);
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { T::one() } else { T::zero() } - gamma * p[i][j])
                    .collect()
            })
            .collect();
        return solve_dense(a, cost.to_vec());
    }
    let mut x = cost.to_vec();
    let tol = T::of_f64(1e-13);
    loop {
        let next: Vec<T> = (0..n)
            .map(|s| {
                cost[s]
                    + gamma
                        * model
                            .transitions(s, policy[s])
                            .iter()
                            .map(|&(t, p)| p * x[t])
                            .sum::<T>()
            })
            .collect();
        let change = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max);
        x = next;
        if change <= tol {
            return Ok(x);
        }
    }
}

/// `|E[V(S_T)] - V(S_0) - sum_{t<T} E[drift_t]|` under `policy` from `s0`,
/// with the drift taken from the closed form.
pub fn drift_sum_identity_check<T: Real>(
    model: &SyntheticModel<T>,
    policy: &[usize],
    s0: usize,
    horizon: usize,
) -> Result<T> {
    model.check_policy(policy)?;
    let n = model.num_states();
    let mut mu = vec![T::zero(); n];
    mu[s0] = T::one();
    let mut drift_sum = T::zero();
    for _ in 0..horizon {
        drift_sum = drift_sum
            + mu.iter()
                .enumerate()
                .map(|(s, &w)| w * model.drift(s, policy[s]))
                .sum::<T>();
        mu = model.propagate(&mu, policy);
    }
    let end: T = mu.iter().zip(&model.lyapunov).map(|(&w, &v)| w * v).sum();
    Ok((end - model.lyapunov(s0) - drift_sum).abs())
}

/// Exact discounted drift-to-go of `policy` from every state.
pub fn evaluate_policy<T: Real>(
    model: &SyntheticModel<T>,
    policy: &[usize],
    gamma: T,
) -> Result<Vec<T>> {
    model.check_policy(policy)?;
    if !(gamma > T::zero() && gamma < T::one()) {
        return domain("discount factor must lie in (0, 1)");
    }
    let cost: Vec<T> = (0..model.num_states())
        .map(|s| model.drift(s, policy[s]))
        .collect();
    discounted_solve(model, policy, &cost, gamma)
}

fn q_value<T: Real>(model: &SyntheticModel<T>, s: usize, a: usize, v: &[T], gamma: T) -> T {
    model.drift(s, a)
        + gamma
            * model
                .transitions(s, a)
                .iter()
                .map(|&(t, p)| p * v[t])
                .sum::<T>()
}

/// Lazy-chain Q value used by the average-cost convention.
fn q_value_lazy<T: Real>(model: &SyntheticModel<T>, s: usize, a: usize, h: &[T]) -> T {
    let half = T::of_f64(0.5);
    model.drift(s, a)
        + half * h[s]
        + half
            * model
                .transitions(s, a)
                .iter()
                .map(|&(t, p)| p * h[t])
                .sum::<T>()
}

fn greedy<T: Real, F: Fn(usize, usize) -> T>(n_s: usize, n_a: usize, q: F) -> (Vec<usize>, Vec<T>) {
    (0..n_s)
        .map(|s| {
            (0..n_a)
                .map(|a| (a, q(s, a)))
                .fold(
                    (0, T::infinity()),
                    |best, cur| if cur.1 < best.1 { cur } else { best },
                )
        })
        .unzip()
}

/// Value iteration until the sup-norm change is at most `tol`. Under the
/// discounted convention the greedy policy is then polished by policy
/// iteration (when the state space is small enough for dense solves), so
/// the returned values are the exact values of the returned policy.
pub fn solve_bellman<T: Real>(
    model: &SyntheticModel<T>,
    convention: Convention<T>,
    tol: T,
    max_iter: usize,
) -> Result<BellmanSolution<T>> {
    let n_s = model.num_states();
    let n_a = model.num_actions();
    let mut v = vec![T::zero(); n_s];
    let mut change = T::infinity();
    let sup = |a: &[T], b: &[T]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (*x - *y).abs())
            .fold(T::zero(), T::max)
    };
    match convention {
        Convention::Discounted(gamma) => {
            if !(gamma > T::zero() && gamma < T::one()) {
                return domain("discount factor must lie in (0, 1)");
            }
            for it in 1..=max_iter {
                let (_, next) = greedy(n_s, n_a, |s, a| q_value(model, s, a, &v, gamma));
                change = sup(&next, &v);
                v = next;
                if change <= tol {
                    let (mut actions, _) = greedy(n_s, n_a, |s, a| q_value(model, s, a, &v, gamma));
                    if n_s <= DENSE_SOLVE_MAX_STATES {
                        loop {
                            let values = evaluate_policy(model, &actions, gamma)?;
                            let improved: Vec<usize> = (0..n_s)
                                .map(|s| {
                                    let cur = q_value(model, s, actions[s], &values, gamma);
                                    let (best_a, best) = (0..n_a)
                                        .map(|a| (a, q_value(model, s, a, &values, gamma)))
                                        .fold(
                                            (actions[s], cur),
                                            |b, c| if c.1 < b.1 { c } else { b },
                                        );
                                    // only switch on a strict, non-rounding improvement
                                    if best < cur - T::of_f64(1e-12) * (T::one() + cur.abs()) {
                                        best_a
                                    } else {
                                        actions[s]
                                    }
                                })
                                .collect();
                            if improved == actions {
                                v = values;
                                break;
                            }
                            actions = improved;
                        }
                    }
                    return Ok(BellmanSolution {
                        policy: PolicyTable { actions, values: v },
                        iterations: it,
                        last_change: change,
                        gain: None,
                    });
                }
            }
        }
        Convention::Average => {
            let reference = 0;
            for it in 1..=max_iter {
                let (_, tv) = greedy(n_s, n_a, |s, a| q_value_lazy(model, s, a, &v));
                let g = tv[reference];
                let next: Vec<T> = tv.iter().map(|&x| x - g).collect();
                let diffs: Vec<T> = next.iter().zip(&v).map(|(a, b)| *a - *b).collect();
                let hi = diffs.iter().copied().fold(T::neg_infinity(), T::max);
                let lo = diffs.iter().copied().fold(T::infinity(), T::min);
                change = hi - lo;
                v = next;
                if change <= tol {
                    let (actions, _) = greedy(n_s, n_a, |s, a| q_value_lazy(model, s, a, &v));
                    return Ok(BellmanSolution {
                        policy: PolicyTable { actions, values: v },
                        iterations: it,
                        last_change: change,
                        gain: Some(g),
                    });
                }
            }
        }
    }
    Err(ModelError::NoConvergence {
        iterations: max_iter,
        lo: 0.0,
        hi: 0.0,
        residual: change.to_f64().unwrap_or(f64::NAN),
    })
}

/// `max_s |J(s) - min_a Q(s, a; J)|` for the discounted convention, or the
/// span of `h + g - T h` for the average one.
pub fn bellman_residual<T: Real>(
    model: &SyntheticModel<T>,
    convention: Convention<T>,
    solution: &BellmanSolution<T>,
) -> T {
    let v = &solution.policy.values;
    let n_a = model.num_actions();
    match convention {
        Convention::Discounted(gamma) => (0..model.num_states())
            .map(|s| {
                let best = (0..n_a)
                    .map(|a| q_value(model, s, a, v, gamma))
                    .fold(T::infinity(), T::min);
                (v[s] - best).abs()
            })
            .fold(T::zero(), T::max),
        Convention::Average => {
            let g = solution.gain.unwrap_or_else(T::zero);
            (0..model.num_states())
                .map(|s| {
                    let best = (0..n_a)
                        .map(|a| q_value_lazy(model, s, a, v))
                        .fold(T::infinity(), T::min);
                    (v[s] + g - best).abs()
                })
                .fold(T::zero(), T::max)
        }
    }
}

/// Per-state minimiser of the one-slot drift; `values` holds that drift.
pub fn myopic_policy<T: Real>(model: &SyntheticModel<T>) -> PolicyTable<T> {
    let (actions, values) = greedy(model.num_states(), model.num_actions(), |s, a| {
        model.drift(s, a)
    });
    PolicyTable { actions, values }
}

/// Best stationary policy by trying all `A^S` of them; returns the policy
/// minimising the discounted drift-to-go from every state at once, together
/// with those minimal values.
pub fn brute_force_optimal<T: Real>(model: &SyntheticModel<T>, gamma: T) -> Result<PolicyTable<T>> {
    let n_s = model.num_states();
    let n_a = model.num_actions();
    let count = n_a
        .checked_pow(n_s as u32)
        .filter(|&c| c <= MAX_ENUMERATED_POLICIES)
        .ok_or(ModelError::Capacity {
            what: "A^S policies",
            got: n_a.saturating_pow(n_s as u32),
            cap: MAX_ENUMERATED_POLICIES,
        })?;
    let mut best: Option<PolicyTable<T>> = None;
    let mut pointwise = vec![T::infinity(); n_s];
    for code in 0..count {
        let mut c = code;
        let policy: Vec<usize> = (0..n_s)
            .map(|_| {
                let a = c % n_a;
                c /= n_a;
                a
            })
            .collect();
        let values = evaluate_policy(model, &policy, gamma)?;
        for (p, &v) in pointwise.iter_mut().zip(&values) {
            *p = p.min(v);
        }
        let better = match &best {
            None => true,
            Some(b) => values.iter().copied().sum::<T>() < b.values.iter().copied().sum::<T>(),
        };
        if better {
            best = Some(PolicyTable {
                actions: policy,
                values,
            });
        }
    }
    let best = best.expect("at least one policy");
    // an optimal stationary policy attains the pointwise minimum everywhere
    let tol = T::of_f64(1e-9);
    if best
        .values
        .iter()
        .zip(&pointwise)
        .any(|(v, p)| *v - *p > tol)
    {
        return domain("no single policy attains the pointwise minimum");
    }
    Ok(best)
}
