//! Contention-level selection, MIAD power control and the user-side action
//! rule.
//!
//! The base station estimates the drift objective `D(L) = bracket / L`
//! where `bracket = sum_m pi_m (N_s/W) f(m) (1 - m R^s_m)`. Its sign decides
//! whether the smallest feasible contention level (`max f`) or the largest
//! one allowed by the idle-slot constraint is optimal.

use crate::error::{domain, ModelError, Result};
use crate::model::ActionPair;
use crate::scalar::{Real, Scalar};

/// Access function `f(m)`; users at effort `m` transmit with `min(f(m)/L, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccessFunction {
    /// `m^-a`
    PowerLaw { exponent: f64 },
    /// `2^(1-m)`
    Exponential,
}

impl Default for AccessFunction {
    fn default() -> Self {
        AccessFunction::PowerLaw { exponent: 1.0 }
    }
}

impl AccessFunction {
    pub fn value<T: Real>(&self, effort: usize) -> T {
        let m = T::of_usize(effort);
        match *self {
            AccessFunction::PowerLaw { exponent } => m.powf(-T::of_f64(exponent)),
            AccessFunction::Exponential => T::of_f64(2.0).powf(T::one() - m),
        }
    }

    /// `f(1..=M)`
    pub fn values<T: Real>(&self, max_effort: usize) -> Vec<T> {
        (1..=max_effort).map(|m| self.value(m)).collect()
    }

    /// `b_1 / b_m = f(1) / f(m)`, valid whenever no class is capped at 1.
    pub fn backoff_ratios<T: Real>(&self, max_effort: usize) -> Vec<T> {
        let f = self.values::<T>(max_effort);
        f.iter().map(|&v| f[0] / v).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentionConfig<T> {
    pub access: AccessFunction,
    /// Upper bound on the idle-slot probability.
    pub idle_bound: T,
    /// Tolerance on the log-residual of the idle constraint root.
    pub root_tolerance: T,
}

impl<T: Real> Default for ContentionConfig<T> {
    fn default() -> Self {
        Self {
            access: AccessFunction::default(),
            idle_bound: T::of_f64(0.05),
            root_tolerance: T::of_f64(1e-9),
        }
    }
}

impl<T: Real> ContentionConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.idle_bound > T::zero() && self.idle_bound < T::one()) {
            return domain(format!("idle bound {:?} outside (0, 1)", self.idle_bound));
        }
        if !(self.root_tolerance > T::zero()) {
            return domain("root tolerance must be positive");
        }
        if let AccessFunction::PowerLaw { exponent } = self.access {
            if !exponent.is_finite() {
                return domain("access function exponent must be finite");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig<T> {
    /// Multiplicative increase factor.
    pub delta1: T,
    /// Additive decrease step (mW).
    pub delta2: T,
    /// Per-effort power ramp (mW).
    pub ramp: T,
    pub dmr_high: T,
    pub dmr_low: T,
    pub p_max: T,
    pub p_min: T,
}

impl<T: Real> Default for PowerConfig<T> {
    fn default() -> Self {
        Self {
            delta1: T::of_f64(2e-4),
            delta2: T::of_f64(8.0),
            ramp: T::of_f64(20.0),
            dmr_high: T::of_f64(0.035),
            dmr_low: T::of_f64(0.025),
            p_max: T::of_f64(500.0),
            p_min: T::of_f64(1.0),
        }
    }
}

impl<T: Real> PowerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: &str| {
            Err(ModelError::Config {
                field: field.into(),
                reason: reason.into(),
            })
        };
        if !(self.dmr_low < self.dmr_high) {
            return bad("dmr_low", "must be below dmr_high");
        }
        if !(self.delta1 > T::zero()) {
            return bad("delta1", "must be positive");
        }
        if !(self.delta2 > T::zero()) {
            return bad("delta2", "must be positive");
        }
        if !(self.ramp >= T::zero()) {
            return bad("ramp", "must be non-negative");
        }
        if !(self.p_min >= T::zero() && self.p_min < self.p_max) {
            return bad("p_min", "must satisfy 0 <= p_min < p_max");
        }
        Ok(())
    }

    pub fn clamp(&self, p: T) -> T {
        p.max(self.p_min).min(self.p_max)
    }
}

/// What the base station broadcasts each slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadcastInfo<T> {
    pub contention_level: T,
    pub power_level: T,
}

/// Square-bracket term of the estimated objective. Undefined success rates
/// must already be substituted by the caller.
pub fn bracket<T: Real>(pi: &[T], arrival: T, f: &[T], r_s: &[T]) -> T {
    pi.iter()
        .zip(f)
        .zip(r_s)
        .enumerate()
        .map(|(i, ((&p, &fm), &r))| p * arrival * fm * (T::one() - T::of_usize(i + 1) * r))
        .sum()
}

/// Estimated drift `bracket / L`.
pub fn objective_estimate<T: Real>(bracket: T, level: T) -> T {
    bracket / level
}

/// Smallest contention level keeping every access probability `<= 1`.
pub fn l_min<T: Real>(f: &[T]) -> T {
    f.iter().copied().fold(T::neg_infinity(), T::max)
}

/// Log of the estimated idle-slot probability:
/// `sum_m pi_m a log(1 - f(m)/L)`.
pub fn idle_log_probability<T: Real>(pi: &[T], arrival: T, f: &[T], level: T) -> T {
    pi.iter()
        .zip(f)
        .filter(|(&p, _)| p * arrival != T::zero())
        .map(|(&p, &fm)| p * arrival * (T::one() - fm / level).ln())
        .sum()
}

/// Result of solving the idle-slot constraint for its largest admissible `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound<T> {
    pub value: T,
    /// `false` when the idle probability exceeds the bound even at `L_min`;
    /// `value` is then `L_min`.
    pub feasible: bool,
}

const BRACKET_EXPANSIONS: usize = 200;
const BISECTION_STEPS: usize = 400;

/// Largest contention level satisfying the idle-slot constraint, found by
/// bisection on the increasing map `L -> idle_log_probability`.
pub fn l_max<T: Real>(
    pi: &[T],
    arrival: T,
    f: &[T],
    idle_bound: T,
    tol: T,
) -> Result<UpperBound<T>> {
    if !(idle_bound > T::zero() && idle_bound < T::one()) {
        return domain(format!("idle bound {idle_bound:?} outside (0, 1)"));
    }
    if !(arrival > T::zero()) {
        return domain(format!("arrival rate {arrival:?} must be positive"));
    }
    if pi.len() != f.len() || pi.is_empty() {
        return domain("pi and f must be non-empty and equally long");
    }
    let target = idle_bound.ln();
    let g = |level: T| idle_log_probability(pi, arrival, f, level) - target;

    let lower = l_min(f);
    let at_lower = g(lower);
    if at_lower >= T::zero() {
        return Ok(UpperBound {
            value: lower,
            feasible: at_lower.abs() <= tol,
        });
    }

    let two = T::of_f64(2.0);
    let mut lo = lower;
    let mut hi = lower * two;
    let mut expansions = 0;
    while g(hi) < T::zero() {
        lo = hi;
        hi = hi * two;
        expansions += 1;
        if expansions > BRACKET_EXPANSIONS {
            return Err(no_convergence(expansions, lo, hi, g(hi)));
        }
    }
    for step in 0..BISECTION_STEPS {
        let mid = (lo + hi) / two;
        let r = g(mid);
        if r.abs() <= tol {
            return Ok(UpperBound {
                value: mid,
                feasible: true,
            });
        }
        if mid <= lo || mid >= hi {
            return Err(no_convergence(step, lo, hi, r));
        }
        if r < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = (lo + hi) / two;
    Err(no_convergence(BISECTION_STEPS, lo, hi, g(mid)))
}

fn no_convergence<T: Real>(iterations: usize, lo: T, hi: T, residual: T) -> ModelError {
    ModelError::NoConvergence {
        iterations,
        lo: lo.to_f64().unwrap_or(f64::NAN),
        hi: hi.to_f64().unwrap_or(f64::NAN),
        residual: residual.to_f64().unwrap_or(f64::NAN),
    }
}

/// Minimiser of `bracket / L` over `[l_lo, l_hi]`. A zero bracket takes the
/// upper branch.
pub fn optimal_contention_level<T: Scalar>(bracket: T, l_lo: T, l_hi: T) -> T {
    debug_assert!(l_lo <= l_hi);
    if bracket >= T::zero() {
        l_hi
    } else {
        l_lo
    }
}

/// Everything the contention step computed in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentionDecision<T> {
    pub level: T,
    pub bracket: T,
    pub l_min: T,
    pub l_max: T,
    /// Idle constraint infeasible or unsolvable; `level` fell back to `l_min`.
    pub flagged: bool,
}

/// Contention step from already-estimated `pi`, arrival rate and success rates.
pub fn decide_contention<T: Real>(
    pi: &[T],
    arrival: T,
    r_s: &[T],
    cfg: &ContentionConfig<T>,
) -> Result<ContentionDecision<T>> {
    let f = cfg.access.values::<T>(pi.len());
    let lo = l_min(&f);
    let br = bracket(pi, arrival, &f, r_s);
    let (hi, flagged) = match l_max(pi, arrival, &f, cfg.idle_bound, cfg.root_tolerance) {
        Ok(UpperBound { value, feasible }) => (value.max(lo), !feasible),
        Err(ModelError::NoConvergence { .. }) => (lo, true),
        Err(e) => return Err(e),
    };
    Ok(ContentionDecision {
        level: optimal_contention_level(br, lo, hi),
        bracket: br,
        l_min: lo,
        l_max: hi,
        flagged,
    })
}

/// Multiplicative-increase / additive-decrease update of the power level.
/// An undefined miss-detection rate leaves the level unchanged.
pub fn miad_update<T: Real>(p_prev: T, r_o: Option<T>, cfg: &PowerConfig<T>) -> T {
    let next = match r_o {
        Some(r) if r > cfg.dmr_high => p_prev + p_prev * cfg.delta1,
        Some(r) if r < cfg.dmr_low => p_prev - cfg.delta2,
        _ => p_prev,
    };
    cfg.clamp(next)
}

/// Action of a user at `effort` given the broadcast pair:
/// `b = min(f(m)/L, 1)`, `p = min(p* + (m-1) ramp, p_max)`.
pub fn user_action<T: Real>(
    effort: usize,
    info: &BroadcastInfo<T>,
    access: &AccessFunction,
    ramp: T,
    p_max: T,
) -> ActionPair<T> {
    let b = (access.value::<T>(effort) / info.contention_level).min(T::one());
    let p = (info.power_level + T::of_usize(effort - 1) * ramp).min(p_max);
    ActionPair {
        access_prob: b,
        tx_power_mw: p,
    }
}
