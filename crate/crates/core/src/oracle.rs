//! Brute-force reference implementations used to cross-check the closed
//! forms. They share no code with the functions they check and are only
//! meant for small instances.

use rand::Rng;

use crate::error::{domain, ModelError, Result};
use crate::model::{lyapunov_of_counts, TransitionMatrix};
use crate::scalar::{Real, Scalar};

/// Largest `N * log2(K)`-ish workload [`collision_prob_by_assignment`] accepts,
/// expressed as a cap on the number of enumerated sequence assignments.
pub const ASSIGNMENT_ORACLE_MAX_CASES: usize = 1 << 20;

/// Distribution of the number of transmitters (Poisson-binomial), built one
/// user at a time: `out[j] = P(J = j)`.
pub fn transmit_distribution_dp<T: Scalar>(b: &[T]) -> Vec<T> {
    let mut dist = vec![T::one()];
    for &p in b {
        let mut next = vec![T::zero(); dist.len() + 1];
        for (j, &d) in dist.iter().enumerate() {
            next[j] = next[j] + d * (T::one() - p);
            next[j + 1] = next[j + 1] + d * p;
        }
        dist = next;
    }
    dist
}

/// Fraction of `samples` Bernoulli(b) draws in which exactly `j` users transmit.
pub fn transmit_prob_monte_carlo<R: Rng + ?Sized>(
    b: &[f64],
    j: usize,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let hits = (0..samples)
        .filter(|_| b.iter().filter(|&&p| rng.gen::<f64>() < p).count() == j)
        .count();
    hits as f64 / samples as f64
}

/// Collision probability among detected users computed by listing every
/// (silent / missed / detected) pattern and, for each, every assignment of
/// sequences to the detected users.
pub fn collision_prob_by_assignment<T: Scalar>(
    b: &[T],
    detect_probs: &[T],
    pool_size: usize,
) -> Result<T> {
    let n = b.len();
    if detect_probs.len() != n {
        return domain("b and detect_probs lengths differ");
    }
    if pool_size == 0 {
        return domain("pool size must be positive");
    }
    let cases = 3usize
        .checked_pow(n as u32)
        .and_then(|c| c.checked_mul(pool_size.checked_pow(n as u32)?))
        .unwrap_or(usize::MAX);
    if cases > ASSIGNMENT_ORACLE_MAX_CASES {
        return Err(ModelError::Capacity {
            what: "3^N K^N",
            got: cases,
            cap: ASSIGNMENT_ORACLE_MAX_CASES,
        });
    }
    let per_assignment = |k: usize| -> T {
        let mut collided = 0usize;
        let mut total = 0usize;
        let mut picks = vec![0usize; k];
        loop {
            total += 1;
            let mut seen = vec![false; pool_size];
            if picks.iter().any(|&s| std::mem::replace(&mut seen[s], true)) {
                collided += 1;
            }
            // odometer increment
            let mut i = 0;
            while i < k {
                picks[i] += 1;
                if picks[i] < pool_size {
                    break;
                }
                picks[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        T::of_usize(collided) / T::of_usize(total)
    };
    let by_k: Vec<T> = (0..=n).map(per_assignment).collect();

    let mut total = T::zero();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut prob = T::one();
        let mut k = 0;
        for i in 0..n {
            prob = prob
                * match c % 3 {
                    0 => T::one() - b[i],
                    1 => b[i] * (T::one() - detect_probs[i]),
                    _ => {
                        k += 1;
                        b[i] * detect_probs[i]
                    }
                };
            c /= 3;
        }
        total = total + prob * by_k[k];
    }
    Ok(total)
}

/// Expected one-slot change of `V` by enumerating every user's outcome
/// (silent, transmit-and-succeed, transmit-and-fail). `efforts[i]` is user
/// `i`'s effort; `b` and `q_s` are per user.
pub fn drift_by_enumeration<T: Scalar>(
    efforts: &[usize],
    max_effort: usize,
    b: &[T],
    q_s: &[T],
) -> Result<T> {
    let n = efforts.len();
    if b.len() != n || q_s.len() != n {
        return domain("efforts, b and q_s lengths differ");
    }
    if n > 12 {
        return Err(ModelError::Capacity {
            what: "N",
            got: n,
            cap: 12,
        });
    }
    let v0 = efforts.iter().sum::<usize>() as i64;
    let mut total = T::zero();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut prob = T::one();
        let mut v1 = 0i64;
        for i in 0..n {
            let m = efforts[i];
            let (p, next) = match c % 3 {
                0 => (T::one() - b[i], m),
                1 => (b[i] * q_s[i], 1),
                _ => (
                    b[i] * (T::one() - q_s[i]),
                    if m == max_effort { 1 } else { m + 1 },
                ),
            };
            prob = prob * p;
            v1 += next as i64;
            c /= 3;
        }
        let dv = v1 - v0;
        let dv_t = if dv >= 0 {
            T::of_usize(dv as usize)
        } else {
            T::zero() - T::of_usize((-dv) as usize)
        };
        total = total + prob * dv_t;
    }
    Ok(total)
}

/// Left fixed point of `p` by repeated multiplication from the uniform
/// distribution. Stops once the L1 change is at most `tol`.
pub fn stationary_by_power_iteration<T: Real>(
    p: &TransitionMatrix<T>,
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>> {
    let n = p.dim();
    if n == 0 {
        return domain("empty matrix");
    }
    let mut pi = vec![T::one() / T::of_usize(n); n];
    for it in 0..max_iter {
        let next = p.left_mul(&pi);
        let change: T = next.iter().zip(&pi).map(|(a, b)| (*a - *b).abs()).sum();
        pi = next;
        if change <= tol {
            return Ok(pi);
        }
        if it + 1 == max_iter {
            return Err(ModelError::NoConvergence {
                iterations: max_iter,
                lo: 0.0,
                hi: 0.0,
                residual: change.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(pi)
}

/// Minimiser of `f` over `points` equally spaced values covering `[lo, hi]`.
/// Returns `(argmin, min)`; ties keep the first point.
pub fn grid_argmin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    assert!(points >= 2 && lo <= hi);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .map(|x| (x, f(x)))
        .fold(
            (lo, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
}

/// Every effort vector in `{1..=m}^n`, in lexicographic order.
pub fn all_effort_vectors(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(m.pow(n as u32));
    let mut cur = vec![1usize; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < m {
                cur[i] += 1;
                break;
            }
            cur[i] = 1;
        }
    }
}

/// `V` of an effort vector via its class counts.
pub fn lyapunov_of_efforts(efforts: &[usize], m: usize) -> usize {
    let mut counts = vec![0usize; m];
    for &e in efforts {
        counts[e - 1] += 1;
    }
    lyapunov_of_counts(&counts)
}
