//! Exact transmission, collision, success and dropping probabilities.

use super::state::SequencePool;
use crate::error::{domain, ModelError, Result};
use crate::scalar::Scalar;

/// Largest population [`transmit_prob_exact`] enumerates subsets for.
pub const TRANSMIT_ENUMERATION_MAX_USERS: usize = 20;
/// Largest population [`collision_prob_oracle`] enumerates outcomes for (`3^N` terms).
pub const COLLISION_ORACLE_MAX_USERS: usize = 12;

fn check_probabilities<T: Scalar>(what: &str, v: &[T]) -> Result<()> {
    match v.iter().position(|p| !p.is_probability()) {
        Some(i) => domain(format!("{what}[{i}] = {:?} is not a probability", v[i])),
        None => Ok(()),
    }
}

/// Probability that exactly `j` of the users transmit, summing
/// `prod b_i * prod (1 - b_k)` over every size-`j` subset.
pub fn transmit_prob_exact<T: Scalar>(b: &[T], j: usize) -> Result<T> {
    let n = b.len();
    if j > n {
        return domain(format!("J = {j} exceeds population N = {n}"));
    }
    if n > TRANSMIT_ENUMERATION_MAX_USERS {
        return Err(ModelError::Capacity {
            what: "N",
            got: n,
            cap: TRANSMIT_ENUMERATION_MAX_USERS,
        });
    }
    check_probabilities("b", b)?;
    let mut total = T::zero();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != j {
            continue;
        }
        let term = b.iter().enumerate().fold(T::one(), |acc, (i, &bi)| {
            if mask & (1 << i) != 0 {
                acc * bi
            } else {
                acc * (T::one() - bi)
            }
        });
        total = total + term;
    }
    Ok(total)
}

/// Probability that at least two of `k` uniform, independent picks from the
/// pool coincide: `1 - K!/(K-k)!/K^k`, and 1 once `k > K`.
pub fn collision_given_detected<T: Scalar>(k: usize, pool: SequencePool) -> T {
    let size = pool.size();
    if k > size {
        return T::one();
    }
    let big_k = T::of_usize(size);
    let all_distinct = (0..k).fold(T::one(), |acc, i| acc * T::of_usize(size - i) / big_k);
    T::one() - all_distinct
}

/// Collision probability with access vector `b` and exactly `k` detections,
/// by total probability over the number `J` of transmitters. With fewer
/// transmitters than detections the conditional term is zero.
pub fn collision_prob_k_detected<T: Scalar>(b: &[T], k: usize, pool: SequencePool) -> Result<T> {
    let n = b.len();
    if k > n {
        return domain(format!("k = {k} detections exceed N = {n} users"));
    }
    let given_k = collision_given_detected::<T>(k, pool);
    let mut total = T::zero();
    for j in k..=n {
        total = total + given_k * transmit_prob_exact(b, j)?;
    }
    Ok(total)
}

/// Unconditional probability that a collision occurs among detected users,
/// with per-user access probabilities `b` and detection probabilities
/// `detect_probs`. Enumerates every user's (silent, missed, detected) outcome.
pub fn collision_prob_oracle<T: Scalar>(
    b: &[T],
    detect_probs: &[T],
    pool: SequencePool,
) -> Result<T> {
    let n = b.len();
    if detect_probs.len() != n {
        return domain(format!(
            "detect_probs has length {} but b has length {n}",
            detect_probs.len()
        ));
    }
    if n > COLLISION_ORACLE_MAX_USERS {
        return Err(ModelError::Capacity {
            what: "N",
            got: n,
            cap: COLLISION_ORACLE_MAX_USERS,
        });
    }
    check_probabilities("b", b)?;
    check_probabilities("detect_probs", detect_probs)?;

    let cond: Vec<T> = (0..=n).map(|k| collision_given_detected(k, pool)).collect();
    let outcomes = 3usize.pow(n as u32);
    let mut total = T::zero();
    for code in 0..outcomes {
        let mut c = code;
        let mut prob = T::one();
        let mut detected = 0;
        for i in 0..n {
            let outcome = c % 3;
            c /= 3;
            prob = prob
                * match outcome {
                    0 => T::one() - b[i],
                    1 => b[i] * (T::one() - detect_probs[i]),
                    _ => {
                        detected += 1;
                        b[i] * detect_probs[i]
                    }
                };
        }
        total = total + prob * cond[detected];
    }
    Ok(total)
}

/// Success probability of a transmitting user: `(1 - q_o)(1 - q_c)`.
pub fn success_prob<T: Scalar>(miss_prob: T, collision_prob: T) -> T {
    (T::one() - miss_prob) * (T::one() - collision_prob)
}

/// Dropping probability `b_M (1 - q_s,M) pi_M`.
pub fn dropping_prob<T: Scalar>(b_last: T, success_last: T, occupancy_last: T) -> T {
    b_last * (T::one() - success_last) * occupancy_last
}
