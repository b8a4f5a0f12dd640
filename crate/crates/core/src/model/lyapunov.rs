use super::state::SystemState;
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// `V = sum_n S_n = sum_m m X_m`.
pub fn lyapunov(state: &SystemState) -> usize {
    lyapunov_of_counts(state.class_counts())
}

pub fn lyapunov_of_counts(class_counts: &[usize]) -> usize {
    class_counts
        .iter()
        .enumerate()
        .map(|(i, &x)| (i + 1) * x)
        .sum()
}

/// One-slot expected change of `V` under class-dependent actions:
/// `sum_m X_m b_m (1 - m q_s,m)`.
///
/// A transmission at the last class always sends the user back to effort 1
/// (success, or drop and replacement), so that class contributes
/// `X_M b_M (1 - M)` whatever `q_s,M` is.
pub fn drift_exact<T: Scalar>(class_counts: &[usize], b: &[T], q_s: &[T]) -> Result<T> {
    let m = class_counts.len();
    if b.len() != m || q_s.len() != m {
        return domain(format!(
            "class_counts, b and q_s lengths differ ({m}, {}, {})",
            b.len(),
            q_s.len()
        ));
    }
    let mut drift = T::zero();
    for (i, &x) in class_counts.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let effort = T::of_usize(i + 1);
        let success = if i + 1 == m { T::one() } else { q_s[i] };
        drift = drift + T::of_usize(x) * b[i] * (T::one() - effort * success);
    }
    Ok(drift)
}
