use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Dense row-stochastic matrix over the effort classes.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> TransitionMatrix<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, from: usize, to: usize) -> T {
        self.data[from * self.dim + to]
    }

    pub fn row(&self, from: usize) -> &[T] {
        &self.data[from * self.dim..(from + 1) * self.dim]
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length must match matrix dimension"
        );
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| v[i] * self.get(i, j)).sum())
            .collect()
    }
}

/// Per-user effort transitions for class access probabilities `b` and
/// success probabilities `q_s` (index `m - 1`).
///
/// Classes below `M` return to 1 on success, climb on failure and stay on
/// back-off. Class `M` returns to 1 on any transmission (the departing user
/// is replaced), so `q_s[M-1]` does not enter the last row.
pub fn class_transition_matrix<T: Scalar>(b: &[T], q_s: &[T]) -> Result<TransitionMatrix<T>> {
    let m = b.len();
    if m == 0 || q_s.len() != m {
        return domain(format!(
            "b and q_s must be non-empty and equally long (got {} and {})",
            m,
            q_s.len()
        ));
    }
    if let Some(i) = b.iter().chain(q_s).position(|p| !p.is_probability()) {
        return domain(format!("entry {i} of b ++ q_s is not a probability"));
    }
    let mut data = vec![T::zero(); m * m];
    for class in 0..m {
        let row = &mut data[class * m..(class + 1) * m];
        if class + 1 == m {
            row[0] = row[0] + b[class];
            row[class] = row[class] + (T::one() - b[class]);
        } else {
            let up = b[class] * q_s[class];
            let climb = b[class] * (T::one() - q_s[class]);
            row[0] = row[0] + up;
            row[class + 1] = climb;
            row[class] = row[class] + (T::one() - (up + climb));
        }
    }
    Ok(TransitionMatrix { dim: m, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    #[test]
    fn two_class_example() {
        let p = class_transition_matrix(&[1.0, 1.0], &[0.5, 0.3]).unwrap();
        assert_eq!(p.row(0), &[0.5, 0.5]);
        assert_eq!(p.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn pure_backoff_is_identity_row() {
        let p = class_transition_matrix(&[0.5, 0.0, 0.2], &[0.4, 0.4, 0.4]).unwrap();
        assert_eq!(p.row(1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn single_class_is_absorbing() {
        let p = class_transition_matrix(&[0.3], &[0.1]).unwrap();
        assert_eq!(p.row(0), &[1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(class_transition_matrix::<f64>(&[], &[]).is_err());
        assert!(class_transition_matrix(&[0.5], &[0.5, 0.5]).is_err());
        assert!(class_transition_matrix(&[1.5], &[0.5]).is_err());
    }

    proptest! {
        #[test]
        fn rational_rows_sum_to_one_exactly(
            raw in proptest::collection::vec((0i64..=20, 0i64..=20), 1..8)
        ) {
            let b: Vec<Ratio<i64>> = raw.iter().map(|&(x, _)| Ratio::new(x, 20)).collect();
            let q: Vec<Ratio<i64>> = raw.iter().map(|&(_, y)| Ratio::new(y, 20)).collect();
            let p = class_transition_matrix(&b, &q).unwrap();
            for i in 0..p.dim() {
                let s: Ratio<i64> = p.row(i).iter().copied().sum();
                prop_assert_eq!(s, Ratio::from_integer(1));
            }
        }

        #[test]
        fn float_rows_sum_to_one(
            raw in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..8)
        ) {
            let b: Vec<f64> = raw.iter().map(|r| r.0).collect();
            let q: Vec<f64> = raw.iter().map(|r| r.1).collect();
            let p = class_transition_matrix(&b, &q).unwrap();
            for i in 0..p.dim() {
                let s: f64 = p.row(i).iter().sum();
                prop_assert!((s - 1.0).abs() <= 2.0 * f64::EPSILON);
            }
        }
    }
}
