use crate::error::{domain, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x_km: f64,
    pub y_km: f64,
}

impl Position {
    pub fn distance_km(&self) -> f64 {
        self.x_km.hypot(self.y_km)
    }
}

/// One user of the saturated cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UserState {
    /// Current access effort, `1..=M`.
    pub effort: usize,
    pub position: Position,
    /// Sequence picked in the current slot, `0..K`.
    pub sequence: Option<usize>,
    pub transmitted: bool,
    /// Slot in which the user entered the cell.
    pub arrived_at: u64,
    /// Sum of transmit powers over all attempts so far (mW).
    pub power_spent_mw: f64,
}

impl UserState {
    pub fn fresh(position: Position, arrived_at: u64) -> Self {
        Self {
            effort: 1,
            position,
            sequence: None,
            transmitted: false,
            arrived_at,
            power_spent_mw: 0.0,
        }
    }
}

/// Users plus the per-effort class cardinalities `X_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub users: Vec<UserState>,
    max_effort: usize,
    class_counts: Vec<usize>,
}

impl SystemState {
    pub fn new(users: Vec<UserState>, max_effort: usize) -> Result<Self> {
        if max_effort == 0 {
            return domain("max effort M must be at least 1");
        }
        let mut state = Self {
            users,
            max_effort,
            class_counts: vec![0; max_effort],
        };
        for u in &state.users {
            if u.effort == 0 || u.effort > max_effort {
                return domain(format!("user effort {} outside 1..={max_effort}", u.effort));
            }
        }
        state.recount();
        Ok(state)
    }

    pub fn max_effort(&self) -> usize {
        self.max_effort
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// `X_m` for `m = 1..=M` (index `m - 1`).
    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn recount(&mut self) {
        self.class_counts.iter_mut().for_each(|c| *c = 0);
        for u in &self.users {
            self.class_counts[u.effort - 1] += 1;
        }
    }

    pub fn efforts(&self) -> impl Iterator<Item = usize> + '_ {
        self.users.iter().map(|u| u.effort)
    }
}

/// Access probability and transmit power of one user in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionPair<T> {
    pub access_prob: T,
    pub tx_power_mw: T,
}

impl<T: Scalar> ActionPair<T> {
    pub fn new(access_prob: T, tx_power_mw: T, p_max: T) -> Result<Self> {
        if !access_prob.is_probability() {
            return domain(format!("access probability {access_prob:?} outside [0, 1]"));
        }
        if tx_power_mw < T::zero() || tx_power_mw > p_max {
            return domain(format!(
                "transmit power {tx_power_mw:?} outside [0, {p_max:?}]"
            ));
        }
        Ok(Self {
            access_prob,
            tx_power_mw,
        })
    }
}

/// Pool of orthogonal sequences users draw from uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequencePool {
    size: usize,
}

impl SequencePool {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return domain("sequence pool must hold at least one sequence");
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

impl Default for SequencePool {
    fn default() -> Self {
        Self { size: 10 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn user(effort: usize) -> UserState {
        let mut u = UserState::fresh(
            Position {
                x_km: 0.1,
                y_km: 0.0,
            },
            0,
        );
        u.effort = effort;
        u
    }

    #[test]
    fn class_counts_sum_to_population() {
        let s = SystemState::new(vec![user(1), user(1), user(5), user(3)], 5).unwrap();
        assert_eq!(s.class_counts(), &[2, 0, 1, 0, 1]);
        assert_eq!(s.class_counts().iter().sum::<usize>(), s.num_users());
    }

    #[test]
    fn effort_out_of_range_rejected() {
        assert!(SystemState::new(vec![user(6)], 5).is_err());
        assert!(SystemState::new(vec![user(0)], 5).is_err());
        assert!(SystemState::new(vec![], 0).is_err());
    }

    #[test]
    fn action_pair_bounds() {
        assert!(ActionPair::new(0.5, 250.0, 500.0).is_ok());
        assert!(ActionPair::new(1.5, 250.0, 500.0).is_err());
        assert!(ActionPair::new(0.5, 501.0, 500.0).is_err());
        assert!(SequencePool::new(0).is_err());
        assert_eq!(SequencePool::default().size(), 10);
    }
}
