//! Base-station measurement window and estimation of the unknowns the
//! contention controller needs: contention, per-effort success and
//! miss-detection rates, the class occupancy distribution and per-class
//! arrival rates.

use std::collections::VecDeque;

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// What the base station learns in one slot.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotEvents {
    /// Number of detected preambles (collided or not).
    pub detected: u64,
    /// Number of successful efforts.
    pub successes: u64,
    /// Effort index reported by every succeeding user.
    pub success_reports: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SlotRecord {
    detected: u64,
    successes: u64,
    success_by_effort: Vec<u64>,
    tx_by_effort: Vec<u64>,
}

/// Sliding window over the last `W` slots.
///
/// A success reported at effort `m` counts one success at `m` and one
/// inferred transmission at every effort `1..=m`. Users that have not
/// succeeded yet, or were dropped, leave no inferred transmissions.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementWindow {
    len: usize,
    max_effort: usize,
    records: VecDeque<SlotRecord>,
    detected: u64,
    successes: u64,
    success_by_effort: Vec<u64>,
    tx_by_effort: Vec<u64>,
}

impl MeasurementWindow {
    pub fn new(len: usize, max_effort: usize) -> Result<Self> {
        if len == 0 {
            return domain("window length W must be at least 1");
        }
        if max_effort == 0 {
            return domain("max effort M must be at least 1");
        }
        Ok(Self {
            len,
            max_effort,
            records: VecDeque::with_capacity(len),
            detected: 0,
            successes: 0,
            success_by_effort: vec![0; max_effort],
            tx_by_effort: vec![0; max_effort],
        })
    }

    pub fn window_len(&self) -> usize {
        self.len
    }

    pub fn max_effort(&self) -> usize {
        self.max_effort
    }

    /// Number of slots currently retained (`<= W`).
    pub fn filled(&self) -> usize {
        self.records.len()
    }

    pub fn is_full(&self) -> bool {
        self.records.len() == self.len
    }

    pub fn record_slot(&mut self, events: &SlotEvents) -> Result<()> {
        let mut rec = SlotRecord {
            detected: events.detected,
            successes: events.successes,
            success_by_effort: vec![0; self.max_effort],
            tx_by_effort: vec![0; self.max_effort],
        };
        for &m in &events.success_reports {
            if m == 0 || m > self.max_effort {
                return domain(format!(
                    "success reported at effort {m}, outside 1..={}",
                    self.max_effort
                ));
            }
            rec.success_by_effort[m - 1] += 1;
            rec.tx_by_effort[..m].iter_mut().for_each(|t| *t += 1);
        }

        if self.records.len() == self.len {
            let old = self.records.pop_front().expect("full window is non-empty");
            self.detected -= old.detected;
            self.successes -= old.successes;
            sub_assign(&mut self.success_by_effort, &old.success_by_effort);
            sub_assign(&mut self.tx_by_effort, &old.tx_by_effort);
        }
        self.detected += rec.detected;
        self.successes += rec.successes;
        add_assign(&mut self.success_by_effort, &rec.success_by_effort);
        add_assign(&mut self.tx_by_effort, &rec.tx_by_effort);
        self.records.push_back(rec);
        Ok(())
    }

    /// `N_d`
    pub fn detected(&self) -> u64 {
        self.detected
    }

    /// `N_s`
    pub fn successes(&self) -> u64 {
        self.successes
    }

    /// `N_t = sum_m n_t,m`
    pub fn transmissions(&self) -> u64 {
        self.tx_by_effort.iter().sum()
    }

    /// `n_s,m`, index `m - 1`.
    pub fn success_by_effort(&self) -> &[u64] {
        &self.success_by_effort
    }

    /// `n_t,m`, index `m - 1`.
    pub fn transmissions_by_effort(&self) -> &[u64] {
        &self.tx_by_effort
    }

    /// Aggregates recomputed from the retained records:
    /// `(N_d, N_s, n_s, n_t)`.
    pub fn replay(&self) -> (u64, u64, Vec<u64>, Vec<u64>) {
        let mut ns = vec![0; self.max_effort];
        let mut nt = vec![0; self.max_effort];
        let (mut nd, mut nsum) = (0, 0);
        for r in &self.records {
            nd += r.detected;
            nsum += r.successes;
            add_assign(&mut ns, &r.success_by_effort);
            add_assign(&mut nt, &r.tx_by_effort);
        }
        (nd, nsum, ns, nt)
    }
}

fn add_assign(acc: &mut [u64], v: &[u64]) {
    acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
}

fn sub_assign(acc: &mut [u64], v: &[u64]) {
    acc.iter_mut().zip(v).for_each(|(a, b)| *a -= b);
}

/// Windowed rates. `None` marks a rate whose denominator is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimates<T> {
    /// `R^c = 1 - N_s / N_d`
    pub contention: Option<T>,
    /// `R^s_m = n_s,m / n_t,m`
    pub success_per_effort: Vec<Option<T>>,
    /// `R^o = 1 - N_d / N_t`, floored at 0.
    pub miss_detection: Option<T>,
}

fn ratio<T: Scalar>(num: u64, den: u64) -> Option<T> {
    (den > 0).then(|| T::of_usize(num as usize) / T::of_usize(den as usize))
}

pub fn rates<T: Scalar>(w: &MeasurementWindow) -> RateEstimates<T> {
    let one_minus = |r: T| (T::one() - r).max_of(T::zero());
    RateEstimates {
        contention: ratio::<T>(w.successes(), w.detected()).map(one_minus),
        success_per_effort: w
            .success_by_effort()
            .iter()
            .zip(w.transmissions_by_effort())
            .map(|(&s, &t)| ratio(s, t))
            .collect(),
        // Inferred transmissions only cover users that already succeeded, so
        // N_d can exceed N_t over a short window.
        miss_detection: ratio::<T>(w.detected(), w.transmissions()).map(one_minus),
    }
}

/// Stationary class distribution of the per-user chain with success rates
/// `r_s` and back-off ratios `f_ratios[m] = b_1 / b_m` (so `f_ratios[0] = 1`).
///
/// `pi_m` is proportional to `(b_1/b_m) prod_{j<m} (1 - R^s_j)`.
pub fn steady_state<T: Scalar>(r_s: &[T], f_ratios: &[T]) -> Result<Vec<T>> {
    let m = r_s.len();
    if m == 0 || f_ratios.len() != m {
        return domain(format!(
            "r_s and f_ratios must be non-empty and equally long (got {m} and {})",
            f_ratios.len()
        ));
    }
    if let Some(i) = r_s.iter().position(|r| !r.is_probability()) {
        return domain(format!("R^s[{i}] = {:?} is not a probability", r_s[i]));
    }
    if let Some(i) = f_ratios.iter().position(|f| !(*f > T::zero())) {
        return domain(format!(
            "b_1/b_m ratio [{i}] = {:?} must be positive",
            f_ratios[i]
        ));
    }
    let mut weights = Vec::with_capacity(m);
    let mut survive = T::one();
    weights.push(T::one());
    for i in 1..m {
        survive = survive * (T::one() - r_s[i - 1]);
        weights.push(f_ratios[i] * survive);
    }
    let pi_1 = T::one() / weights.iter().copied().sum::<T>();
    Ok(weights.into_iter().map(|w| w * pi_1).collect())
}

/// Per-class arrival estimate `pi_m N_s / W`.
pub fn class_arrivals<T: Scalar>(pi: &[T], successes: u64, window_len: usize) -> Vec<T> {
    let rate = T::of_usize(successes as usize) / T::of_usize(window_len);
    pi.iter().map(|&p| p * rate).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn window(w: usize, m: usize) -> MeasurementWindow {
        MeasurementWindow::new(w, m).unwrap()
    }

    fn ev(detected: u64, reports: &[usize]) -> SlotEvents {
        SlotEvents {
            detected,
            successes: reports.len() as u64,
            success_reports: reports.to_vec(),
        }
    }

    #[test]
    fn success_report_infers_earlier_transmissions() {
        let mut w = window(10, 5);
        w.record_slot(&ev(1, &[3])).unwrap();
        assert_eq!(w.transmissions_by_effort(), &[1, 1, 1, 0, 0]);
        assert_eq!(w.success_by_effort(), &[0, 0, 1, 0, 0]);
        // two users report at efforts 3 and 2
        let mut w = window(10, 5);
        w.record_slot(&ev(2, &[3, 2])).unwrap();
        assert_eq!(w.transmissions_by_effort(), &[2, 2, 1, 0, 0]);
        assert_eq!(w.transmissions(), 5);
    }

    #[test]
    fn empty_slot_only_shifts() {
        let mut w = window(3, 2);
        w.record_slot(&ev(2, &[1])).unwrap();
        let before = (w.detected(), w.successes(), w.transmissions());
        w.record_slot(&SlotEvents::default()).unwrap();
        assert_eq!(before, (w.detected(), w.successes(), w.transmissions()));
        assert_eq!(w.filled(), 2);
    }

    #[test]
    fn oldest_slot_is_evicted() {
        let mut w = window(200, 5);
        for _ in 0..200 {
            w.record_slot(&ev(1, &[])).unwrap();
        }
        assert_eq!(w.detected(), 200);
        w.record_slot(&ev(1, &[])).unwrap();
        assert_eq!(w.detected(), 200);
        assert!(w.is_full());
    }

    #[test]
    fn report_outside_range_rejected() {
        let mut w = window(5, 3);
        assert!(w.record_slot(&ev(1, &[4])).is_err());
        assert!(MeasurementWindow::new(0, 3).is_err());
    }

    #[test]
    fn rate_plug_ins() {
        let mut w = window(1000, 2);
        // N_d = 100, N_s = 80, n_t = 125 total
        for i in 0..100 {
            let reports: Vec<usize> = if i < 80 {
                if i < 45 {
                    vec![2]
                } else {
                    vec![1]
                }
            } else {
                vec![]
            };
            w.record_slot(&ev(1, &reports)).unwrap();
        }
        assert_eq!(
            (w.detected(), w.successes(), w.transmissions()),
            (100, 80, 125)
        );
        let r = rates::<f64>(&w);
        assert!((r.contention.unwrap() - 0.2).abs() < 1e-12);
        assert!((r.miss_detection.unwrap() - 0.2).abs() < 1e-12);
        let rq = rates::<Ratio<i64>>(&w);
        assert_eq!(rq.contention, Some(Ratio::new(1, 5)));
        assert_eq!(rq.success_per_effort[0], Some(Ratio::new(35, 80)));
        assert_eq!(rq.success_per_effort[1], Some(Ratio::new(1, 1)));
    }

    #[test]
    fn empty_window_rates_undefined() {
        let w = window(10, 3);
        let r = rates::<f64>(&w);
        assert_eq!(r.contention, None);
        assert_eq!(r.miss_detection, None);
        assert!(r.success_per_effort.iter().all(Option::is_none));
    }

    #[test]
    fn steady_state_examples() {
        let pi = steady_state(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(pi, vec![1.0, 0.0, 0.0]);
        // f(m) = 1/m, b_1/b_2 = 2, R^s_1 = 1/2
        let pi = steady_state(
            &[Ratio::new(1i64, 2), Ratio::from_integer(1)],
            &[Ratio::from_integer(1), Ratio::from_integer(2)],
        )
        .unwrap();
        assert_eq!(pi, vec![Ratio::new(1, 2), Ratio::new(1, 2)]);
        assert!(steady_state(&[0.5], &[1.0, 2.0]).is_err());
        assert!(steady_state(&[0.5, 0.5], &[1.0, 0.0]).is_err());
        assert!(steady_state(&[1.5, 0.5], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn class_arrival_examples() {
        assert_eq!(
            class_arrivals(&[1.0, 0.0, 0.0], 200, 200),
            vec![1.0, 0.0, 0.0]
        );
        assert_eq!(class_arrivals(&[0.5, 0.5], 100, 200), vec![0.25, 0.25]);
    }

    proptest! {
        #[test]
        fn incremental_aggregates_match_replay(
            slots in proptest::collection::vec((0u64..5, proptest::collection::vec(1usize..=4, 0..3)), 0..300),
            len in 1usize..50,
        ) {
            let mut w = window(len, 4);
            for (extra, reports) in &slots {
                let e = SlotEvents {
                    detected: reports.len() as u64 + extra,
                    successes: reports.len() as u64,
                    success_reports: reports.clone(),
                };
                w.record_slot(&e).unwrap();
            }
            let (nd, ns, nsm, ntm) = w.replay();
            prop_assert_eq!(nd, w.detected());
            prop_assert_eq!(ns, w.successes());
            prop_assert_eq!(&nsm[..], w.success_by_effort());
            prop_assert_eq!(&ntm[..], w.transmissions_by_effort());
            prop_assert!(w.successes() <= w.detected());
        }

        #[test]
        fn rates_are_scale_invariant(
            slots in proptest::collection::vec((0u64..5, proptest::collection::vec(1usize..=3, 0..3)), 1..60),
        ) {
            let mut once = window(1000, 3);
            let mut twice = window(1000, 3);
            for (extra, reports) in &slots {
                let e = SlotEvents {
                    detected: reports.len() as u64 + extra,
                    successes: reports.len() as u64,
                    success_reports: reports.clone(),
                };
                once.record_slot(&e).unwrap();
                twice.record_slot(&e).unwrap();
                twice.record_slot(&e).unwrap();
            }
            let a = rates::<Ratio<i64>>(&once);
            let b = rates::<Ratio<i64>>(&twice);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn steady_state_is_normalised(
            rs in proptest::collection::vec(0.0f64..=1.0, 1..8),
            fr in proptest::collection::vec(0.05f64..20.0, 8),
        ) {
            let mut ratios = fr[..rs.len()].to_vec();
            ratios[0] = 1.0;
            let pi = steady_state(&rs, &ratios).unwrap();
            prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(pi.iter().all(|&p| p >= 0.0));
        }
    }
}
