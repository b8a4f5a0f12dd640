use crate::error::{domain, Result};
use crate::scalar::Real;

/// Path loss, noise and detection threshold of the cell.
///
/// The received SNR is `P[dBm] - PL(D) + 10 log10(beta) - noise[dBm]` with
/// `PL(D) = pathloss_const + pathloss_slope * log10(D km)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    pub pathloss_const_db: T,
    pub pathloss_slope_db: T,
    pub noise_dbm: T,
    pub snr_threshold_db: T,
    pub cell_radius_km: T,
    /// Multiplier on the long-term gain used when no fading schedule applies.
    pub fading_factor: T,
}

impl<T: Real> Default for ChannelParams<T> {
    fn default() -> Self {
        Self {
            pathloss_const_db: T::of_f64(128.1),
            pathloss_slope_db: T::of_f64(37.6),
            noise_dbm: T::of_f64(-133.2),
            snr_threshold_db: T::of_f64(8.0),
            cell_radius_km: T::of_f64(DEFAULT_CELL_RADIUS_KM),
            fading_factor: T::one(),
        }
    }
}

/// Default cell radius. At 250 mW the first effort reaches roughly 3.6 km, so
/// an outer ring of users needs the power ramp (or a higher power level) to be
/// heard.
pub const DEFAULT_CELL_RADIUS_KM: f64 = 4.0;

impl<T: Real> ChannelParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.snr_threshold_db.is_finite() {
            return domain("snr_threshold must be finite");
        }
        if !(self.cell_radius_km > T::zero()) {
            return domain("cell_radius must be positive");
        }
        if !(self.fading_factor > T::zero()) {
            return domain("fading_factor must be positive");
        }
        Ok(())
    }

    pub fn path_loss_db(&self, distance_km: T) -> T {
        self.pathloss_const_db + self.pathloss_slope_db * distance_km.log10()
    }
}

pub fn snr_db<T: Real>(
    power_mw: T,
    distance_km: T,
    fading_factor: T,
    ch: &ChannelParams<T>,
) -> Result<T> {
    if !(power_mw > T::zero()) {
        return domain(format!(
            "transmit power must be positive, got {power_mw:?} mW"
        ));
    }
    if !(distance_km > T::zero()) {
        return domain(format!("distance must be positive, got {distance_km:?} km"));
    }
    if !(fading_factor > T::zero()) {
        return domain(format!(
            "fading factor must be positive, got {fading_factor:?}"
        ));
    }
    let ten = T::of_f64(10.0);
    let tx_dbm = ten * power_mw.log10();
    Ok(tx_dbm - ch.path_loss_db(distance_km) + ten * fading_factor.log10() - ch.noise_dbm)
}

/// Strict exceedance: an SNR equal to the threshold is a miss.
pub fn detect<T: Real>(snr_db: T, ch: &ChannelParams<T>) -> bool {
    snr_db > ch.snr_threshold_db
}
