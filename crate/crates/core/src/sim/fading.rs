use rand::Rng;

/// Piecewise-constant mean of the fading factor `beta(t)`, with per-draw
/// uniform fluctuation of `+-half_width` around the current mean.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSchedule {
    pub half_width: f64,
    /// Sorted by `start`; the first segment should start at slot 0.
    pub segments: Vec<FadeSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadeSegment {
    pub start: u64,
    pub mean: f64,
}

impl Default for FadingSchedule {
    fn default() -> Self {
        Self::constant(1.0)
    }
}

impl FadingSchedule {
    pub fn constant(mean: f64) -> Self {
        Self {
            half_width: 0.0,
            segments: vec![FadeSegment { start: 0, mean }],
        }
    }

    /// Mean 1 fluctuating in `[0.7, 1.3]`, dropping to mean 0.8 over
    /// `[fade_start, fade_end)`.
    pub fn deep_fade(fade_start: u64, fade_end: u64) -> Self {
        Self {
            half_width: 0.3,
            segments: vec![
                FadeSegment {
                    start: 0,
                    mean: 1.0,
                },
                FadeSegment {
                    start: fade_start,
                    mean: 0.8,
                },
                FadeSegment {
                    start: fade_end,
                    mean: 1.0,
                },
            ],
        }
    }

    pub fn mean_at(&self, slot: u64) -> f64 {
        self.segments
            .iter()
            .take_while(|s| s.start <= slot)
            .last()
            .map_or(1.0, |s| s.mean)
    }

    /// Draws `beta` for one transmission in `slot`. Consumes one uniform
    /// variate unless the schedule has zero width.
    pub fn eval<R: Rng + ?Sized>(&self, slot: u64, rng: &mut R) -> f64 {
        let mean = self.mean_at(slot);
        if self.half_width == 0.0 {
            mean
        } else {
            mean + self.half_width * (2.0 * rng.gen::<f64>() - 1.0)
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.segments.is_empty() {
            return Err("needs at least one segment".into());
        }
        if !(self.half_width >= 0.0 && self.half_width.is_finite()) {
            return Err("half width must be finite and non-negative".into());
        }
        if self.segments.windows(2).any(|w| w[1].start < w[0].start) {
            return Err("segments must be sorted by start slot".into());
        }
        if self
            .segments
            .iter()
            .any(|s| s.mean - self.half_width <= 0.0)
        {
            return Err("fading factor must stay positive".into());
        }
        Ok(())
    }
}
