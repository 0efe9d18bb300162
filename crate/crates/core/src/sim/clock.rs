//! Local clock model: epoch offset, rational frequency error, step corrections.

use thiserror::Error;

use super::time::{Duration, Ppm, SimTime, TimeError};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ClockError {
    #[error("correction at {at} precedes last correction at {last}")]
    OutOfOrderCorrection { at: SimTime, last: SimTime },
    #[error(transparent)]
    Time(#[from] TimeError),
}

/// A free-running local clock observed against true time.
///
/// The reading at true instant `t` is
/// `t + offset_at_epoch + drift·t + Σ corrections applied at or before t`,
/// with the drift term evaluated as an exact rational and truncated toward
/// zero. Corrections are instantaneous steps and must be applied in
/// chronological order.
#[derive(Debug, Clone)]
pub struct ClockModel {
    offset_at_epoch: Duration,
    drift: Ppm,
    corrections: Vec<(SimTime, Duration)>,
    /// Running sum of `corrections` steps, index-aligned, so a reading is a
    /// binary search instead of a scan over the whole correction history.
    cumulative: Vec<Duration>,
}

impl ClockModel {
    pub fn new(offset_at_epoch: Duration, drift: Ppm) -> ClockModel {
        ClockModel { offset_at_epoch, drift, corrections: Vec::new(), cumulative: Vec::new() }
    }

    /// A clock that reads true time exactly.
    pub fn ideal() -> ClockModel {
        ClockModel::new(Duration::ZERO, Ppm::ZERO)
    }

    pub fn drift(&self) -> Ppm {
        self.drift
    }

    pub fn offset_at_epoch(&self) -> Duration {
        self.offset_at_epoch
    }

    pub fn local_time(&self, t: SimTime) -> Result<SimTime, ClockError> {
        let mut shift = self
            .offset_at_epoch
            .checked_add(Duration::from_ns(self.drift.scale_ns(t.as_ns() as i64)))?;
        let applied = self.corrections.partition_point(|&(at, _)| at <= t);
        if applied > 0 {
            shift = shift.checked_add(self.cumulative[applied - 1])?;
        }
        Ok(t.checked_add(shift)?)
    }

    /// Steps the clock by `step` effective at true time `at` (inclusive).
    pub fn apply_correction(&mut self, at: SimTime, step: Duration) -> Result<(), ClockError> {
        if let Some(&(last, _)) = self.corrections.last() {
            if at < last {
                return Err(ClockError::OutOfOrderCorrection { at, last });
            }
        }
        let total = match self.cumulative.last() {
            Some(&prev) => prev.checked_add(step)?,
            None => step,
        };
        self.corrections.push((at, step));
        self.cumulative.push(total);
        Ok(())
    }

    pub fn corrections(&self) -> &[(SimTime, Duration)] {
        &self.corrections
    }

    /// Net step applied within the half-open true-time window `(after, upto]`.
    pub fn correction_between(&self, after: SimTime, upto: SimTime) -> Duration {
        let cum = |t: SimTime| match self.corrections.partition_point(|&(at, _)| at <= t) {
            0 => Duration::ZERO,
            n => self.cumulative[n - 1],
        };
        cum(upto) - cum(after)
    }
}

/// Reading of `slave` minus reading of `master` at the same true instant;
/// positive means the slave clock is ahead.
pub fn offset_between(slave: &ClockModel, master: &ClockModel, t: SimTime) -> Result<Duration, ClockError> {
    Ok(slave.local_time(t)? - master.local_time(t)?)
}
