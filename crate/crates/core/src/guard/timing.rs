//! Timing randomization: removing the periodicity feature from
//! observations by drawing per-cycle message lags from configured ranges.
//! Degenerate (zero-width) ranges reproduce the fixed schedule exactly.

use rand::Rng;
use thiserror::Error;

use crate::sim::Duration;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TimingError {
    #[error("randomization range inverted (lo > hi)")]
    InvertedRange,
    #[error("randomization range must be non-negative")]
    NegativeRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingRandomization {
    /// Dither added to each nominal Sync departure.
    pub sync_dither: (Duration, Duration),
    /// Per-cycle master lag between Sync and FollowUp.
    pub followup_lag: (Duration, Duration),
    /// Per-cycle slave lag between FollowUp arrival and DelayReq.
    pub delayreq_lag: (Duration, Duration),
}

/// The lags drawn for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleTiming {
    pub sync_dither: Duration,
    pub followup_lag: Duration,
    pub delayreq_lag: Duration,
}

impl TimingRandomization {
    /// A schedule with no randomness at all.
    pub fn fixed(followup_lag: Duration, delayreq_lag: Duration) -> TimingRandomization {
        TimingRandomization {
            sync_dither: (Duration::ZERO, Duration::ZERO),
            followup_lag: (followup_lag, followup_lag),
            delayreq_lag: (delayreq_lag, delayreq_lag),
        }
    }

    pub fn validate(&self) -> Result<(), TimingError> {
        for (lo, hi) in [self.sync_dither, self.followup_lag, self.delayreq_lag] {
            if lo.is_negative() {
                return Err(TimingError::NegativeRange);
            }
            if lo > hi {
                return Err(TimingError::InvertedRange);
            }
        }
        Ok(())
    }

    pub fn is_randomized(&self) -> bool {
        let fixed = |(lo, hi): (Duration, Duration)| lo == hi;
        !(fixed(self.sync_dither) && fixed(self.followup_lag) && fixed(self.delayreq_lag))
    }

    pub fn draw(&self, rng: &mut impl Rng) -> CycleTiming {
        let pick = |(lo, hi): (Duration, Duration), rng: &mut dyn rand::RngCore| {
            if lo == hi {
                lo
            } else {
                Duration::from_ns(rng.gen_range(lo.as_ns()..=hi.as_ns()))
            }
        };
        CycleTiming {
            sync_dither: pick(self.sync_dither, rng),
            followup_lag: pick(self.followup_lag, rng),
            delayreq_lag: pick(self.delayreq_lag, rng),
        }
    }
}
