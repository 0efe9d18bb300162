//! Guaranteed offset bounds from one-way delay floors.
//!
//! If each direction's one-way delay is known to be at least some floor,
//! every completed cycle yields a hard interval containing the true offset,
//! no matter what an in-path delay attacker does: delaying packets can only
//! widen the interval, never displace it off the truth. With no knowledge
//! (floors of zero) the interval is widest but still sound.

use thiserror::Error;

use crate::ptp::CycleStamps;
use crate::sim::{Duration, Ppm, SimTime};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum BoundError {
    #[error("delay floors must be non-negative")]
    NegativeFloor,
    #[error(
        "round trip {round_trip} smaller than combined delay floors {floor_sum}: floors overstate the path"
    )]
    InfeasibleFloors { round_trip: Duration, floor_sum: Duration },
    #[error("gate threshold {rtd_max} below combined delay floors {floor_sum}")]
    GateBelowFloors { rtd_max: Duration, floor_sum: Duration },
    #[error("interval length must be positive")]
    BadInterval,
    #[error("drift rate bound must be non-negative")]
    NegativeDrift,
}

/// Trusted lower bounds on the one-way transit in each direction. Soundness
/// of every bound below requires that these never exceed the true minimum
/// path delay; conservative (smaller) values are always safe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OwdConstraints {
    /// Floor for master-to-slave transit.
    pub to_slave: Duration,
    /// Floor for slave-to-master transit.
    pub to_master: Duration,
}

impl OwdConstraints {
    /// No path knowledge at all; bounds degrade gracefully to the widest
    /// sound interval.
    pub const NONE: OwdConstraints =
        OwdConstraints { to_slave: Duration::ZERO, to_master: Duration::ZERO };

    pub fn new(to_slave: Duration, to_master: Duration) -> Result<OwdConstraints, BoundError> {
        if to_slave.is_negative() || to_master.is_negative() {
            return Err(BoundError::NegativeFloor);
        }
        Ok(OwdConstraints { to_slave, to_master })
    }

    pub fn sum(&self) -> Duration {
        self.to_slave + self.to_master
    }
}

/// A closed interval guaranteed to contain the true slave-minus-master
/// offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffsetBound {
    pub low: Duration,
    pub high: Duration,
}

impl OffsetBound {
    pub fn contains(&self, offset: Duration) -> bool {
        self.low <= offset && offset <= self.high
    }

    /// Center of the interval, truncated toward zero; the best single
    /// estimate the bound supports.
    pub fn midpoint(&self) -> Duration {
        Duration::from_ns((self.low.as_ns() + self.high.as_ns()) / 2)
    }

    pub fn width(&self) -> Duration {
        self.high - self.low
    }

    /// Worst-case error of the midpoint estimate. Rounded up on odd
    /// widths: the truncated midpoint sits a ceiled half-width from the
    /// far endpoint, and a guarantee must not under-report by that
    /// nanosecond.
    pub fn half_width(&self) -> Duration {
        Duration::from_ns((self.width().as_ns() + 1) / 2)
    }
}

/// Per-cycle offset bound.
///
/// The Sync transit took at least `to_slave`, so the slave's arrival
/// reading can exceed the master's departure reading by at most the true
/// offset plus everything above the floor: that caps the offset from
/// above. Symmetrically the DelayReq leg caps it from below.
pub fn bound_offset(
    stamps: &CycleStamps,
    floors: &OwdConstraints,
) -> Result<OffsetBound, BoundError> {
    let high = (stamps.sync_received - stamps.sync_sent) - floors.to_slave;
    let low = (stamps.req_sent - stamps.req_received) + floors.to_master;
    if low > high {
        return Err(BoundError::InfeasibleFloors {
            round_trip: stamps.round_trip(),
            floor_sum: floors.sum(),
        });
    }
    Ok(OffsetBound { low, high })
}

pub fn midpoint_offset(bound: &OffsetBound) -> Duration {
    bound.midpoint()
}

/// Worst-case distance between the midpoint estimate and the true offset:
/// half of what the round trip spends above the floors, rounded up so the
/// claim survives integer truncation of the midpoint.
pub fn residual_uncertainty(
    stamps: &CycleStamps,
    floors: &OwdConstraints,
) -> Result<Duration, BoundError> {
    let slack = stamps.round_trip() - floors.sum();
    if slack.is_negative() {
        return Err(BoundError::InfeasibleFloors {
            round_trip: stamps.round_trip(),
            floor_sum: floors.sum(),
        });
    }
    Ok(Duration::from_ns((slack.as_ns() + 1) / 2))
}

/// Accepts a cycle for servo consumption only when its round trip does not
/// exceed the gate threshold (boundary inclusive). Rejected cycles starve
/// the servo; the caller tracks the resulting correction interval.
pub fn rtd_gate(round_trip: Duration, rtd_max: Duration) -> bool {
    round_trip <= rtd_max
}

/// System-level guarantee for a gated, periodically corrected clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemBoundParams {
    /// Gate threshold: worst round trip ever accepted.
    pub rtd_max: Duration,
    /// Longest stretch between accepted corrections.
    pub correction_interval: Duration,
    /// Bound on the magnitude of the local clock's frequency error.
    pub max_drift: Ppm,
}

impl SystemBoundParams {
    pub fn validate(&self, floors: &OwdConstraints) -> Result<(), BoundError> {
        if self.rtd_max < floors.sum() {
            return Err(BoundError::GateBelowFloors {
                rtd_max: self.rtd_max,
                floor_sum: floors.sum(),
            });
        }
        if self.correction_interval <= Duration::ZERO {
            return Err(BoundError::BadInterval);
        }
        if self.max_drift.numerator() < 0 {
            return Err(BoundError::NegativeDrift);
        }
        Ok(())
    }
}

/// Offset guarantee holding at every instant, not just at correction
/// points: the midpoint estimate's worst error at the last accepted cycle,
/// plus what the clock can drift before the next one.
pub fn system_bound(
    params: &SystemBoundParams,
    floors: &OwdConstraints,
) -> Result<OffsetBound, BoundError> {
    params.validate(floors)?;
    // Ceiled half, matching the per-cycle residual, so the worst accepted
    // cycle is covered exactly at the gate boundary.
    let gate_slack = (params.rtd_max - floors.sum()).as_ns();
    let half = Duration::from_ns((gate_slack + 1) / 2)
        + Duration::from_ns(params.max_drift.scale_ns(params.correction_interval.as_ns()));
    Ok(OffsetBound { low: -half, high: half })
}

/// Width comparison between the bound from the Sync exchange and the bound
/// from the DelayReq/DelayResp exchange of the same cycle. A delay attack
/// on only one exchange inflates only that bound; widths apart by more
/// than `factor` flag one-sided tampering.
pub fn one_sided_delay_suspected(sync_bound: &OffsetBound, resp_bound: &OffsetBound, factor: i64) -> bool {
    assert!(factor >= 1, "comparator factor must be at least 1");
    let a = sync_bound.width().as_ns();
    let b = resp_bound.width().as_ns();
    a > b.saturating_mul(factor) || b > a.saturating_mul(factor)
}

/// Offset bound built from the returning exchange: DelayReq departure and
/// arrival readings plus the DelayResp departure (master) and arrival
/// (slave) readings.
pub fn response_bound(
    req_sent: SimTime,
    req_received: SimTime,
    resp_sent: SimTime,
    resp_received: SimTime,
    floors: &OwdConstraints,
) -> Result<OffsetBound, BoundError> {
    let high = (resp_received - resp_sent) - floors.to_slave;
    let low = (req_sent - req_received) + floors.to_master;
    if low > high {
        return Err(BoundError::InfeasibleFloors {
            round_trip: (resp_received - req_sent) - (resp_sent - req_received),
            floor_sum: floors.sum(),
        });
    }
    Ok(OffsetBound { low, high })
}
