//! Timestamp algebra of one synchronization cycle.
//!
//! A cycle collects four local-clock readings: the master's Sync departure,
//! the slave's Sync arrival, the slave's DelayReq departure, and the
//! master's DelayReq arrival. Round-trip delay and apparent offset follow
//! from those four numbers alone; the apparent offset is only the true
//! offset when both directions share the same one-way delay.

use thiserror::Error;

use crate::sim::{Duration, SimTime};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum CycleError {
    #[error("cycle {0} incomplete: missing timestamp(s)")]
    Incomplete(u64),
    #[error("slave timestamps out of order (request before sync arrival)")]
    SlaveOrder,
    #[error("master timestamps out of order (request receipt before sync departure)")]
    MasterOrder,
}

/// The four readings of a completed cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleStamps {
    /// Master clock: Sync departure.
    pub sync_sent: SimTime,
    /// Slave clock: Sync arrival.
    pub sync_received: SimTime,
    /// Slave clock: DelayReq departure.
    pub req_sent: SimTime,
    /// Master clock: DelayReq arrival.
    pub req_received: SimTime,
}

impl CycleStamps {
    pub fn new(
        sync_sent: SimTime,
        sync_received: SimTime,
        req_sent: SimTime,
        req_received: SimTime,
    ) -> Result<CycleStamps, CycleError> {
        if req_sent < sync_received {
            return Err(CycleError::SlaveOrder);
        }
        if req_received < sync_sent {
            return Err(CycleError::MasterOrder);
        }
        Ok(CycleStamps { sync_sent, sync_received, req_sent, req_received })
    }

    /// Round-trip delay: both one-way transits, with each clock's unknown
    /// offset cancelling because it enters once per direction.
    pub fn round_trip(&self) -> Duration {
        (self.sync_received - self.sync_sent) + (self.req_received - self.req_sent)
    }

    /// Apparent slave-minus-master offset assuming symmetric one-way
    /// delays; positive means the slave clock reads ahead. Integer division
    /// truncates toward zero; the discarded half-nanosecond (odd round
    /// trips) is returned as the remainder.
    pub fn offset_and_remainder(&self) -> (Duration, i64) {
        let (half_rtd, rem) = self.round_trip().halve();
        ((self.sync_received - self.sync_sent) - half_rtd, rem)
    }

    pub fn offset(&self) -> Duration {
        self.offset_and_remainder().0
    }
}

/// A cycle being assembled as messages arrive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SyncCycle {
    pub seq: u64,
    pub sync_sent: Option<SimTime>,
    pub sync_received: Option<SimTime>,
    pub req_sent: Option<SimTime>,
    pub req_received: Option<SimTime>,
}

impl SyncCycle {
    pub fn new(seq: u64) -> SyncCycle {
        SyncCycle { seq, ..SyncCycle::default() }
    }

    pub fn is_complete(&self) -> bool {
        self.sync_sent.is_some()
            && self.sync_received.is_some()
            && self.req_sent.is_some()
            && self.req_received.is_some()
    }

    pub fn stamps(&self) -> Result<CycleStamps, CycleError> {
        match (self.sync_sent, self.sync_received, self.req_sent, self.req_received) {
            (Some(a), Some(b), Some(c), Some(d)) => CycleStamps::new(a, b, c, d),
            _ => Err(CycleError::Incomplete(self.seq)),
        }
    }
}

pub fn compute_rtd(cycle: &SyncCycle) -> Result<Duration, CycleError> {
    Ok(cycle.stamps()?.round_trip())
}

pub fn compute_offset(cycle: &SyncCycle) -> Result<Duration, CycleError> {
    Ok(cycle.stamps()?.offset())
}
