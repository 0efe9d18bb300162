//! Master and slave protocol state machines.
//!
//! These are pure message-in/message-out machines over local clock
//! readings; scheduling, transport, and servo wiring live in the harness.
//! The slave tracks at most one cycle in flight: late or duplicated
//! control messages are discarded and counted, never acted on.

use crate::sim::{Duration, SimTime};

use super::cycle::{CycleStamps, SyncCycle};
use super::msg::{MessageKind, PtpPayload};
use super::servo::ServoConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub sync_interval: Duration,
    pub announce_interval: Duration,
    /// Master lag between Sync departure and its FollowUp.
    pub followup_lag: Duration,
    /// Slave lag between FollowUp arrival and DelayReq departure.
    pub delayreq_lag: Duration,
    pub servo: ServoConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            sync_interval: Duration::from_millis(250),
            announce_interval: Duration::from_secs(2),
            followup_lag: Duration::from_millis(2),
            delayreq_lag: Duration::from_millis(10),
            servo: ServoConfig::default(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.sync_interval <= Duration::ZERO {
            return Err("sync_interval must be positive".into());
        }
        if self.announce_interval <= Duration::ZERO {
            return Err("announce_interval must be positive".into());
        }
        if self.followup_lag.is_negative() || self.delayreq_lag.is_negative() {
            return Err("message lags must be non-negative".into());
        }
        self.servo.validate().map_err(|e| e.to_string())
    }
}

/// Master side: emits Sync/FollowUp pairs and answers delay requests.
#[derive(Debug, Default, Clone)]
pub struct Master {
    next_cycle: u64,
    pub reqs_answered: u64,
}

impl Master {
    /// Starts cycle `n`: returns the Sync payload and the FollowUp payload
    /// that must follow it, carrying the Sync departure reading.
    pub fn start_cycle(&mut self, sync_departure: SimTime) -> (PtpPayload, PtpPayload) {
        let cycle = self.next_cycle;
        self.next_cycle += 1;
        (
            PtpPayload { kind: MessageKind::Sync, cycle, carried: None },
            PtpPayload { kind: MessageKind::FollowUp, cycle, carried: Some(sync_departure) },
        )
    }

    pub fn announce(&self) -> PtpPayload {
        PtpPayload { kind: MessageKind::Announce, cycle: self.next_cycle, carried: None }
    }

    /// Answers a DelayReq with the master-side arrival reading.
    pub fn on_delay_req(&mut self, payload: &PtpPayload, arrival: SimTime) -> PtpPayload {
        self.reqs_answered += 1;
        PtpPayload { kind: MessageKind::DelayResp, cycle: payload.cycle, carried: Some(arrival) }
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SlaveStats {
    /// FollowUps that did not match the cycle in flight.
    pub followups_discarded: u64,
    /// DelayResps with no matching pending request.
    pub stale_resps_discarded: u64,
    /// Cycles abandoned when the next Sync arrived first.
    pub cycles_abandoned: u64,
    /// Completed cycles whose round trip was odd (a half nanosecond was
    /// truncated from the offset).
    pub odd_round_trips: u64,
    pub cycles_completed: u64,
}

/// What the slave wants done after consuming a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlaveOutcome {
    None,
    /// Send a DelayReq for this cycle after the configured lag.
    SendDelayReq { cycle: u64 },
    /// All four readings collected.
    Completed { cycle: u64, stamps: CycleStamps },
}

/// Slave side: assembles cycles from Sync/FollowUp/DelayResp arrivals.
#[derive(Debug, Default, Clone)]
pub struct SlaveEngine {
    pending: Option<PendingCycle>,
    pub stats: SlaveStats,
}

#[derive(Debug, Clone, Copy)]
struct PendingCycle {
    cycle: u64,
    partial: SyncCycle,
    req_out: bool,
}

impl SlaveEngine {
    pub fn new() -> SlaveEngine {
        SlaveEngine::default()
    }

    pub fn on_sync(&mut self, payload: &PtpPayload, arrival: SimTime) -> SlaveOutcome {
        if self.pending.is_some() {
            self.stats.cycles_abandoned += 1;
        }
        let mut partial = SyncCycle::new(payload.cycle);
        partial.sync_received = Some(arrival);
        self.pending = Some(PendingCycle { cycle: payload.cycle, partial, req_out: false });
        SlaveOutcome::None
    }

    pub fn on_follow_up(&mut self, payload: &PtpPayload) -> SlaveOutcome {
        let Some(p) = self.pending.as_mut() else {
            self.stats.followups_discarded += 1;
            return SlaveOutcome::None;
        };
        if p.cycle != payload.cycle || p.partial.sync_sent.is_some() {
            self.stats.followups_discarded += 1;
            return SlaveOutcome::None;
        }
        let Some(sync_sent) = payload.carried else {
            self.stats.followups_discarded += 1;
            return SlaveOutcome::None;
        };
        p.partial.sync_sent = Some(sync_sent);
        SlaveOutcome::SendDelayReq { cycle: p.cycle }
    }

    /// Called at the instant the DelayReq actually departs.
    pub fn on_delay_req_sent(&mut self, cycle: u64, departure: SimTime) {
        if let Some(p) = self.pending.as_mut() {
            if p.cycle == cycle && !p.req_out {
                p.partial.req_sent = Some(departure);
                p.req_out = true;
            }
        }
    }

    pub fn on_delay_resp(&mut self, payload: &PtpPayload) -> SlaveOutcome {
        let matches = self
            .pending
            .as_ref()
            .is_some_and(|p| p.cycle == payload.cycle && p.req_out);
        let Some(req_received) = payload.carried else {
            self.stats.stale_resps_discarded += 1;
            return SlaveOutcome::None;
        };
        if !matches {
            self.stats.stale_resps_discarded += 1;
            return SlaveOutcome::None;
        }
        let mut p = self.pending.take().expect("matched pending cycle");
        p.partial.req_received = Some(req_received);
        match p.partial.stamps() {
            Ok(stamps) => {
                self.stats.cycles_completed += 1;
                if stamps.round_trip().as_ns() % 2 != 0 {
                    self.stats.odd_round_trips += 1;
                }
                SlaveOutcome::Completed { cycle: p.cycle, stamps }
            }
            Err(_) => {
                // A cycle that cannot produce ordered readings is dropped.
                self.stats.stale_resps_discarded += 1;
                SlaveOutcome::None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(ns: u64) -> SimTime {
        SimTime::from_ns(ns)
    }

    #[test]
    fn normal_cycle_completes() {
        let mut master = Master::default();
        let mut slave = SlaveEngine::new();

        let (sync, followup) = master.start_cycle(t(1_000));
        assert_eq!(slave.on_sync(&sync, t(3_000)), SlaveOutcome::None);
        assert_eq!(slave.on_follow_up(&followup), SlaveOutcome::SendDelayReq { cycle: 0 });
        slave.on_delay_req_sent(0, t(10_000));
        let req = PtpPayload { kind: MessageKind::DelayReq, cycle: 0, carried: None };
        let resp = master.on_delay_req(&req, t(9_500));
        match slave.on_delay_resp(&resp) {
            SlaveOutcome::Completed { cycle, stamps } => {
                assert_eq!(cycle, 0);
                assert_eq!(stamps.sync_sent, t(1_000));
                assert_eq!(stamps.sync_received, t(3_000));
                assert_eq!(stamps.req_sent, t(10_000));
                assert_eq!(stamps.req_received, t(9_500));
            }
            other => panic!("expected completion, got {other:?}"),
        }
        assert_eq!(slave.stats.cycles_completed, 1);
    }

    #[test]
    fn stale_delay_resp_is_discarded_and_counted() {
        let mut slave = SlaveEngine::new();
        let resp =
            PtpPayload { kind: MessageKind::DelayResp, cycle: 7, carried: Some(t(1_000)) };
        assert_eq!(slave.on_delay_resp(&resp), SlaveOutcome::None);
        assert_eq!(slave.stats.stale_resps_discarded, 1);

        // Pending cycle exists but no request went out yet: still stale.
        let sync = PtpPayload { kind: MessageKind::Sync, cycle: 8, carried: None };
        slave.on_sync(&sync, t(5_000));
        let resp8 =
            PtpPayload { kind: MessageKind::DelayResp, cycle: 8, carried: Some(t(6_000)) };
        assert_eq!(slave.on_delay_resp(&resp8), SlaveOutcome::None);
        assert_eq!(slave.stats.stale_resps_discarded, 2);
    }

    #[test]
    fn out_of_order_follow_up_is_discarded() {
        let mut slave = SlaveEngine::new();
        let sync = PtpPayload { kind: MessageKind::Sync, cycle: 4, carried: None };
        slave.on_sync(&sync, t(1_000));
        let old = PtpPayload { kind: MessageKind::FollowUp, cycle: 3, carried: Some(t(900)) };
        assert_eq!(slave.on_follow_up(&old), SlaveOutcome::None);
        assert_eq!(slave.stats.followups_discarded, 1);
        // Duplicate FollowUp for the current cycle is also dropped.
        let fu = PtpPayload { kind: MessageKind::FollowUp, cycle: 4, carried: Some(t(950)) };
        assert_eq!(slave.on_follow_up(&fu), SlaveOutcome::SendDelayReq { cycle: 4 });
        assert_eq!(slave.on_follow_up(&fu), SlaveOutcome::None);
        assert_eq!(slave.stats.followups_discarded, 2);
    }

    #[test]
    fn missing_delay_resp_abandons_cycle_on_next_sync() {
        let mut master = Master::default();
        let mut slave = SlaveEngine::new();
        let (sync0, fu0) = master.start_cycle(t(0));
        slave.on_sync(&sync0, t(2_000));
        slave.on_follow_up(&fu0);
        slave.on_delay_req_sent(0, t(12_000));
        // DelayResp never arrives; next Sync replaces the pending cycle.
        let (sync1, _) = master.start_cycle(t(250_000));
        slave.on_sync(&sync1, t(252_000));
        assert_eq!(slave.stats.cycles_abandoned, 1);
        // The late resp for cycle 0 is now stale.
        let resp0 = PtpPayload { kind: MessageKind::DelayResp, cycle: 0, carried: Some(t(11_000)) };
        assert_eq!(slave.on_delay_resp(&resp0), SlaveOutcome::None);
        assert_eq!(slave.stats.stale_resps_discarded, 1);
    }
}
