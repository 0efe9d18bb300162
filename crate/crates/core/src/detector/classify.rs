//! Per-packet labeling against a fitted traffic profile.

use crate::net::Observation;
use crate::ptp::MessageKind;
use crate::sim::Duration;

use super::bins::BinnedStream;
use super::motif::PtpProfileEstimate;

/// Label assigned to one observed packet. `None` means the packet does not
/// fit any slot of the profile and is treated as unrelated traffic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifiedObservation {
    pub label: Option<MessageKind>,
    /// Distance to the matched slot (or to the nearest slot for unlabeled
    /// packets), in whole bins.
    pub phase_residual: Duration,
}

fn cyclic_signed_dist(phase: u64, slot: u64, period: u64) -> i64 {
    let d = (phase as i64 - slot as i64).rem_euclid(period as i64);
    if d * 2 > period as i64 {
        d - period as i64
    } else {
        d
    }
}

/// Classifies one observation. A packet gets a motif label when its phase
/// is within one bin of the slot and its wire length matches the slot; the
/// announce stream is matched against its own period. Direction must agree
/// with the slot as well: only requests flow slave to master.
pub fn classify(obs: &Observation, profile: &PtpProfileEstimate) -> ClassifiedObservation {
    let period = profile.cycle_period_bins();
    let bin = BinnedStream::bin_of(obs.seen_at.as_ns());
    let phase = bin % period;

    let ms = |d: Duration| (d.as_ns() / 1_000_000) as u64;
    let sync = ms(profile.sync_phase);
    let follow_up = (sync + ms(profile.sync_to_followup)) % period;
    let delay_req = (follow_up + ms(profile.followup_to_delayreq)) % period;
    let delay_resp = (delay_req + ms(profile.delayreq_to_delayresp)) % period;

    let slots = [
        (MessageKind::Sync, sync, profile.cycle_msg_len),
        (MessageKind::FollowUp, follow_up, profile.cycle_msg_len),
        (MessageKind::DelayReq, delay_req, profile.delayreq_len),
        (MessageKind::DelayResp, delay_resp, profile.cycle_msg_len),
    ];

    let mut nearest = i64::MAX;
    for (kind, slot_phase, slot_len) in slots {
        let d = cyclic_signed_dist(phase, slot_phase, period);
        nearest = nearest.min(d.abs());
        if d.abs() <= 1 && obs.wire_len == slot_len && obs.direction == kind.direction() {
            return ClassifiedObservation {
                label: Some(kind),
                phase_residual: Duration::from_ns(d * 1_000_000),
            };
        }
    }

    if let (Some(len), Some(ap), Some(aphase)) =
        (profile.announce_len, profile.announce_period, profile.announce_phase)
    {
        let ap_bins = (ap.as_ns() / 1_000_000) as u64;
        if ap_bins > 0 {
            let d = cyclic_signed_dist(bin % ap_bins, ms(aphase), ap_bins);
            if d.abs() <= 1
                && obs.wire_len == len
                && obs.direction == MessageKind::Announce.direction()
            {
                return ClassifiedObservation {
                    label: Some(MessageKind::Announce),
                    phase_residual: Duration::from_ns(d * 1_000_000),
                };
            }
            nearest = nearest.min(d.abs());
        }
    }

    ClassifiedObservation {
        label: None,
        phase_residual: Duration::from_ns(nearest.saturating_mul(1_000_000)),
    }
}

#[cfg(test)]
mod tests {
    use crate::net::Direction;
    use crate::sim::SimTime;

    use super::*;

    fn profile() -> PtpProfileEstimate {
        PtpProfileEstimate {
            cycle_period: Duration::from_millis(250),
            sync_phase: Duration::from_millis(10),
            sync_to_followup: Duration::from_millis(2),
            followup_to_delayreq: Duration::from_millis(12),
            delayreq_to_delayresp: Duration::from_millis(4),
            cycle_msg_len: 138,
            delayreq_len: 138,
            announce_len: Some(154),
            announce_period: Some(Duration::from_millis(2000)),
            announce_phase: Some(Duration::from_millis(63)),
            confidence: 1.0,
        }
    }

    fn obs(ms: u64, len: u32, d: Direction) -> Observation {
        Observation {
            seen_at: SimTime::from_ns(ms * 1_000_000),
            wire_len: len,
            direction: d,
        }
    }

    #[test]
    fn labels_every_motif_slot() {
        let p = profile();
        let cases = [
            (1010, MessageKind::Sync, Direction::MasterToSlave),
            (1012, MessageKind::FollowUp, Direction::MasterToSlave),
            (1024, MessageKind::DelayReq, Direction::SlaveToMaster),
            (1028, MessageKind::DelayResp, Direction::MasterToSlave),
        ];
        for (t, kind, dir) in cases {
            let c = classify(&obs(t, 138, dir), &p);
            assert_eq!(c.label, Some(kind), "at {t} ms");
            assert_eq!(c.phase_residual, Duration::ZERO);
        }
    }

    #[test]
    fn one_bin_slack_each_way() {
        let p = profile();
        assert_eq!(
            classify(&obs(2009, 138, Direction::MasterToSlave), &p).label,
            Some(MessageKind::Sync)
        );
        let late = classify(&obs(2011, 138, Direction::MasterToSlave), &p);
        assert_eq!(late.label, Some(MessageKind::Sync));
        assert_eq!(late.phase_residual, Duration::from_millis(1));
        assert_eq!(classify(&obs(2008, 138, Direction::MasterToSlave), &p).label, None);
    }

    #[test]
    fn direction_and_length_must_match() {
        let p = profile();
        assert_eq!(classify(&obs(1010, 138, Direction::SlaveToMaster), &p).label, None);
        assert_eq!(classify(&obs(1010, 140, Direction::MasterToSlave), &p).label, None);
        assert_eq!(classify(&obs(1024, 138, Direction::MasterToSlave), &p).label, None);
    }

    #[test]
    fn announce_uses_its_own_period() {
        let p = profile();
        assert_eq!(
            classify(&obs(4063, 154, Direction::MasterToSlave), &p).label,
            Some(MessageKind::Announce)
        );
        assert_eq!(classify(&obs(4063, 138, Direction::MasterToSlave), &p).label, None);
        assert_eq!(classify(&obs(4163, 154, Direction::MasterToSlave), &p).label, None);
    }

    #[test]
    fn noise_reports_distance_to_nearest_slot() {
        let p = profile();
        let c = classify(&obs(1018, 999, Direction::MasterToSlave), &p);
        assert_eq!(c.label, None);
        // Phase 18 sits 6 bins after the follow-up slot at 12 and 6 before
        // the request slot at 24.
        assert_eq!(c.phase_residual, Duration::from_millis(6));
    }
}
