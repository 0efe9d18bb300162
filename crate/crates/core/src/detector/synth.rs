//! Synthetic labeled traffic for exercising the analysis pipeline against
//! known ground truth.

use rand::Rng;

use crate::net::Observation;
use crate::ptp::MessageKind;
use crate::sim::{Duration, SimTime};

/// Ground-truth emission schedule. All timings are whole bins; the announce
/// period is a multiple of the cycle period so every stream folds cleanly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthProfile {
    pub cycle_period: Duration,
    pub sync_phase: Duration,
    pub sync_to_followup: Duration,
    pub followup_to_delayreq: Duration,
    pub delayreq_to_delayresp: Duration,
    pub cycle_msg_len: u32,
    pub delayreq_len: u32,
    pub announce_len: u32,
    pub announce_period: Duration,
    pub announce_phase: Duration,
}

impl SynthProfile {
    /// Absolute slot phases within the cycle, in bins:
    /// [sync, follow_up, delay_req, delay_resp].
    pub fn slot_phases_ms(&self) -> [u64; 4] {
        let t3 = self.cycle_period.as_ns() as u64 / 1_000_000;
        let sync = self.sync_phase.as_ns() as u64 / 1_000_000;
        let t0 = self.sync_to_followup.as_ns() as u64 / 1_000_000;
        let t1 = self.followup_to_delayreq.as_ns() as u64 / 1_000_000;
        let t2 = self.delayreq_to_delayresp.as_ns() as u64 / 1_000_000;
        [
            sync % t3,
            (sync + t0) % t3,
            (sync + t0 + t1) % t3,
            (sync + t0 + t1 + t2) % t3,
        ]
    }

    fn slot_len(&self, kind: MessageKind) -> u32 {
        match kind {
            MessageKind::DelayReq => self.delayreq_len,
            MessageKind::Announce => self.announce_len,
            _ => self.cycle_msg_len,
        }
    }
}

/// Emits the labeled observation stream for `profile` over `[0, window)`,
/// sorted by time.
pub fn generate(
    profile: &SynthProfile,
    window: Duration,
) -> Vec<(Observation, MessageKind)> {
    let window_ns = window.as_ns();
    let t3 = profile.cycle_period.as_ns();
    let sync0 = profile.sync_phase.as_ns();
    let t0 = profile.sync_to_followup.as_ns();
    let t1 = profile.followup_to_delayreq.as_ns();
    let t2 = profile.delayreq_to_delayresp.as_ns();
    let slots = [
        (MessageKind::Sync, 0),
        (MessageKind::FollowUp, t0),
        (MessageKind::DelayReq, t0 + t1),
        (MessageKind::DelayResp, t0 + t1 + t2),
    ];

    let mut out = Vec::new();
    let mut cycle = 0i64;
    loop {
        let base = sync0 + cycle * t3;
        if base >= window_ns {
            break;
        }
        for (kind, off) in slots {
            let t = base + off;
            if t < window_ns {
                out.push((
                    Observation {
                        seen_at: SimTime::from_ns(t as u64),
                        wire_len: profile.slot_len(kind),
                        direction: kind.direction(),
                    },
                    kind,
                ));
            }
        }
        cycle += 1;
    }
    let ap = profile.announce_period.as_ns();
    let mut t = profile.announce_phase.as_ns();
    while t < window_ns {
        out.push((
            Observation {
                seen_at: SimTime::from_ns(t as u64),
                wire_len: profile.announce_len,
                direction: MessageKind::Announce.direction(),
            },
            MessageKind::Announce,
        ));
        t += ap;
    }
    out.sort_by_key(|(o, _)| o.seen_at);
    out
}

pub fn strip_labels(labeled: &[(Observation, MessageKind)]) -> Vec<Observation> {
    labeled.iter().map(|(o, _)| *o).collect()
}

/// Draws a random emission schedule. Slot phases are pairwise at least two
/// bins apart (including the announce phase folded into the cycle), which
/// is the precondition for exact recovery; candidate tuples violating it
/// are redrawn.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R) -> SynthProfile {
    const CYCLE_CHOICES_MS: [i64; 4] = [125, 250, 500, 1000];
    loop {
        let t3 = CYCLE_CHOICES_MS[rng.gen_range(0..CYCLE_CHOICES_MS.len())];
        let t0 = rng.gen_range(1..=10i64);
        let t1 = rng.gen_range(1..=20i64);
        let t2 = rng.gen_range(1..=20i64);
        let sync = rng.gen_range(0..t3);
        let announce_multiple = [8, 16, 32][rng.gen_range(0..3)] as i64;
        let announce_period = (t3 * announce_multiple).min(4000);
        let announce_phase = rng.gen_range(0..announce_period);

        let phases = [
            sync % t3,
            (sync + t0) % t3,
            (sync + t0 + t1) % t3,
            (sync + t0 + t1 + t2) % t3,
            announce_phase % t3,
        ];
        let ok = (0..phases.len()).all(|i| {
            (i + 1..phases.len()).all(|j| {
                let d = (phases[i] - phases[j]).rem_euclid(t3);
                d.min(t3 - d) >= 2
            })
        });
        if !ok {
            continue;
        }

        let cycle_msg_len = rng.gen_range(64..=256u32);
        let delayreq_len = if rng.gen_bool(0.5) {
            cycle_msg_len
        } else {
            loop {
                let l = rng.gen_range(64..=256u32);
                if l != cycle_msg_len {
                    break l;
                }
            }
        };
        let announce_len = loop {
            let l = rng.gen_range(64..=256u32);
            if l != cycle_msg_len && l != delayreq_len {
                break l;
            }
        };

        return SynthProfile {
            cycle_period: Duration::from_millis(t3),
            sync_phase: Duration::from_millis(sync),
            sync_to_followup: Duration::from_millis(t0),
            followup_to_delayreq: Duration::from_millis(t1),
            delayreq_to_delayresp: Duration::from_millis(t2),
            cycle_msg_len,
            delayreq_len,
            announce_len,
            announce_period: Duration::from_millis(announce_period),
            announce_phase: Duration::from_millis(announce_phase),
        };
    }
}
