//! Directional link with fixed floors, jitter, serialization, and an
//! in-path attacker position.
//!
//! One-way transit for a packet is
//! `base_delay + directional extra + wire_len/rate + jitter + injected delay`.
//! The benign part (everything except the injected delay) preserves FIFO
//! order per direction; only the attacker can reorder, which is exactly the
//! anomaly a strict replay window at the receiver reacts to.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::sim::{Duration, SimTime};

use super::envelope::{Direction, Envelope};
use super::observe::Observation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkError {
    #[error("negative delay component: {0}")]
    NegativeDelay(&'static str),
    #[error("jitter bounds inverted (lo > hi)")]
    InvertedJitter,
    #[error("tap offset exceeds the deterministic one-way floor")]
    TapBeyondPath,
}

/// Per-packet random delay component. Samples are never negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Jitter {
    None,
    /// Uniform on `[lo, hi]`.
    Uniform { lo: Duration, hi: Duration },
    /// Normal(mean, sigma) resampled until non-negative.
    TruncNormal { mean: Duration, sigma: Duration },
}

impl Jitter {
    pub fn validate(&self) -> Result<(), LinkError> {
        match *self {
            Jitter::None => Ok(()),
            Jitter::Uniform { lo, hi } => {
                if lo.is_negative() || hi.is_negative() {
                    Err(LinkError::NegativeDelay("jitter bound"))
                } else if lo > hi {
                    Err(LinkError::InvertedJitter)
                } else {
                    Ok(())
                }
            }
            Jitter::TruncNormal { sigma, .. } => {
                if sigma.is_negative() {
                    Err(LinkError::NegativeDelay("jitter sigma"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Duration {
        match *self {
            Jitter::None => Duration::ZERO,
            Jitter::Uniform { lo, hi } => {
                if lo == hi {
                    lo
                } else {
                    Duration::from_ns(rng.gen_range(lo.as_ns()..=hi.as_ns()))
                }
            }
            Jitter::TruncNormal { mean, sigma } => {
                if sigma == Duration::ZERO {
                    return if mean.is_negative() { Duration::ZERO } else { mean };
                }
                let dist = Normal::new(mean.as_ns() as f64, sigma.as_ns() as f64)
                    .expect("validated sigma");
                for _ in 0..64 {
                    let draw = dist.sample(rng);
                    if draw >= 0.0 {
                        return Duration::from_ns(draw as i64);
                    }
                }
                Duration::ZERO
            }
        }
    }

    /// Largest sample the distribution can produce, if bounded.
    pub fn upper_bound(&self) -> Option<Duration> {
        match *self {
            Jitter::None => Some(Duration::ZERO),
            Jitter::Uniform { hi, .. } => Some(hi),
            Jitter::TruncNormal { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkProfile {
    /// Delay floor common to both directions.
    pub base_delay: Duration,
    /// Additional fixed delay toward the slave.
    pub extra_to_slave: Duration,
    /// Additional fixed delay toward the master.
    pub extra_to_master: Duration,
    pub jitter: Jitter,
    /// Serialization rate in bytes/s; `None` disables serialization delay.
    pub rate: Option<u64>,
    /// Where on the path the observer taps, measured from the send instant.
    /// `None` places it midway along the deterministic one-way floor.
    pub tap_offset_to_slave: Option<Duration>,
    pub tap_offset_to_master: Option<Duration>,
}

impl Default for LinkProfile {
    fn default() -> Self {
        LinkProfile {
            base_delay: Duration::from_millis(2),
            extra_to_slave: Duration::ZERO,
            extra_to_master: Duration::ZERO,
            jitter: Jitter::None,
            rate: None,
            tap_offset_to_slave: None,
            tap_offset_to_master: None,
        }
    }
}

impl LinkProfile {
    pub fn validate(&self) -> Result<(), LinkError> {
        if self.base_delay.is_negative() {
            return Err(LinkError::NegativeDelay("base_delay"));
        }
        if self.extra_to_slave.is_negative() || self.extra_to_master.is_negative() {
            return Err(LinkError::NegativeDelay("directional extra"));
        }
        self.jitter.validate()?;
        for dir in Direction::BOTH {
            if self.tap_offset(dir) > self.deterministic_floor(dir) {
                return Err(LinkError::TapBeyondPath);
            }
        }
        Ok(())
    }

    pub fn directional_extra(&self, dir: Direction) -> Duration {
        match dir {
            Direction::MasterToSlave => self.extra_to_slave,
            Direction::SlaveToMaster => self.extra_to_master,
        }
    }

    /// Fixed (jitter-free, attacker-free, serialization-free) one-way floor.
    pub fn deterministic_floor(&self, dir: Direction) -> Duration {
        self.base_delay + self.directional_extra(dir)
    }

    pub fn tap_offset(&self, dir: Direction) -> Duration {
        let configured = match dir {
            Direction::MasterToSlave => self.tap_offset_to_slave,
            Direction::SlaveToMaster => self.tap_offset_to_master,
        };
        configured.unwrap_or_else(|| self.deterministic_floor(dir).halve().0)
    }

    pub fn serialization(&self, wire_len: u32) -> Duration {
        match self.rate {
            None => Duration::ZERO,
            Some(rate) => {
                assert!(rate > 0, "serialization rate must be positive");
                let ns = (wire_len as i128 * 1_000_000_000) / rate as i128;
                Duration::from_ns(ns as i64)
            }
        }
    }
}

/// Delay injected by the in-path attacker for one packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectedDelay {
    Hold(Duration),
    /// Never forwarded.
    Drop,
}

impl InjectedDelay {
    pub const NONE: InjectedDelay = InjectedDelay::Hold(Duration::ZERO);

    pub fn held(self) -> Option<Duration> {
        match self {
            InjectedDelay::Hold(d) => Some(d),
            InjectedDelay::Drop => None,
        }
    }
}

/// Link with per-direction FIFO state and tunnel sequence counters.
#[derive(Debug, Clone)]
pub struct Link {
    pub profile: LinkProfile,
    next_seq: [u64; 2],
    last_benign_arrival: [SimTime; 2],
}

impl Link {
    pub fn new(profile: LinkProfile) -> Result<Link, LinkError> {
        profile.validate()?;
        Ok(Link { profile, next_seq: [0; 2], last_benign_arrival: [SimTime::ZERO; 2] })
    }

    /// Tunnel sequence number for the next packet sent in `dir`.
    pub fn assign_seq(&mut self, dir: Direction) -> u64 {
        let s = self.next_seq[dir.index()];
        self.next_seq[dir.index()] += 1;
        s
    }

    /// What the tap records for this packet.
    pub fn observe<P>(&self, env: &Envelope<P>) -> Observation {
        Observation {
            seen_at: env.sent_at + self.profile.tap_offset(env.direction),
            wire_len: env.wire_len,
            direction: env.direction,
        }
    }

    /// Computes the arrival instant, or `None` when the attacker drops the
    /// packet. The benign component is clamped to per-direction FIFO.
    pub fn transmit<P>(
        &mut self,
        env: &Envelope<P>,
        injected: InjectedDelay,
        rng: &mut impl Rng,
    ) -> Option<SimTime> {
        let dir = env.direction;
        let benign = env.sent_at
            + self.profile.deterministic_floor(dir)
            + self.profile.serialization(env.wire_len)
            + self.profile.jitter.sample(rng);
        let benign = benign.max(self.last_benign_arrival[dir.index()]);
        self.last_benign_arrival[dir.index()] = benign;
        match injected {
            InjectedDelay::Drop => None,
            InjectedDelay::Hold(d) => {
                assert!(!d.is_negative(), "attacker cannot speed packets up");
                Some(benign + d)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn env(at_ns: u64, dir: Direction) -> Envelope<()> {
        Envelope {
            payload: (),
            plain_len: 86,
            wire_len: 138,
            sent_at: SimTime::from_ns(at_ns),
            direction: dir,
            seq: 0,
        }
    }

    #[test]
    fn deterministic_transit_sums_components() {
        let profile = LinkProfile {
            base_delay: Duration::from_millis(2),
            extra_to_slave: Duration::from_millis(1),
            rate: Some(1_000_000),
            ..LinkProfile::default()
        };
        let mut link = Link::new(profile).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let arrival = link
            .transmit(&env(1_000_000, Direction::MasterToSlave), InjectedDelay::NONE, &mut rng)
            .unwrap();
        // 1 ms send + 3 ms floor + 138 B at 1 MB/s = 138 us.
        assert_eq!(arrival, SimTime::from_ns(1_000_000 + 3_000_000 + 138_000));
    }

    #[test]
    fn arrival_never_beats_the_floor() {
        let profile = LinkProfile {
            base_delay: Duration::from_millis(2),
            extra_to_master: Duration::from_micros(300),
            jitter: Jitter::Uniform { lo: Duration::ZERO, hi: Duration::from_millis(5) },
            ..LinkProfile::default()
        };
        let mut link = Link::new(profile.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..500u64 {
            let e = env(k * 10_000, Direction::SlaveToMaster);
            let arrival = link
                .transmit(&e, InjectedDelay::Hold(Duration::from_micros(k as i64 % 40)), &mut rng)
                .unwrap();
            assert!(arrival - e.sent_at >= profile.deterministic_floor(e.direction));
        }
    }

    #[test]
    fn benign_path_is_fifo_per_direction() {
        let profile = LinkProfile {
            jitter: Jitter::Uniform { lo: Duration::ZERO, hi: Duration::from_millis(20) },
            ..LinkProfile::default()
        };
        let mut link = Link::new(profile).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut last = SimTime::ZERO;
        for k in 0..2_000u64 {
            let e = env(k * 50_000, Direction::MasterToSlave);
            let arrival = link.transmit(&e, InjectedDelay::NONE, &mut rng).unwrap();
            assert!(arrival >= last, "benign reordering at packet {k}");
            last = arrival;
        }
    }

    #[test]
    fn attacker_delay_can_reorder_and_drop() {
        let mut link = Link::new(LinkProfile::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let first = link
            .transmit(&env(0, Direction::MasterToSlave), InjectedDelay::Hold(Duration::from_millis(50)), &mut rng)
            .unwrap();
        let second = link
            .transmit(&env(1_000_000, Direction::MasterToSlave), InjectedDelay::NONE, &mut rng)
            .unwrap();
        assert!(second < first, "held packet should arrive after its successor");
        assert_eq!(
            link.transmit(&env(2_000_000, Direction::MasterToSlave), InjectedDelay::Drop, &mut rng),
            None
        );
    }

    #[test]
    fn tap_defaults_to_path_midpoint() {
        let profile = LinkProfile {
            base_delay: Duration::from_millis(2),
            extra_to_slave: Duration::from_millis(6),
            ..LinkProfile::default()
        };
        let link = Link::new(profile).unwrap();
        let o = link.observe(&env(10_000_000, Direction::MasterToSlave));
        assert_eq!(o.seen_at, SimTime::from_ns(10_000_000 + 4_000_000));
        assert_eq!(o.wire_len, 138);
    }

    #[test]
    fn tap_cannot_sit_past_the_receiver() {
        let profile = LinkProfile {
            base_delay: Duration::from_millis(1),
            tap_offset_to_slave: Some(Duration::from_millis(2)),
            ..LinkProfile::default()
        };
        assert_eq!(Link::new(profile).unwrap_err(), LinkError::TapBeyondPath);
    }

    #[test]
    fn truncated_normal_jitter_is_nonnegative() {
        let j = Jitter::TruncNormal { mean: Duration::from_micros(10), sigma: Duration::from_micros(200) };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5_000 {
            assert!(!j.sample(&mut rng).is_negative());
        }
    }
}
