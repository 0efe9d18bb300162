//! Anti-replay window over tunnel sequence numbers.
//!
//! The tunnel numbers every packet per direction. The receiver keeps the
//! highest accepted sequence number and a bitmap of the `window` numbers
//! behind it. New packets ahead of the highest always pass (the window
//! slides); packets at or behind it pass only if they fall inside the
//! window and were not seen before.
//!
//! With `window = 1` no overtaking is tolerated: a packet the attacker
//! holds back is dead the moment any successor is accepted, so the
//! injectable delay is capped by the spacing of the surrounding traffic
//! (`window` x inter-arrival in general).

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ReplayError {
    #[error("replay window must be at least 1")]
    ZeroWindow,
    #[error("replay window larger than {max} is not supported", max = ReplayPolicy::MAX_WINDOW)]
    WindowTooLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayPolicy {
    pub window: u64,
}

impl ReplayPolicy {
    pub const MAX_WINDOW: u64 = 64;
    pub const STRICT: ReplayPolicy = ReplayPolicy { window: 1 };

    pub fn new(window: u64) -> Result<ReplayPolicy, ReplayError> {
        if window == 0 {
            return Err(ReplayError::ZeroWindow);
        }
        if window > Self::MAX_WINDOW {
            return Err(ReplayError::WindowTooLarge);
        }
        Ok(ReplayPolicy { window })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReplayState {
    highest: Option<u64>,
    /// Bit k set: `highest - k` was accepted (bit 0 is `highest` itself).
    seen: u64,
    pub rejected: u64,
}

impl ReplayState {
    pub fn new() -> ReplayState {
        ReplayState::default()
    }

    pub fn highest_accepted(&self) -> Option<u64> {
        self.highest
    }

    /// Checks one arrival; accepted packets advance or mark the window.
    pub fn check(&mut self, seq: u64, policy: ReplayPolicy) -> bool {
        let accept = match self.highest {
            None => {
                self.highest = Some(seq);
                self.seen = 1;
                true
            }
            Some(highest) if seq > highest => {
                let jump = seq - highest;
                self.seen = if jump >= 64 { 1 } else { (self.seen << jump) | 1 };
                self.highest = Some(seq);
                true
            }
            Some(highest) => {
                let behind = highest - seq;
                if behind >= policy.window {
                    false // too old: overtaken past the window
                } else if self.seen >> behind & 1 == 1 {
                    false // duplicate
                } else {
                    self.seen |= 1 << behind;
                    true
                }
            }
        };
        if !accept {
            self.rejected += 1;
        }
        accept
    }
}
