//! Protocol messages of the two-step synchronization exchange.

use std::fmt;
use std::str::FromStr;

use crate::net::Direction;
use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageKind {
    Sync,
    FollowUp,
    DelayReq,
    DelayResp,
    Announce,
}

impl MessageKind {
    pub const ALL: [MessageKind; 5] = [
        MessageKind::Sync,
        MessageKind::FollowUp,
        MessageKind::DelayReq,
        MessageKind::DelayResp,
        MessageKind::Announce,
    ];

    /// Plaintext wire length in bytes, including lower-layer headers, as
    /// captured on an unencrypted segment.
    pub fn plain_len(self) -> u32 {
        match self {
            MessageKind::Sync | MessageKind::FollowUp | MessageKind::DelayResp => 86,
            MessageKind::DelayReq => 96,
            MessageKind::Announce => 106,
        }
    }

    /// Every kind flows master-to-slave except the delay request.
    pub fn direction(self) -> Direction {
        match self {
            MessageKind::DelayReq => Direction::SlaveToMaster,
            _ => Direction::MasterToSlave,
        }
    }
}

// Debug names double as the canonical trace labels; FromStr is the inverse.
impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for MessageKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Sync" => Ok(MessageKind::Sync),
            "FollowUp" => Ok(MessageKind::FollowUp),
            "DelayReq" => Ok(MessageKind::DelayReq),
            "DelayResp" => Ok(MessageKind::DelayResp),
            "Announce" => Ok(MessageKind::Announce),
            other => Err(format!("unknown message kind {other:?}")),
        }
    }
}

/// Payload carried opaquely through the tunnel. The observer never sees any
/// of this; endpoints do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PtpPayload {
    pub kind: MessageKind,
    /// Protocol-level cycle counter (independent of tunnel sequence).
    pub cycle: u64,
    /// FollowUp carries the master's Sync departure reading; DelayResp
    /// carries the master's DelayReq arrival reading.
    pub carried: Option<SimTime>,
}
