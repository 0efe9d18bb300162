//! Packets in flight between master and slave.

use std::fmt;
use std::str::FromStr;

use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    MasterToSlave,
    SlaveToMaster,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::MasterToSlave, Direction::SlaveToMaster];

    pub fn index(self) -> usize {
        match self {
            Direction::MasterToSlave => 0,
            Direction::SlaveToMaster => 1,
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::MasterToSlave => Direction::SlaveToMaster,
            Direction::SlaveToMaster => Direction::MasterToSlave,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::MasterToSlave => write!(f, "MS"),
            Direction::SlaveToMaster => write!(f, "SM"),
        }
    }
}

impl FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "MS" => Ok(Direction::MasterToSlave),
            "SM" => Ok(Direction::SlaveToMaster),
            other => Err(format!("unknown direction {other:?} (expected MS or SM)")),
        }
    }
}

/// A packet handed to the link. The payload is carried opaquely: nothing on
/// the path (tap, adversary, noise) can inspect it, only the metadata that
/// an observer of encrypted traffic would see.
#[derive(Debug, Clone)]
pub struct Envelope<P> {
    pub payload: P,
    pub plain_len: u32,
    pub wire_len: u32,
    pub sent_at: SimTime,
    pub direction: Direction,
    /// Per-direction send counter assigned by the tunnel endpoint.
    pub seq: u64,
}
