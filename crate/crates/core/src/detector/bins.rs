//! Time discretization of the observation stream.
//!
//! Analysis works on 1 ms bins holding at most one packet each. When two
//! observations land in the same bin the earliest wins and a collision is
//! counted; ties keep the first in stream order.

use std::collections::HashMap;

use crate::net::{Direction, Observation};
use crate::sim::Duration;

pub const BIN_WIDTH: Duration = Duration::from_millis(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinEntry {
    pub bin: u64,
    pub wire_len: u32,
    pub direction: Direction,
}

#[derive(Debug, Clone)]
pub struct BinnedStream {
    /// Occupied bins in ascending order.
    entries: Vec<BinEntry>,
    pub collisions: u64,
    first_bin: u64,
    last_bin: u64,
}

/// Class key: wire length plus direction (direction may be withheld for
/// ablation studies).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassKey {
    pub wire_len: u32,
    pub direction: Option<Direction>,
}

impl BinnedStream {
    pub fn bin_of(seen_at_ns: u64) -> u64 {
        seen_at_ns / BIN_WIDTH.as_ns() as u64
    }

    pub fn entries(&self) -> &[BinEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_bin(&self) -> u64 {
        self.first_bin
    }

    pub fn last_bin(&self) -> u64 {
        self.last_bin
    }

    /// Occupied-window length in bins (inclusive of both ends).
    pub fn window_bins(&self) -> u64 {
        if self.entries.is_empty() {
            0
        } else {
            self.last_bin - self.first_bin + 1
        }
    }

    /// Observations per second over the occupied window.
    pub fn rate_hz(&self) -> f64 {
        let w = self.window_bins();
        if w == 0 {
            0.0
        } else {
            self.entries.len() as f64 / (w as f64 * 1e-3)
        }
    }

    pub fn matches(entry: &BinEntry, class: ClassKey) -> bool {
        entry.wire_len == class.wire_len
            && class.direction.map_or(true, |d| d == entry.direction)
    }

    /// Bins occupied by `class`, ascending.
    pub fn class_bins(&self, class: ClassKey) -> Vec<u64> {
        self.entries
            .iter()
            .filter(|e| Self::matches(e, class))
            .map(|e| e.bin)
            .collect()
    }

    /// All classes with their occurrence counts, most frequent first (ties
    /// break toward smaller length, then master-to-slave).
    pub fn classes(&self, with_direction: bool) -> Vec<(ClassKey, usize)> {
        let mut counts: HashMap<ClassKey, usize> = HashMap::new();
        for e in &self.entries {
            let key = ClassKey {
                wire_len: e.wire_len,
                direction: with_direction.then_some(e.direction),
            };
            *counts.entry(key).or_insert(0) += 1;
        }
        let mut out: Vec<(ClassKey, usize)> = counts.into_iter().collect();
        out.sort_by_key(|(k, n)| {
            (usize::MAX - n, k.wire_len, k.direction.map_or(2, |d| d.index()))
        });
        out
    }
}

/// Reduces a time-sorted observation stream to one packet per bin.
/// Unsorted input is sorted first (stable, so equal instants keep their
/// stream order).
pub fn discretize(observations: &[Observation]) -> BinnedStream {
    let mut obs: Vec<&Observation> = observations.iter().collect();
    obs.sort_by_key(|o| o.seen_at);
    let mut entries: Vec<BinEntry> = Vec::with_capacity(obs.len());
    let mut collisions = 0;
    for o in obs {
        let bin = BinnedStream::bin_of(o.seen_at.as_ns());
        match entries.last() {
            Some(last) if last.bin == bin => collisions += 1,
            _ => entries.push(BinEntry { bin, wire_len: o.wire_len, direction: o.direction }),
        }
    }
    let first_bin = entries.first().map_or(0, |e| e.bin);
    let last_bin = entries.last().map_or(0, |e| e.bin);
    BinnedStream { entries, collisions, first_bin, last_bin }
}
