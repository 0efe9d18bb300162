//! What a passive on-path observer records: arrival instant, wire length,
//! direction. Nothing else leaks through the tunnel.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::sim::SimTime;

use super::envelope::Direction;

pub const OBS_TRACE_HEADER: &str = "# obs-trace v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub seen_at: SimTime,
    pub wire_len: u32,
    pub direction: Direction,
}

#[derive(Debug, Error)]
pub enum ObsTraceError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing or wrong header, expected {OBS_TRACE_HEADER:?}")]
    BadHeader,
    #[error("line {line}: {msg}")]
    BadRecord { line: usize, msg: String },
}

/// Sorts by arrival time, keeping input order between equal instants.
pub fn sort_observations(obs: &mut [Observation]) {
    obs.sort_by_key(|o| o.seen_at);
}

pub fn write_obs_trace(mut w: impl Write, obs: &[Observation]) -> Result<(), ObsTraceError> {
    writeln!(w, "{OBS_TRACE_HEADER}")?;
    for o in obs {
        writeln!(w, "{},{},{}", o.seen_at.as_ns(), o.wire_len, o.direction)?;
    }
    Ok(())
}

pub fn read_obs_trace(r: impl BufRead) -> Result<Vec<Observation>, ObsTraceError> {
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(first))) if first.trim() == OBS_TRACE_HEADER => {}
        Some((_, Err(e))) => return Err(ObsTraceError::Io(e)),
        _ => return Err(ObsTraceError::BadHeader),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| ObsTraceError::BadRecord { line: idx + 1, msg };
        let mut parts = line.split(',');
        let (a, b, c) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => return Err(bad("expected seen_at_ns,length_bytes,direction".into())),
        };
        let seen_at = a.parse::<u64>().map_err(|e| bad(format!("seen_at: {e}")))?;
        let wire_len = b.parse::<u32>().map_err(|e| bad(format!("length: {e}")))?;
        let direction = c.parse::<Direction>().map_err(|e| bad(e))?;
        out.push(Observation { seen_at: SimTime::from_ns(seen_at), wire_len, direction });
    }
    Ok(out)
}
