//! Per-cycle synchronization trace format.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::sim::{Duration, SimTime};

pub const SYNC_TRACE_HEADER: &str = "# sync-trace v1";

/// One completed cycle as the harness saw it: the measurement the slave
/// made, the oracle's true offset at that moment, and the correction the
/// servo applied in response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncRecord {
    /// True time at cycle completion (DelayResp consumed).
    pub completed_at: SimTime,
    pub cycle: u64,
    pub round_trip: Duration,
    pub measured_offset: Duration,
    pub true_offset: Duration,
    pub applied_correction: Duration,
}

#[derive(Debug, Error)]
pub enum SyncTraceError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing or wrong header, expected {SYNC_TRACE_HEADER:?}")]
    BadHeader,
    #[error("line {line}: {msg}")]
    BadRecord { line: usize, msg: String },
}

pub fn write_sync_trace(mut w: impl Write, records: &[SyncRecord]) -> Result<(), SyncTraceError> {
    writeln!(w, "{SYNC_TRACE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.completed_at.as_ns(),
            r.cycle,
            r.round_trip.as_ns(),
            r.measured_offset.as_ns(),
            r.true_offset.as_ns(),
            r.applied_correction.as_ns(),
        )?;
    }
    Ok(())
}

pub fn read_sync_trace(r: impl BufRead) -> Result<Vec<SyncRecord>, SyncTraceError> {
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(first))) if first.trim() == SYNC_TRACE_HEADER => {}
        Some((_, Err(e))) => return Err(SyncTraceError::Io(e)),
        _ => return Err(SyncTraceError::BadHeader),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(SyncTraceError::BadRecord {
                line: idx + 1,
                msg: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<i64, SyncTraceError> {
            fields[i].parse::<i64>().map_err(|e| SyncTraceError::BadRecord {
                line: idx + 1,
                msg: format!("field {i}: {e}"),
            })
        };
        out.push(SyncRecord {
            completed_at: SimTime::from_ns(num(0)? as u64),
            cycle: num(1)? as u64,
            round_trip: Duration::from_ns(num(2)?),
            measured_offset: Duration::from_ns(num(3)?),
            true_offset: Duration::from_ns(num(4)?),
            applied_correction: Duration::from_ns(num(5)?),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sync_trace_round_trips() {
        let records = vec![
            SyncRecord {
                completed_at: SimTime::from_millis(264),
                cycle: 1,
                round_trip: Duration::from_millis(4),
                measured_offset: Duration::from_millis(10),
                true_offset: Duration::from_millis(10),
                applied_correction: Duration::from_millis(-10),
            },
            SyncRecord {
                completed_at: SimTime::from_millis(514),
                cycle: 2,
                round_trip: Duration::from_millis(4),
                measured_offset: Duration::from_ns(-3),
                true_offset: Duration::from_ns(0),
                applied_correction: Duration::ZERO,
            },
        ];
        let mut buf = Vec::new();
        write_sync_trace(&mut buf, &records).unwrap();
        assert!(buf.starts_with(SYNC_TRACE_HEADER.as_bytes()));
        let back = read_sync_trace(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn header_is_mandatory() {
        assert!(matches!(
            read_sync_trace("1,2,3,4,5,6\n".as_bytes()),
            Err(SyncTraceError::BadHeader)
        ));
    }
}
