//! Per-cycle offset-bound trace format.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::sim::{Duration, SimTime};

pub const BOUND_TRACE_HEADER: &str = "# bound-trace v1";

/// One completed cycle's guaranteed interval next to the oracle's truth.
/// `accepted` records the round-trip gate decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundRecord {
    pub completed_at: SimTime,
    pub cycle: u64,
    pub low: Duration,
    pub high: Duration,
    pub midpoint: Duration,
    pub true_offset: Duration,
    pub accepted: bool,
}

#[derive(Debug, Error)]
pub enum BoundTraceError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing or wrong header, expected {BOUND_TRACE_HEADER:?}")]
    BadHeader,
    #[error("line {line}: {msg}")]
    BadRecord { line: usize, msg: String },
}

pub fn write_bound_trace(mut w: impl Write, records: &[BoundRecord]) -> Result<(), BoundTraceError> {
    writeln!(w, "{BOUND_TRACE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.completed_at.as_ns(),
            r.cycle,
            r.low.as_ns(),
            r.high.as_ns(),
            r.midpoint.as_ns(),
            r.true_offset.as_ns(),
            u8::from(r.accepted),
        )?;
    }
    Ok(())
}

pub fn read_bound_trace(r: impl BufRead) -> Result<Vec<BoundRecord>, BoundTraceError> {
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(first))) if first.trim() == BOUND_TRACE_HEADER => {}
        Some((_, Err(e))) => return Err(BoundTraceError::Io(e)),
        _ => return Err(BoundTraceError::BadHeader),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(BoundTraceError::BadRecord {
                line: idx + 1,
                msg: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<i64, BoundTraceError> {
            fields[i].parse::<i64>().map_err(|e| BoundTraceError::BadRecord {
                line: idx + 1,
                msg: format!("field {i}: {e}"),
            })
        };
        let accepted = match fields[6] {
            "0" => false,
            "1" => true,
            other => {
                return Err(BoundTraceError::BadRecord {
                    line: idx + 1,
                    msg: format!("accepted flag must be 0 or 1, found {other:?}"),
                })
            }
        };
        out.push(BoundRecord {
            completed_at: SimTime::from_ns(num(0)? as u64),
            cycle: num(1)? as u64,
            low: Duration::from_ns(num(2)?),
            high: Duration::from_ns(num(3)?),
            midpoint: Duration::from_ns(num(4)?),
            true_offset: Duration::from_ns(num(5)?),
            accepted,
        });
    }
    Ok(out)
}
