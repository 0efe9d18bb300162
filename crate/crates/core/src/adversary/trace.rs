//! Attack log serialization.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::net::InjectedDelay;
use crate::ptp::MessageKind;
use crate::sim::{Duration, SimTime};

pub const ATTACK_TRACE_HEADER: &str = "# attack-trace v1";

/// One interception decision: what the packet was called and what was done
/// to it. Dropped packets log an infinite delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttackRecord {
    pub at: SimTime,
    /// Classifier label; `None` is logged as unrelated traffic.
    pub label: Option<MessageKind>,
    pub action: InjectedDelay,
}

pub fn write_attack_trace<W: Write>(
    mut w: W,
    records: &[AttackRecord],
) -> io::Result<()> {
    writeln!(w, "{ATTACK_TRACE_HEADER}")?;
    writeln!(w, "true_time_ns,classified_kind,injected_delay_ns")?;
    for r in records {
        let kind = match r.label {
            Some(k) => k.to_string(),
            None => "Noise".to_string(),
        };
        match r.action {
            InjectedDelay::Hold(d) => writeln!(w, "{},{},{}", r.at.as_ns(), kind, d.as_ns())?,
            InjectedDelay::Drop => writeln!(w, "{},{},inf", r.at.as_ns(), kind)?,
        }
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum AttackTraceError {
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: expected header {ATTACK_TRACE_HEADER:?}")]
    BadHeader { line: usize },
    #[error("line {line}: {reason}")]
    BadRecord { line: usize, reason: String },
}

pub fn read_attack_trace<R: BufRead>(r: R) -> Result<Vec<AttackRecord>, AttackTraceError> {
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(first))) if first.trim() == ATTACK_TRACE_HEADER => {}
        Some((_, Ok(_))) | None => return Err(AttackTraceError::BadHeader { line: 1 }),
        Some((_, Err(e))) => return Err(e.into()),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("true_time") {
            continue;
        }
        let bad = |reason: &str| AttackTraceError::BadRecord {
            line: line_no,
            reason: reason.to_string(),
        };
        let mut parts = trimmed.split(',');
        let at = parts
            .next()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| bad("missing or invalid timestamp"))?;
        let kind = parts.next().ok_or_else(|| bad("missing kind"))?;
        let label = if kind == "Noise" {
            None
        } else {
            Some(kind.parse::<MessageKind>().map_err(|e| bad(&e))?)
        };
        let delay = parts.next().ok_or_else(|| bad("missing delay"))?;
        let action = if delay == "inf" {
            InjectedDelay::Drop
        } else {
            let ns = delay
                .parse::<i64>()
                .ok()
                .filter(|&ns| ns >= 0)
                .ok_or_else(|| bad("delay must be a nonnegative integer or inf"))?;
            InjectedDelay::Hold(Duration::from_ns(ns))
        };
        if parts.next().is_some() {
            return Err(bad("too many fields"));
        }
        out.push(AttackRecord { at: SimTime::from_ns(at), label, action });
    }
    Ok(out)
}
