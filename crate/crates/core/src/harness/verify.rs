//! Post-hoc validation of recorded bound traces.
//!
//! Works purely on trace rows, so it can audit files produced by an
//! earlier run (or another implementation) without re-simulating. The
//! containment check compares against the true offset sampled at cycle
//! completion; the per-leg bound theorems hold at the Sync-arrival and
//! DelayReq-departure instants, so completion containment additionally
//! needs the slack the shipped scenarios provide (floors strictly below
//! the realized path, or a drift-free slave).

use crate::guard::{BoundRecord, OffsetBound};
use crate::ptp::SyncRecord;
use crate::sim::Duration;

/// Tally of everything wrong with a bound trace (all zero when clean).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundCheck {
    pub rows: usize,
    pub accepted_rows: usize,
    /// Rows whose interval is inverted or whose midpoint field does not
    /// match the recomputed midpoint of `[low, high]`.
    pub malformed: u64,
    /// Rows whose recorded true offset escapes `[low, high]`.
    pub containment_violations: u64,
    /// Bound rows with no sync-trace row of the same cycle agreeing on
    /// completion instant and true offset.
    pub cross_mismatches: u64,
    /// Gate-rejected rows whose sync-trace twin still applied a correction.
    pub rejected_with_correction: u64,
}

impl BoundCheck {
    pub fn is_clean(&self) -> bool {
        self.malformed == 0
            && self.containment_violations == 0
            && self.cross_mismatches == 0
            && self.rejected_with_correction == 0
    }

    /// One human-readable line per field, for command-line reporting.
    pub fn report(&self) -> String {
        format!(
            "rows={} accepted={} malformed={} containment_violations={} \
             cross_mismatches={} rejected_with_correction={}",
            self.rows,
            self.accepted_rows,
            self.malformed,
            self.containment_violations,
            self.cross_mismatches,
            self.rejected_with_correction,
        )
    }
}

/// Audits `bounds` on its own and, when `syncs` is non-empty, against the
/// per-cycle sync trace of the same run.
pub fn verify_bound_trace(bounds: &[BoundRecord], syncs: &[SyncRecord]) -> BoundCheck {
    let mut check = BoundCheck { rows: bounds.len(), ..BoundCheck::default() };
    for b in bounds {
        if b.accepted {
            check.accepted_rows += 1;
        }
        let interval = OffsetBound { low: b.low, high: b.high };
        if b.low > b.high || b.midpoint != interval.midpoint() {
            check.malformed += 1;
            continue;
        }
        if !interval.contains(b.true_offset) {
            check.containment_violations += 1;
        }
        if syncs.is_empty() {
            continue;
        }
        match syncs.iter().find(|s| s.cycle == b.cycle) {
            Some(s) if s.completed_at == b.completed_at && s.true_offset == b.true_offset => {
                if !b.accepted && s.applied_correction != Duration::ZERO {
                    check.rejected_with_correction += 1;
                }
            }
            _ => check.cross_mismatches += 1,
        }
    }
    check
}

#[cfg(test)]
mod tests {
    use crate::sim::SimTime;

    use super::*;

    fn ns(v: i64) -> Duration {
        Duration::from_ns(v)
    }

    fn row(cycle: u64, low: i64, high: i64, truth: i64, accepted: bool) -> BoundRecord {
        BoundRecord {
            completed_at: SimTime::from_ns(1000 * cycle),
            cycle,
            low: ns(low),
            high: ns(high),
            midpoint: OffsetBound { low: ns(low), high: ns(high) }.midpoint(),
            true_offset: ns(truth),
            accepted,
        }
    }

    fn twin(b: &BoundRecord, correction: i64) -> SyncRecord {
        SyncRecord {
            completed_at: b.completed_at,
            cycle: b.cycle,
            round_trip: ns(4),
            measured_offset: b.midpoint,
            true_offset: b.true_offset,
            applied_correction: ns(correction),
        }
    }

    #[test]
    fn clean_trace_passes_all_checks() {
        let bounds = vec![row(0, -7, 7, 0, true), row(1, -6, 0, -3, true)];
        let syncs: Vec<SyncRecord> = bounds.iter().map(|b| twin(b, -1)).collect();
        let check = verify_bound_trace(&bounds, &syncs);
        assert!(check.is_clean(), "{}", check.report());
        assert_eq!(check.rows, 2);
        assert_eq!(check.accepted_rows, 2);
    }

    #[test]
    fn escaping_truth_is_a_containment_violation() {
        let bounds = vec![row(0, -2, 2, 5, true)];
        let check = verify_bound_trace(&bounds, &[]);
        assert_eq!(check.containment_violations, 1);
        assert!(!check.is_clean());
    }

    #[test]
    fn inverted_interval_and_wrong_midpoint_are_malformed() {
        let mut wrong_mid = row(1, -4, 4, 0, true);
        wrong_mid.midpoint = ns(3);
        let bounds = vec![row(0, 5, -5, 0, true), wrong_mid];
        let check = verify_bound_trace(&bounds, &[]);
        assert_eq!(check.malformed, 2);
    }

    #[test]
    fn sync_trace_disagreement_is_flagged() {
        let bounds = vec![row(0, -7, 7, 0, true)];
        let mut stranger = twin(&bounds[0], 0);
        stranger.true_offset = ns(1);
        assert_eq!(verify_bound_trace(&bounds, &[stranger]).cross_mismatches, 1);
        // Missing cycle entirely.
        let unrelated = SyncRecord { cycle: 9, ..twin(&bounds[0], 0) };
        assert_eq!(verify_bound_trace(&bounds, &[unrelated]).cross_mismatches, 1);
    }

    #[test]
    fn rejected_cycle_must_not_correct() {
        let bounds = vec![row(0, -7, 7, 0, false)];
        let syncs = vec![twin(&bounds[0], -250)];
        let check = verify_bound_trace(&bounds, &syncs);
        assert_eq!(check.rejected_with_correction, 1);
        let quiet = vec![twin(&bounds[0], 0)];
        assert!(verify_bound_trace(&bounds, &quiet).is_clean());
    }
}
