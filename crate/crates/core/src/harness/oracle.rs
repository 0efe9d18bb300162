//! Ground truth the simulated world records next to each cycle.
//!
//! Endpoints only ever see clock readings; the simulator additionally knows
//! every realized transit and both clocks' errors at every instant. That
//! privileged view decomposes each measurement exactly and checks the
//! per-cycle bounds against the offsets they are theorems about.

use crate::guard::OffsetBound;
use crate::ptp::CycleStamps;
use crate::sim::{Duration, SimTime};

/// Everything the oracle knows about one completed cycle. Clock errors are
/// sampled live at the event that produced the corresponding reading, so a
/// correction landing at the same instant as a later event never smears
/// backwards into an earlier reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleTruth {
    pub cycle: u64,
    /// True time at which the slave consumed the DelayResp.
    pub completed_at: SimTime,
    pub stamps: CycleStamps,
    pub measured: Duration,
    /// Half-nanosecond truncated from the measurement (odd round trips).
    pub remainder: i64,
    pub round_trip: Duration,
    /// Realized master-to-slave transit of the Sync, attacker included.
    pub sync_transit: Duration,
    /// Realized slave-to-master transit of the DelayReq, attacker included.
    pub req_transit: Duration,
    pub sync_injected: Duration,
    pub req_injected: Duration,
    /// Slave reading minus true time at the Sync arrival instant.
    pub slave_err_at_sync_arrival: Duration,
    /// Master reading minus true time at the Sync departure instant.
    pub master_err_at_sync_sent: Duration,
    pub slave_err_at_req_sent: Duration,
    pub master_err_at_req_arrival: Duration,
    /// Slave minus master at the Sync arrival instant.
    pub offset_at_sync_arrival: Duration,
    /// Slave minus master at the DelayReq departure instant.
    pub offset_at_req_departure: Duration,
    /// Slave minus master when the cycle completed, before any correction
    /// this cycle triggered.
    pub offset_at_completion: Duration,
}

impl CycleTruth {
    /// Attacker-free share of the Sync transit.
    pub fn sync_benign(&self) -> Duration {
        self.sync_transit - self.sync_injected
    }

    pub fn req_benign(&self) -> Duration {
        self.req_transit - self.req_injected
    }

    /// Half the difference between the two realized one-way transits: the
    /// exact amount by which path asymmetry (benign or injected) biases
    /// this cycle's measurement.
    pub fn asymmetry_half(&self) -> Duration {
        (self.sync_transit - self.req_transit).halve().0
    }

    /// How far the measurement sits from the true offset at completion.
    pub fn measured_error(&self) -> Duration {
        self.measured - self.offset_at_completion
    }

    /// Exact decomposition of the doubled measurement, in nanoseconds:
    ///
    /// ```text
    /// 2*(sync_received - sync_sent) - round_trip
    ///   == (sync_transit - req_transit)
    ///    + (slave_err_at_sync_arrival - master_err_at_sync_sent)
    ///    + (slave_err_at_req_sent - master_err_at_req_arrival)
    /// ```
    ///
    /// The left side is assembled purely from the slave's four readings;
    /// the right side purely from link-recorded transits and clock-model
    /// errors. Doubling avoids the truncated half nanosecond, so the
    /// residual must be exactly zero for every cycle of every run, drift
    /// and jitter included. A nonzero residual means the pipeline lost or
    /// invented time somewhere between emission and bookkeeping.
    pub fn identity_residual(&self) -> i64 {
        let lhs = 2 * (self.stamps.sync_received - self.stamps.sync_sent).as_ns()
            - self.round_trip.as_ns();
        let rhs = (self.sync_transit - self.req_transit).as_ns()
            + (self.slave_err_at_sync_arrival - self.master_err_at_sync_sent).as_ns()
            + (self.slave_err_at_req_sent - self.master_err_at_req_arrival).as_ns();
        lhs - rhs
    }

    /// Whether a per-cycle bound respects the offsets it is a theorem
    /// about: the upper edge caps the offset at Sync arrival, the lower
    /// edge supports the offset at DelayReq departure. With an ideal
    /// master and floors at or below the realized transits this holds
    /// exactly, whatever the slave's drift or the attacker's schedule.
    pub fn bound_respects_truth(&self, bound: &OffsetBound) -> bool {
        bound.high >= self.offset_at_sync_arrival && bound.low <= self.offset_at_req_departure
    }
}

/// Per-run truth series, in completion order.
#[derive(Debug, Clone, Default)]
pub struct OracleView {
    pub cycles: Vec<CycleTruth>,
}

impl OracleView {
    /// Largest absolute decomposition residual across the run (0 when the
    /// simulator is bookkeeping correctly).
    pub fn max_identity_residual(&self) -> i64 {
        self.cycles
            .iter()
            .map(|c| c.identity_residual().abs())
            .max()
            .unwrap_or(0)
    }

    /// True offsets at completion, one per cycle.
    pub fn true_offsets(&self) -> Vec<Duration> {
        self.cycles.iter().map(|c| c.offset_at_completion).collect()
    }
}

/// Two-sample Kolmogorov-Smirnov outcome at the 5% level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    /// Supremum distance between the two empirical CDFs.
    pub statistic: f64,
    /// Rejection threshold `1.358 * sqrt((n + m) / (n * m))`.
    pub threshold: f64,
}

impl KsOutcome {
    /// True when the samples are statistically distinguishable at 5%.
    pub fn distinguishable(&self) -> bool {
        self.statistic > self.threshold
    }
}

/// Supremum distance between the empirical CDFs of `a` and `b`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs non-empty samples");
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("non-NaN samples"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("non-NaN samples"));
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        let gap = (i as f64 / xs.len() as f64 - j as f64 / ys.len() as f64).abs();
        sup = sup.max(gap);
    }
    sup
}

/// KS test on two samples at the fixed 5% level.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> KsOutcome {
    let (n, m) = (a.len() as f64, b.len() as f64);
    KsOutcome {
        statistic: ks_statistic(a, b),
        threshold: 1.358 * ((n + m) / (n * m)).sqrt(),
    }
}

/// How well one run's observable story hides another run's damage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndistinguishabilityReport {
    /// Largest per-cycle gap between the two measured-offset series: what
    /// the slave could ever notice when comparing the two worlds.
    pub max_observable_gap: Duration,
    /// Largest per-cycle gap between the true-offset series: the damage
    /// hiding behind that observable agreement.
    pub max_hidden_gap: Duration,
}

impl IndistinguishabilityReport {
    /// Hidden damage per unit of observable difference; infinite when the
    /// observable series agree exactly.
    pub fn ratio(&self) -> f64 {
        if self.max_observable_gap == Duration::ZERO {
            return f64::INFINITY;
        }
        self.max_hidden_gap.as_ns() as f64 / self.max_observable_gap.as_ns() as f64
    }
}

/// Compares two runs cycle by cycle: one where the slave's own drift
/// explains the measurements, one where an attacker manufactures the same
/// measurements while walking the true offset away. Series are aligned by
/// index and truncated to the shorter run.
pub fn drift_vs_asymmetry_report(
    measured_a: &[Duration],
    true_a: &[Duration],
    measured_b: &[Duration],
    true_b: &[Duration],
) -> IndistinguishabilityReport {
    assert_eq!(measured_a.len(), true_a.len(), "run A series must align");
    assert_eq!(measured_b.len(), true_b.len(), "run B series must align");
    let n = measured_a.len().min(measured_b.len());
    assert!(n > 0, "need at least one aligned cycle");
    let gap = |xs: &[Duration], ys: &[Duration]| {
        (0..n)
            .map(|k| (xs[k] - ys[k]).abs())
            .max()
            .unwrap_or(Duration::ZERO)
    };
    IndistinguishabilityReport {
        max_observable_gap: gap(measured_a, measured_b),
        max_hidden_gap: gap(true_a, true_b),
    }
}
