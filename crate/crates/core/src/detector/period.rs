//! Period estimation for a single traffic class.
//!
//! Candidate periods come from a histogram of forward differences between
//! occupied bins. Each candidate is scored by the fraction of occurrences
//! that have a same-class successor one candidate period later (within one
//! bin either way). Periodic traffic scores near 1 even when most of the
//! stream is unrelated noise, because the score conditions on the class
//! occurrences rather than on the whole stream.

use std::collections::{HashMap, HashSet};

use super::bins::{BinnedStream, ClassKey};
use super::{DetectorConfig, DetectorError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodCandidate {
    pub period_bins: u64,
    /// Fraction of occurrences with a successor one period later.
    pub score: f64,
    /// Occurrences that had room for a successor before the stream end.
    pub support: usize,
}

/// Scores candidate periods for one class, best first. Ordering is by score
/// descending with ties broken toward the smaller period, so a harmonic
/// (twice the true period also finds successors) never displaces the
/// fundamental.
pub fn estimate_period(
    stream: &BinnedStream,
    class: ClassKey,
    cfg: &DetectorConfig,
) -> Result<Vec<PeriodCandidate>, DetectorError> {
    let bins = stream.class_bins(class);
    rank_periods(&bins, stream.last_bin(), cfg)
        .map_err(|e| match e {
            DetectorError::NoPeriodCandidates { .. } => {
                DetectorError::NoPeriodCandidates { class_len: class.wire_len }
            }
            other => other,
        })
}

/// Same scoring over an explicit ascending bin list. Used for traffic that
/// is only separable after other structure has been subtracted out.
pub fn rank_periods(
    bins: &[u64],
    last_bin: u64,
    cfg: &DetectorConfig,
) -> Result<Vec<PeriodCandidate>, DetectorError> {
    if bins.len() < cfg.min_occurrences {
        return Err(DetectorError::InsufficientOccurrences {
            have: bins.len(),
            need: cfg.min_occurrences,
        });
    }

    let mut diff_counts: HashMap<u64, usize> = HashMap::new();
    for (i, &b) in bins.iter().enumerate() {
        for &later in bins.iter().skip(i + 1).take(cfg.successor_span) {
            let d = later - b;
            if d > cfg.max_period_bins {
                break;
            }
            if d >= cfg.min_period_bins {
                *diff_counts.entry(d).or_insert(0) += 1;
            }
        }
    }
    if diff_counts.is_empty() {
        return Err(DetectorError::NoPeriodCandidates { class_len: 0 });
    }

    let mut candidates: Vec<(u64, usize)> = diff_counts.into_iter().collect();
    candidates.sort_by_key(|&(d, n)| (usize::MAX - n, d));
    candidates.truncate(cfg.candidate_limit);

    let occupied: HashSet<u64> = bins.iter().copied().collect();
    let last = last_bin;
    let mut scored = Vec::with_capacity(candidates.len());
    for (period, _) in candidates {
        let mut support = 0usize;
        let mut hits = 0usize;
        for &b in bins {
            if b + period > last {
                continue;
            }
            support += 1;
            let target = b + period;
            if occupied.contains(&target)
                || occupied.contains(&(target + 1))
                || (target > 0 && occupied.contains(&(target - 1)))
            {
                hits += 1;
            }
        }
        if support == 0 {
            continue;
        }
        scored.push(PeriodCandidate {
            period_bins: period,
            score: hits as f64 / support as f64,
            support,
        });
    }
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap()
            .then(a.period_bins.cmp(&b.period_bins))
    });
    if scored.is_empty() {
        return Err(DetectorError::NoPeriodCandidates { class_len: 0 });
    }
    Ok(scored)
}

/// Picks the winning period: the smallest candidate within `tie_margin` of
/// the best score, provided the best clears the acceptance threshold.
pub fn pick_period(
    candidates: &[PeriodCandidate],
    cfg: &DetectorConfig,
) -> Option<PeriodCandidate> {
    let best = candidates.first()?;
    if best.score < cfg.score_threshold {
        return None;
    }
    let eligible = candidates.iter().filter(|c| c.score >= best.score - cfg.tie_margin);
    eligible.min_by_key(|c| c.period_bins).copied()
}
