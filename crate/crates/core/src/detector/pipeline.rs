//! End-to-end profile recovery from a raw observation stream.

use crate::net::{Direction, Observation};
use crate::ptp::MessageKind;
use crate::sim::Duration;

use super::bins::{discretize, ClassKey};
use super::classify::{classify, ClassifiedObservation};
use super::motif::{fit_motif, PtpProfileEstimate};
use super::period::{estimate_period, pick_period};
use super::{DetectorConfig, DetectorError, DirectionMode};

/// Fallback picture when the stream has no recoverable period: on a quiet
/// link the lone slave-to-master class must be the delay request, even if
/// its timing is randomized. Busy or many-class streams are refused, which
/// is exactly what cover traffic exploits.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseProfile {
    pub delayreq_len: u32,
    /// Distinct (length, direction) classes and their counts.
    pub classes: Vec<(ClassKey, usize)>,
    /// 1.0 whenever the fallback fires: the rate and class-count gates are
    /// the confidence test, there is no per-packet evidence to grade.
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectedProfile {
    Periodic(PtpProfileEstimate),
    Sparse(SparseProfile),
}

impl DetectedProfile {
    pub fn confidence(&self) -> f64 {
        match self {
            DetectedProfile::Periodic(p) => p.confidence,
            DetectedProfile::Sparse(s) => s.confidence,
        }
    }

    /// Whether the profile is trustworthy enough to drive interference.
    pub fn is_armed(&self, cfg: &DetectorConfig) -> bool {
        self.confidence() >= cfg.arm_threshold
    }
}

/// Recovers the synchronization profile from a tap stream.
///
/// Traffic classes are tried busiest first: estimate a period, and when one
/// wins fit the motif at that period. If no class carries a usable period
/// the sparse fallback is attempted. Errors from the closest miss propagate
/// so callers can distinguish "nothing there" from "ambiguous without
/// direction data".
pub fn detect_profile(
    observations: &[Observation],
    mode: DirectionMode,
    cfg: &DetectorConfig,
) -> Result<DetectedProfile, DetectorError> {
    cfg.validate()?;
    if observations.is_empty() {
        return Err(DetectorError::EmptyStream);
    }
    let stream = discretize(observations);
    let with_direction = mode == DirectionMode::Observed;

    let mut sticky: Option<DetectorError> = None;
    for (class, count) in stream
        .classes(with_direction)
        .into_iter()
        .take(cfg.class_candidates)
    {
        if count < cfg.min_occurrences {
            break;
        }
        let Ok(ranked) = estimate_period(&stream, class, cfg) else {
            continue;
        };
        let Some(winner) = pick_period(&ranked, cfg) else {
            continue;
        };
        match fit_motif(&stream, winner.period_bins, mode, cfg) {
            Ok(profile) => return Ok(DetectedProfile::Periodic(profile)),
            Err(e) => {
                // Ambiguity is more informative than a plain failure.
                let keep = matches!(e, DetectorError::DirectionAmbiguous { .. })
                    || sticky.is_none();
                if keep {
                    sticky = Some(e);
                }
            }
        }
    }

    if with_direction {
        if let Some(sparse) = sparse_fallback(&stream, cfg) {
            return Ok(DetectedProfile::Sparse(sparse));
        }
    }
    Err(match sticky {
        Some(e @ DetectorError::DirectionAmbiguous { .. }) => e,
        _ => DetectorError::NoProfile,
    })
}

fn sparse_fallback(
    stream: &super::bins::BinnedStream,
    cfg: &DetectorConfig,
) -> Option<SparseProfile> {
    if stream.rate_hz() > cfg.sparse_max_rate_hz {
        return None;
    }
    let classes = stream.classes(true);
    if classes.is_empty() || classes.len() > cfg.sparse_max_classes {
        return None;
    }
    let mut sm = classes
        .iter()
        .filter(|(k, _)| k.direction == Some(Direction::SlaveToMaster));
    let delayreq_len = sm.next()?.0.wire_len;
    if sm.next().is_some() {
        return None;
    }
    Some(SparseProfile { delayreq_len, confidence: 1.0, classes })
}

/// Labels one observation against whichever profile was recovered.
pub fn classify_detected(
    obs: &Observation,
    profile: &DetectedProfile,
) -> ClassifiedObservation {
    match profile {
        DetectedProfile::Periodic(p) => classify(obs, p),
        DetectedProfile::Sparse(s) => {
            let hit = obs.direction == Direction::SlaveToMaster
                && obs.wire_len == s.delayreq_len;
            ClassifiedObservation {
                label: hit.then_some(MessageKind::DelayReq),
                phase_residual: Duration::ZERO,
            }
        }
    }
}
