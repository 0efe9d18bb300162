//! Traffic analysis against the encrypted tunnel.
//!
//! The tunnel hides payloads but leaks timing, length, and direction. These
//! three features are enough to recover the synchronization schedule from a
//! tap: find a periodic length class, fold the stream modulo the period,
//! read the message motif off the phase clusters. The pipeline degrades to
//! a sparse direction-only heuristic when the stream is too quiet to hide
//! the lone slave-to-master message, and reports failure honestly when
//! neither approach fits.

mod bins;
mod classify;
mod motif;
mod period;
mod pipeline;
pub mod synth;

pub use bins::{discretize, BinEntry, BinnedStream, ClassKey, BIN_WIDTH};
pub use classify::{classify, ClassifiedObservation};
pub use motif::{fit_motif, Cluster, PtpProfileEstimate};
pub use period::{estimate_period, pick_period, rank_periods, PeriodCandidate};
pub use pipeline::{classify_detected, detect_profile, DetectedProfile, SparseProfile};

use thiserror::Error;

/// Whether packet direction is available to the analysis. Withholding it
/// models a tap that cannot tell the two flows apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionMode {
    Observed,
    Withheld,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Minimum occurrences of a class before its period is estimated.
    pub min_occurrences: usize,
    pub min_period_bins: u64,
    pub max_period_bins: u64,
    /// How many following occurrences feed the difference histogram.
    pub successor_span: usize,
    /// Candidate periods kept from the histogram.
    pub candidate_limit: usize,
    /// Minimum successor-match fraction for a period to win.
    pub score_threshold: f64,
    /// Candidates within this margin of the best score tie, and ties go to
    /// the smallest period to suppress harmonics.
    pub tie_margin: f64,
    /// Fraction of cycles that must hit a phase bin to call it a cluster.
    pub cluster_frac: f64,
    /// Minimum whole cycles in the observation window for a motif fit.
    pub min_cluster_reps: usize,
    /// How many traffic classes are tried as the cycle class.
    pub class_candidates: usize,
    /// Sparse fallback refuses streams busier than this.
    pub sparse_max_rate_hz: f64,
    /// Sparse fallback refuses streams with more distinct classes.
    pub sparse_max_classes: usize,
    /// Profiles below this confidence should not drive an attack.
    pub arm_threshold: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            min_occurrences: 3,
            min_period_bins: 2,
            max_period_bins: 4096,
            successor_span: 12,
            candidate_limit: 64,
            score_threshold: 0.5,
            tie_margin: 0.02,
            cluster_frac: 0.5,
            min_cluster_reps: 3,
            class_candidates: 8,
            sparse_max_rate_hz: 50.0,
            sparse_max_classes: 4,
            arm_threshold: 0.9,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), DetectorError> {
        if self.min_occurrences < 2 {
            return Err(DetectorError::BadConfig(
                "min_occurrences must be at least 2".into(),
            ));
        }
        if self.min_period_bins < 1 || self.max_period_bins <= self.min_period_bins {
            return Err(DetectorError::BadConfig(
                "period bounds must satisfy 1 <= min < max".into(),
            ));
        }
        for (name, v) in [
            ("score_threshold", self.score_threshold),
            ("tie_margin", self.tie_margin),
            ("cluster_frac", self.cluster_frac),
            ("arm_threshold", self.arm_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(DetectorError::BadConfig(format!(
                    "{name} must lie in [0, 1]"
                )));
            }
        }
        if self.successor_span == 0 || self.candidate_limit == 0 || self.class_candidates == 0
        {
            return Err(DetectorError::BadConfig(
                "span, candidate and class limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DetectorError {
    #[error("need {need} occurrences of a traffic class, have {have}")]
    InsufficientOccurrences { have: usize, need: usize },
    #[error("no periodic structure in class of length {class_len}")]
    NoPeriodCandidates { class_len: u32 },
    #[error("cycle period of {period_bins} bins cannot hold four slots")]
    PeriodTooShort { period_bins: u64 },
    #[error("window spans {have_cycles} cycles, need {need_cycles}")]
    InsufficientWindow { have_cycles: u64, need_cycles: u64 },
    #[error("no four-slot motif: {clusters} phase clusters found")]
    MotifNotFound { clusters: usize },
    #[error("slots are interchangeable without direction: {candidates} candidates")]
    DirectionAmbiguous { candidates: usize },
    #[error("empty observation stream")]
    EmptyStream,
    #[error("no synchronization profile recoverable from the stream")]
    NoProfile,
    #[error("invalid detector configuration: {0}")]
    BadConfig(String),
}
