//! Declarative delay strategies and the per-packet decision function.

use thiserror::Error;

use crate::detector::{classify_detected, DetectedProfile, DetectorConfig};
use crate::net::{Direction, Observation};
use crate::ptp::MessageKind;
use crate::sim::{Duration, Ppm, SimTime};

/// Small set of message kinds, used as the target predicate of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KindSet(u8);

impl KindSet {
    pub const EMPTY: KindSet = KindSet(0);

    fn bit(kind: MessageKind) -> u8 {
        1 << MessageKind::ALL
            .iter()
            .position(|k| *k == kind)
            .expect("every kind is in ALL")
    }

    pub fn of(kinds: &[MessageKind]) -> KindSet {
        KindSet(kinds.iter().fold(0, |acc, &k| acc | Self::bit(k)))
    }

    pub fn with(self, kind: MessageKind) -> KindSet {
        KindSet(self.0 | Self::bit(kind))
    }

    pub fn contains(self, kind: MessageKind) -> bool {
        self.0 & Self::bit(kind) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = MessageKind> {
        MessageKind::ALL.into_iter().filter(move |&k| self.contains(k))
    }

    /// The bundled pairing for the classic constant-delay attack.
    pub fn sync_and_followup() -> KindSet {
        KindSet::of(&[MessageKind::Sync, MessageKind::FollowUp])
    }
}

impl std::fmt::Display for KindSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for kind in self.iter() {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{kind}")?;
            first = false;
        }
        if first {
            write!(f, "none")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for KindSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(KindSet::EMPTY);
        }
        let mut set = KindSet::EMPTY;
        for part in s.split('+') {
            let kind: MessageKind = part.trim().parse()?;
            set = set.with(kind);
        }
        Ok(set)
    }
}

/// Interval of true time during which the plan is live: [start, end).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveWindow {
    pub start: SimTime,
    pub end: SimTime,
}

impl ActiveWindow {
    pub fn contains(&self, t: SimTime) -> bool {
        self.start <= t && t < self.end
    }

    pub fn always() -> ActiveWindow {
        ActiveWindow { start: SimTime::ZERO, end: SimTime::MAX }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttackKind {
    None,
    /// Constant delay on packets the classifier labels as a target kind.
    Selective { targets: KindSet, delay: Duration },
    /// Delay growing linearly with true time elapsed since the window
    /// opened, applied to target-labeled packets.
    Incremental { targets: KindSet, ramp: Ppm },
    /// Constant delay on every packet flowing one way, label-blind.
    AsymmetricLink { direction: Direction, delay: Duration },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackPlan {
    pub kind: AttackKind,
    pub window: ActiveWindow,
}

impl AttackPlan {
    pub fn none() -> AttackPlan {
        AttackPlan { kind: AttackKind::None, window: ActiveWindow::always() }
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        if self.window.start > self.window.end {
            return Err(AdversaryError::WindowInverted {
                start: self.window.start,
                end: self.window.end,
            });
        }
        match &self.kind {
            AttackKind::None => Ok(()),
            AttackKind::Selective { targets, delay } => {
                if delay.as_ns() < 0 {
                    return Err(AdversaryError::NegativeDelay { delay: *delay });
                }
                if targets.is_empty() {
                    return Err(AdversaryError::EmptyTargets);
                }
                Ok(())
            }
            AttackKind::Incremental { targets, ramp } => {
                if ramp.is_negative() {
                    return Err(AdversaryError::NegativeRamp { ramp: *ramp });
                }
                if targets.is_empty() {
                    return Err(AdversaryError::EmptyTargets);
                }
                Ok(())
            }
            AttackKind::AsymmetricLink { delay, .. } => {
                if delay.as_ns() < 0 {
                    return Err(AdversaryError::NegativeDelay { delay: *delay });
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AdversaryError {
    #[error("attack window is inverted: start {start} after end {end}")]
    WindowInverted { start: SimTime, end: SimTime },
    #[error("injected delay must be nonnegative, got {delay}")]
    NegativeDelay { delay: Duration },
    #[error("ramp must be nonnegative, got {ramp}")]
    NegativeRamp { ramp: Ppm },
    #[error("selective and incremental plans need at least one target kind")]
    EmptyTargets,
}

/// How packets are labeled on the attack path. The estimated variant uses
/// observation fields only; the oracle variant is handed ground truth and
/// exists so tests can isolate servo dynamics from classification quality.
#[derive(Debug, Clone)]
pub enum ClassifierHandle {
    Estimated(DetectedProfile),
    Oracle,
}

impl ClassifierHandle {
    pub fn label(
        &self,
        obs: &Observation,
        truth: Option<MessageKind>,
    ) -> Option<MessageKind> {
        match self {
            ClassifierHandle::Estimated(profile) => classify_detected(obs, profile).label,
            ClassifierHandle::Oracle => truth,
        }
    }

    /// Whether the handle is trustworthy enough to put the plan into effect.
    pub fn is_armed(&self, cfg: &DetectorConfig) -> bool {
        match self {
            ClassifierHandle::Estimated(profile) => profile.is_armed(cfg),
            ClassifierHandle::Oracle => true,
        }
    }
}

/// Delay injected by a linear ramp after `now - start` of elapsed true
/// time, rounded toward zero to whole nanoseconds.
pub fn incremental_schedule(ramp: Ppm, start: SimTime, now: SimTime) -> Duration {
    if now < start {
        return Duration::ZERO;
    }
    Duration::from_ns(ramp.scale_ns(now.since(start).as_ns()))
}

/// Per-packet decision with the label that drove it. `truth` is consulted
/// only by the oracle classifier.
pub fn decide_labeled(
    obs: &Observation,
    truth: Option<MessageKind>,
    plan: &AttackPlan,
    classifier: &ClassifierHandle,
    now: SimTime,
) -> (Duration, Option<MessageKind>) {
    if !plan.window.contains(now) {
        let label = match plan.kind {
            AttackKind::Selective { .. } | AttackKind::Incremental { .. } => {
                classifier.label(obs, truth)
            }
            _ => None,
        };
        return (Duration::ZERO, label);
    }
    match &plan.kind {
        AttackKind::None => (Duration::ZERO, None),
        AttackKind::Selective { targets, delay } => {
            let label = classifier.label(obs, truth);
            let hit = label.is_some_and(|k| targets.contains(k));
            (if hit { *delay } else { Duration::ZERO }, label)
        }
        AttackKind::Incremental { targets, ramp } => {
            let label = classifier.label(obs, truth);
            let hit = label.is_some_and(|k| targets.contains(k));
            let delay = if hit {
                incremental_schedule(*ramp, plan.window.start, now)
            } else {
                Duration::ZERO
            };
            (delay, label)
        }
        AttackKind::AsymmetricLink { direction, delay } => (
            if obs.direction == *direction { *delay } else { Duration::ZERO },
            None,
        ),
    }
}

/// The decision function alone, as used at the bridge.
pub fn decide_delay(
    obs: &Observation,
    truth: Option<MessageKind>,
    plan: &AttackPlan,
    classifier: &ClassifierHandle,
    now: SimTime,
) -> Duration {
    decide_labeled(obs, truth, plan, classifier, now).0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AttackStats {
    pub packets_seen: u64,
    pub packets_delayed: u64,
    pub total_injected: Duration,
    pub max_injected: Duration,
}

impl AttackStats {
    pub fn record(&mut self, injected: Duration) {
        self.packets_seen += 1;
        if injected > Duration::ZERO {
            self.packets_delayed += 1;
            self.total_injected = self.total_injected + injected;
            self.max_injected = self.max_injected.max(injected);
        }
    }
}
