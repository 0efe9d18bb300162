//! Slave clock discipline: exponential smoothing of measured offsets with
//! a step threshold.
//!
//! Each completed cycle feeds its apparent offset into an EMA. When the
//! smoothed magnitude exceeds the step threshold, the servo requests a
//! full step of the remaining amount and forgets its history (the filter
//! restarts after a step). Below the threshold it requests small per-cycle
//! slew corrections while keeping its memory.

use thiserror::Error;

use crate::sim::Duration;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum ServoError {
    #[error("smoothing factor {0} outside (0, 1]")]
    BadAlpha(f64),
    #[error("step threshold must be non-negative")]
    NegativeThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoConfig {
    /// EMA weight of the newest measurement.
    pub alpha: f64,
    /// Smoothed magnitude above which the clock is stepped instead of slewed.
    pub step_threshold: Duration,
    /// When false, measurements are filtered but no correction is emitted.
    pub enabled: bool,
}

impl Default for ServoConfig {
    fn default() -> Self {
        ServoConfig { alpha: 0.5, step_threshold: Duration::from_millis(1), enabled: true }
    }
}

impl ServoConfig {
    pub fn validate(&self) -> Result<(), ServoError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ServoError::BadAlpha(self.alpha));
        }
        if self.step_threshold.is_negative() {
            return Err(ServoError::NegativeThreshold);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServoAction {
    /// No correction (servo disabled or nothing to do).
    Hold,
    /// Step the clock by the contained amount immediately.
    Step(Duration),
    /// Gradual correction of the contained amount over the next interval.
    Slew(Duration),
}

impl ServoAction {
    /// The clock adjustment this action carries.
    pub fn amount(self) -> Duration {
        match self {
            ServoAction::Hold => Duration::ZERO,
            ServoAction::Step(d) | ServoAction::Slew(d) => d,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServoState {
    cfg: ServoConfig,
    smoothed_ns: f64,
}

impl ServoState {
    pub fn new(cfg: ServoConfig) -> Result<ServoState, ServoError> {
        cfg.validate()?;
        Ok(ServoState { cfg, smoothed_ns: 0.0 })
    }

    pub fn smoothed(&self) -> f64 {
        self.smoothed_ns
    }

    /// Folds one measured offset into the filter and decides the correction.
    /// The returned amount is the negated smoothed offset (rounded toward
    /// zero): a slave running ahead is pulled back.
    pub fn apply(&mut self, measured: Duration) -> ServoAction {
        let a = self.cfg.alpha;
        self.smoothed_ns = a * measured.as_ns() as f64 + (1.0 - a) * self.smoothed_ns;
        if !self.cfg.enabled {
            return ServoAction::Hold;
        }
        let correction = Duration::from_ns(-self.smoothed_ns.trunc() as i64);
        if self.smoothed_ns.abs() > self.cfg.step_threshold.as_ns() as f64 {
            self.smoothed_ns = 0.0;
            ServoAction::Step(correction)
        } else {
            ServoAction::Slew(correction)
        }
    }
}
