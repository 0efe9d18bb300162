//! Background traffic as seen by the observer.
//!
//! Noise models unrelated packets sharing the observed path: per
//! millisecond bin, with probability `p`, one packet of uniformly random
//! length and direction appears. Noise exists only in the observation
//! domain; it does not interact with protocol delivery.

use rand::Rng;
use thiserror::Error;

use crate::sim::{Duration, SimTime};

use super::envelope::Direction;
use super::observe::Observation;

pub const NOISE_BIN: Duration = Duration::from_millis(1);

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum NoiseError {
    #[error("noise probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("noise length range inverted")]
    InvertedLengths,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Probability that a given millisecond bin carries one noise packet.
    pub per_bin_probability: f64,
    pub min_len: u32,
    pub max_len: u32,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..=1.0).contains(&self.per_bin_probability) {
            return Err(NoiseError::BadProbability(self.per_bin_probability));
        }
        if self.min_len > self.max_len {
            return Err(NoiseError::InvertedLengths);
        }
        Ok(())
    }
}

/// Generates noise observations over `[start, end)`, at most one per bin,
/// placed uniformly within its bin.
pub fn generate_noise(
    params: &NoiseParams,
    start: SimTime,
    end: SimTime,
    rng: &mut impl Rng,
) -> Result<Vec<Observation>, NoiseError> {
    params.validate()?;
    let bin = NOISE_BIN.as_ns() as u64;
    let mut out = Vec::new();
    if params.per_bin_probability == 0.0 || end <= start {
        return Ok(out);
    }
    let first_bin = start.as_ns() / bin;
    let last_bin = (end.as_ns() - 1) / bin;
    for b in first_bin..=last_bin {
        if rng.gen_bool(params.per_bin_probability) {
            let at = b * bin + rng.gen_range(0..bin);
            if at < start.as_ns() || at >= end.as_ns() {
                continue;
            }
            let wire_len = rng.gen_range(params.min_len..=params.max_len);
            let direction = if rng.gen::<bool>() {
                Direction::MasterToSlave
            } else {
                Direction::SlaveToMaster
            };
            out.push(Observation { seen_at: SimTime::from_ns(at), wire_len, direction });
        }
    }
    Ok(out)
}
