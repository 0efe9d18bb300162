//! Deterministic discrete-event simulator and analysis toolkit for delay
//! attacks on two-step clock synchronization running over encrypted links.
//!
//! The crate is organized around the stations of a man-in-the-middle
//! experiment:
//!
//! - [`sim`]: integer-nanosecond time base, drifting clock models, and a
//!   deterministic event scheduler.
//! - [`net`]: link model with per-direction delays, jitter, encryption
//!   wrapping, a passive tap, and background-traffic generation.
//! - [`ptp`]: two-step synchronization engine (Sync/FollowUp/DelayReq/
//!   DelayResp/Announce), round-trip and offset arithmetic, and the slave's
//!   correction servo.
//! - [`adversary`]: delay-attack plans driven by traffic classification.
//! - [`detector`]: metadata-only traffic analysis that recovers the protocol
//!   profile from (time, length, direction) observations.
//! - [`guard`]: countermeasures and guarantees: offset bounds from one-way
//!   delay floors, round-trip gating, replay windows, padding, and timing
//!   randomization.
//! - [`harness`]: scenario configuration, end-to-end runs with oracle
//!   decomposition, trace output, and parameter sweeps.

pub mod adversary;
pub mod detector;
pub mod guard;
pub mod harness;
pub mod net;
pub mod ptp;
pub mod sim;
