//! Network path between master and slave: encryption wrapping, directional
//! delays, an observation tap, and background traffic.

pub mod crypto;
pub mod envelope;
pub mod link;
pub mod noise;
pub mod observe;

pub use crypto::{CryptoError, EncryptionScheme};
pub use envelope::{Direction, Envelope};
pub use link::{InjectedDelay, Jitter, Link, LinkError, LinkProfile};
pub use noise::{generate_noise, NoiseError, NoiseParams};
pub use observe::{
    read_obs_trace, sort_observations, write_obs_trace, Observation, ObsTraceError,
    OBS_TRACE_HEADER,
};
