//! Simulation substrate: time base, clock models, event scheduling.

pub mod clock;
pub mod event;
pub mod time;

pub use clock::{offset_between, ClockError, ClockModel};
pub use event::Scheduler;
pub use time::{Duration, Ppm, SimTime, TimeError};
