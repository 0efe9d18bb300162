//! Two-step synchronization protocol: messages, cycle arithmetic, state
//! machines, and the slave servo.

pub mod cycle;
pub mod engine;
pub mod msg;
pub mod servo;
pub mod trace;

pub use cycle::{compute_offset, compute_rtd, CycleError, CycleStamps, SyncCycle};
pub use engine::{EngineConfig, Master, SlaveEngine, SlaveOutcome, SlaveStats};
pub use msg::{MessageKind, PtpPayload};
pub use servo::{ServoAction, ServoConfig, ServoError, ServoState};
pub use trace::{read_sync_trace, write_sync_trace, SyncRecord, SyncTraceError, SYNC_TRACE_HEADER};
