//! Countermeasures and guarantees for a synchronization slave under
//! delay attack: guaranteed offset intervals from one-way delay floors,
//! round-trip gating, anti-replay windows, length padding, and timing
//! randomization.

pub mod bounds;
pub mod padding;
pub mod replay;
pub mod timing;
pub mod trace;

pub use bounds::{
    bound_offset, midpoint_offset, one_sided_delay_suspected, residual_uncertainty,
    response_bound, rtd_gate, system_bound, BoundError, OffsetBound, OwdConstraints,
    SystemBoundParams,
};
pub use padding::{apply_padding, PaddingError, PaddingPolicy};
pub use replay::{ReplayError, ReplayPolicy, ReplayState};
pub use timing::{CycleTiming, TimingError, TimingRandomization};
pub use trace::{read_bound_trace, write_bound_trace, BoundRecord, BoundTraceError, BOUND_TRACE_HEADER};
