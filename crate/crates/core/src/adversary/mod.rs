//! The bridge-position attacker.
//!
//! The attacker sits on the encrypted path, sees only packet timing, length,
//! and direction, and may hold packets back. Strategy is declared up front
//! as an [`AttackPlan`]; labeling comes from the traffic-analysis pipeline
//! (or from ground truth in oracle mode, for tests that want servo dynamics
//! without classification error). Payloads stay opaque end to end: nothing
//! on this path can read or alter carried timestamps.

mod plan;
mod trace;

pub use plan::{
    decide_delay, decide_labeled, incremental_schedule, ActiveWindow, AdversaryError,
    AttackKind, AttackPlan, AttackStats, ClassifierHandle, KindSet,
};
pub use trace::{
    read_attack_trace, write_attack_trace, AttackRecord, AttackTraceError,
    ATTACK_TRACE_HEADER,
};
