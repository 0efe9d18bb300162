//! Scenario wiring: builds a full master/link/attacker/slave world from a
//! declarative configuration, runs it deterministically, and keeps the
//! oracle's ground truth next to everything the endpoints and the tap saw.

mod oracle;
mod run;
mod scenario;
mod sweep;
mod verify;

pub use oracle::{
    drift_vs_asymmetry_report, ks_statistic, two_sample_ks, CycleTruth,
    IndistinguishabilityReport, KsOutcome, OracleView,
};
pub use run::{run_scenario, RunArtifacts, RunError, RunSummary, SUMMARY_HEADER};
pub use scenario::{
    bundled_scenario, bundled_scenario_names, ClassifierSpec, ClockSpec, CoverSpec, GuardSpec,
    Scenario, ScenarioError,
};
pub use sweep::{run_sweep, SweepError, SweepGrid, SweepOutcome};
pub use verify::{verify_bound_trace, BoundCheck};
