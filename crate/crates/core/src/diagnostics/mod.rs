//! Invariant records, entropy pairs, the weak entropy residual and the
//! parameter-scaling suite.

pub mod entropy;
pub mod record;
pub mod residual;
pub mod scaling;

pub use entropy::{EntropyKind, EntropyPair};
pub use record::{record, DiagnosticsRecord, EnergyTracker, ModelCoeffs, DIAGNOSTICS_SCHEMA_VERSION};
pub use residual::{entropy_residual, entropy_suite, EntropyBattery, EntropyReport, TestBattery};
pub use scaling::{scaling_suite, RunScaling, ScalingReport};
