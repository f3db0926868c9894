//! Sweeps, comparisons and artifact checks for the regularized short pulse
//! solvers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
pub mod error;
pub mod harness;
pub mod mms;
pub mod remap;

pub use check::{check_dir, CheckItem, CheckReport};
pub use config::{GridConfig, RunConfig, Scaling, SweepConfig};
pub use error::{LabError, Result};
pub use harness::{run_sweep, write_sweep, ConvergenceReport, SweepRuns};
pub use mms::{run_mms, MmsConfig, MmsReport};
pub use remap::{compare, field_distance};

use shortpulse::{fv_integrate, integrate, SolverSpec, Trajectory};

/// Integrates a single configured run.
pub fn run_single(config: &RunConfig) -> Result<Trajectory<f64>> {
    config.validate()?;
    let grid = config.grid.build()?;
    let u0 = config.ic.sample(&grid)?;
    Ok(match &config.solver {
        SolverSpec::Dispersive(p) => integrate(&u0, p)?,
        SolverSpec::FiniteVolume(p) => fv_integrate(&u0, p)?,
    })
}
