//! Manufactured-solution verification runs.

use serde::{Deserialize, Serialize};
use shortpulse::stats::{fit_loglog_slope, halving_orders};
use shortpulse::{integrate_manufactured, CosRicker, DispersiveParams, Ricker, RhsTerms};

use crate::config::{GridConfig, CONFIG_SCHEMA_VERSION};
use crate::error::{LabError, Result};

pub const MIN_TEMPORAL_ORDER: f64 = 3.5;
pub const MAX_FINEST_ERROR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsConfig {
    pub schema_version: u32,
    pub grid: GridConfig,
    #[serde(default)]
    pub profile: Ricker,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub t_final: f64,
    /// decreasing; successive ratios of 2 give the halving orders
    pub dts: Vec<f64>,
}

impl Default for MmsConfig {
    fn default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            grid: GridConfig { n_points: 256, length: 40.0, x_left: -20.0 },
            profile: Ricker::default(),
            epsilon: 0.1,
            beta: 0.01,
            gamma: 0.5,
            t_final: 1.0,
            dts: vec![4e-3, 2e-3, 1e-3],
        }
    }
}

impl MmsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(LabError::config("schema_version", format!("unsupported version {}", self.schema_version)));
        }
        if self.dts.len() < 2 || self.dts.windows(2).any(|w| !(w[1] < w[0])) || self.dts.iter().any(|d| !(*d > 0.0)) {
            return Err(LabError::config("dts", "need at least two positive, strictly decreasing steps"));
        }
        if !(self.t_final > 0.0) {
            return Err(LabError::config("t_final", "must be positive"));
        }
        let grid = self.grid.build().map_err(|e| LabError::config("grid", e.to_string()))?;
        self.profile.validate(&grid).map_err(|e| LabError::config("profile", e.to_string()))?;
        self.params(self.dts[0]).validate().map_err(|e| LabError::config("params", e.to_string()))?;
        Ok(())
    }

    fn params(&self, dt: f64) -> DispersiveParams {
        DispersiveParams {
            epsilon: self.epsilon,
            beta: self.beta,
            gamma: self.gamma,
            dt,
            t_final: self.t_final,
            snapshot_interval: self.t_final,
            diagnostics_interval: self.t_final,
            terms: RhsTerms::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsReport {
    pub config: MmsConfig,
    /// max-norm error at `t_final`, one per step size
    pub linf_errors: Vec<f64>,
    pub l2_errors: Vec<f64>,
    pub halving_orders: Vec<f64>,
    pub fitted_order: f64,
    pub finest_error: f64,
    pub order_ok: bool,
    pub finest_ok: bool,
}

/// Integrates `cos(t)·S(x)` with its forcing at every step size.
pub fn run_mms(config: &MmsConfig) -> Result<MmsReport> {
    config.validate()?;
    let grid = config.grid.build()?;
    let exact = CosRicker(config.profile);
    let mut linf = Vec::new();
    let mut l2 = Vec::new();
    for &dt in &config.dts {
        let (traj, errs) = integrate_manufactured(&grid, &config.params(dt), &exact)?;
        if !traj.is_complete() {
            return Err(LabError::config("dts", format!("run with dt = {dt} aborted: {:?}", traj.outcome)));
        }
        let last = errs.last().expect("final snapshot");
        linf.push(last.linf);
        l2.push(last.l2);
    }
    let fitted_order = fit_loglog_slope(&config.dts, &linf);
    let finest_error = *linf.last().expect("at least two steps");
    Ok(MmsReport {
        config: config.clone(),
        halving_orders: halving_orders(&linf),
        fitted_order,
        finest_error,
        order_ok: fitted_order >= MIN_TEMPORAL_ORDER,
        finest_ok: finest_error <= MAX_FINEST_ERROR,
        linf_errors: linf,
        l2_errors: l2,
    })
}
