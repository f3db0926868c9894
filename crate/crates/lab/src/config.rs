//! JSON configuration for single runs and sweeps.
//!
//! Both schemas carry `schema_version` and reject unknown fields; parse
//! errors report the line and column of the offending token.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shortpulse::{
    DispersiveParams, FluxKind, FvParams, Grid64, PrimitiveRule, Ricker, RhsTerms, SolverSpec,
};

use crate::error::{LabError, Result};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub length: f64,
    pub x_left: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid64> {
        Ok(Grid64::new(self.n_points, self.length, self.x_left)?)
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self { n_points: self.n_points * factor, ..*self }
    }
}

/// `β = c·ε^p`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scaling {
    pub c: f64,
    pub p: f64,
}

impl Scaling {
    pub fn beta(&self, epsilon: f64) -> f64 {
        self.c * epsilon.powf(self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub grid: GridConfig,
    #[serde(default)]
    pub ic: Ricker,
    pub solver: SolverSpec,
}

fn default_p_norms() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

fn default_refinement() -> usize {
    2
}

fn default_cfl() -> f64 {
    shortpulse::fv::DEFAULT_CFL
}

fn default_true() -> bool {
    true
}

fn default_lattice() -> [usize; 2] {
    [6, 6]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    /// strictly decreasing
    pub epsilons: Vec<f64>,
    pub scaling: Scaling,
    #[serde(default)]
    pub ic: Ricker,
    pub grid: GridConfig,
    pub gamma: f64,
    pub t_final: f64,
    pub dt: f64,
    pub snapshot_interval: f64,
    pub diagnostics_interval: f64,
    pub windows: Vec<[f64; 2]>,
    #[serde(default = "default_p_norms")]
    pub p_norms: Vec<f64>,
    pub comparison_times: Vec<f64>,
    /// reference grid is this many times finer than the dispersive grid
    #[serde(default = "default_refinement")]
    pub reference_refinement: usize,
    #[serde(default = "default_cfl")]
    pub reference_cfl: f64,
    /// also run the reference on a grid twice as fine and report the change in distances
    #[serde(default = "default_true")]
    pub reference_check: bool,
    /// space × time size of the entropy test lattice
    #[serde(default = "default_lattice")]
    pub entropy_lattice: [usize; 2],
}

impl SweepConfig {
    /// The default experiment: Ricker(1, 0, 1) on `[−20, 20)` with `N = 1024`,
    /// `γ = 0.5`, `T = 2`, `ε ∈ {0.1, 0.05, 0.025, 0.0125}`, `β = ε^p`.
    pub fn standard(p: f64) -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            scaling: Scaling { c: 1.0, p },
            ic: Ricker::default(),
            grid: GridConfig { n_points: 1024, length: 40.0, x_left: -20.0 },
            gamma: 0.5,
            t_final: 2.0,
            dt: 2e-3,
            snapshot_interval: 0.05,
            diagnostics_interval: 0.05,
            windows: vec![[-10.0, 10.0]],
            p_norms: default_p_norms(),
            comparison_times: vec![1.0, 2.0],
            reference_refinement: 2,
            reference_cfl: default_cfl(),
            reference_check: true,
            entropy_lattice: default_lattice(),
        }
    }

    pub fn dispersive_params(&self, epsilon: f64) -> DispersiveParams {
        DispersiveParams {
            epsilon,
            beta: self.scaling.beta(epsilon),
            gamma: self.gamma,
            dt: self.dt,
            t_final: self.t_final,
            snapshot_interval: self.snapshot_interval,
            diagnostics_interval: self.diagnostics_interval,
            terms: RhsTerms::default(),
        }
    }

    pub fn reference_params(&self) -> FvParams {
        FvParams {
            gamma: self.gamma,
            cfl: self.reference_cfl,
            t_final: self.t_final,
            flux: FluxKind::Godunov,
            snapshot_interval: self.snapshot_interval,
            diagnostics_interval: self.diagnostics_interval,
            primitive_rule: PrimitiveRule::Trapezoid,
        }
    }

    /// Whether `β = o(ε²)`, the regime with the entropy-trend verdict.
    pub fn is_subquadratic(&self) -> bool {
        self.scaling.p > 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(LabError::config(field, msg));
        check_version(self.schema_version)?;
        if self.epsilons.len() < 3 {
            return bad("epsilons", format!("a sweep needs at least 3 epsilons, got {}", self.epsilons.len()));
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad("epsilons", "every epsilon must lie in (0, 1)".into());
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("epsilons", "epsilons must be strictly decreasing".into());
        }
        if !(self.scaling.c > 0.0) || !self.scaling.c.is_finite() {
            return bad("scaling.c", format!("must be positive, got {}", self.scaling.c));
        }
        if !(self.scaling.p >= 2.0) || !self.scaling.p.is_finite() {
            return bad("scaling.p", format!("must be at least 2, got {}", self.scaling.p));
        }
        if self.p_norms.is_empty() || self.p_norms.iter().any(|p| !(*p >= 1.0 && *p < 6.0)) {
            return bad("p_norms", "every norm exponent must lie in [1, 6)".into());
        }
        if !self.p_norms.contains(&1.0) {
            return bad("p_norms", "must include 1, the norm the verdicts are stated in".into());
        }
        if self.reference_refinement < 2 {
            return bad("reference_refinement", "the reference grid must be at least 2x finer".into());
        }
        if self.entropy_lattice.contains(&0) {
            return bad("entropy_lattice", "lattice sizes must be positive".into());
        }
        let grid = self.grid.build().map_err(|e| LabError::config("grid", e.to_string()))?;
        self.ic.validate(&grid).map_err(|e| LabError::config("ic", e.to_string()))?;
        for (i, &eps) in self.epsilons.iter().enumerate() {
            self.dispersive_params(eps)
                .validate()
                .map_err(|e| LabError::config(format!("epsilons[{i}]"), e.to_string()))?;
        }
        self.reference_params().validate().map_err(|e| LabError::config("reference", e.to_string()))?;
        let (xl, xr) = (self.grid.x_left, self.grid.x_left + self.grid.length);
        if self.windows.is_empty() {
            return bad("windows", "at least one comparison window is required".into());
        }
        for (i, [a, b]) in self.windows.iter().enumerate() {
            if !(a < b) || *a < xl || *b > xr {
                return bad(&format!("windows[{i}]"), format!("[{a}, {b}] must be a non-empty interval inside [{xl}, {xr}]"));
            }
        }
        if self.comparison_times.is_empty() {
            return bad("comparison_times", "at least one comparison time is required".into());
        }
        for (i, &t) in self.comparison_times.iter().enumerate() {
            if !is_snapshot_time(t, self.snapshot_interval, self.t_final) {
                return bad(
                    &format!("comparison_times[{i}]"),
                    format!("{t} is not a snapshot time (multiples of {} up to {})", self.snapshot_interval, self.t_final),
                );
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        check_version(self.schema_version)?;
        let grid = self.grid.build().map_err(|e| LabError::config("grid", e.to_string()))?;
        self.ic.validate(&grid).map_err(|e| LabError::config("ic", e.to_string()))?;
        match &self.solver {
            SolverSpec::Dispersive(p) => p.validate(),
            SolverSpec::FiniteVolume(p) => p.validate(),
        }
        .map_err(|e| LabError::config("solver", e.to_string()))
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != CONFIG_SCHEMA_VERSION {
        return Err(LabError::config(
            "schema_version",
            format!("unsupported version {v}, expected {CONFIG_SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

/// `t ∈ [0, T]` that the integrators record: a multiple of the interval or `T`.
pub fn is_snapshot_time(t: f64, interval: f64, t_final: f64) -> bool {
    if !(0.0..=t_final).contains(&t) {
        return false;
    }
    let k = (t / interval).round();
    (t - k * interval).abs() <= 1e-9 * interval || (t - t_final).abs() <= 1e-12 * t_final.max(1.0)
}

/// Parses and validates a config; serde errors carry line and column.
pub fn parse<C: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<C> {
    serde_json::from_str(text).map_err(|e| LabError::config(origin, format!("line {} column {}: {e}", e.line(), e.column())))
}

pub fn load_sweep(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: SweepConfig = parse(&text, &path.display().to_string())?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_run(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: RunConfig = parse(&text, &path.display().to_string())?;
    cfg.validate()?;
    Ok(cfg)
}
