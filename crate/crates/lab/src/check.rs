//! Invariant suite over stored artifacts.

use std::fs;
use std::path::Path;

use serde::Serialize;
use shortpulse::diagnostics::{record, EnergyTracker};
use shortpulse::{SolverSpec, Trajectory};

use crate::config::{self, SweepConfig};
use crate::error::{LabError, Result};
use crate::harness::{assemble_report, read_sweep, report_json, InvariantMargins};
use crate::remap::time_tolerance;

pub const MEAN_U_TOL: f64 = 1e-10;
pub const MEAN_P_REL_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const ENERGY_REL_TOL: f64 = 1e-6;
pub const RIGHT_EDGE_REL_TOL: f64 = 1e-8;
/// Relative agreement of diagnostics recomputed from snapshots.
pub const RECOMPUTE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    fn push(&mut self, item: CheckItem) {
        self.items.push(item);
    }

    fn extend_prefixed(&mut self, prefix: &str, other: CheckReport) {
        for mut item in other.items {
            item.name = format!("{prefix}/{}", item.name);
            self.items.push(item);
        }
    }
}

/// Invariants of one trajectory: conservation, identities, energy margin,
/// finiteness, and agreement of the stored diagnostics with values
/// recomputed from the stored snapshots.
pub fn check_trajectory(traj: &Trajectory<f64>) -> Result<CheckReport> {
    let m = InvariantMargins::of(traj);
    let dispersive = matches!(traj.spec, SolverSpec::Dispersive(_));
    let mut r = CheckReport::default();
    r.push(CheckItem::new("finite", m.all_finite, "all diagnostics finite"));
    r.push(CheckItem::new(
        "mean_u",
        m.max_abs_mean_u <= MEAN_U_TOL,
        format!("max |mean u| = {:.3e} (tol {MEAN_U_TOL:e})", m.max_abs_mean_u),
    ));
    r.push(CheckItem::new(
        "mean_p",
        m.max_rel_mean_p <= MEAN_P_REL_TOL,
        format!("max |mean P|/|P|inf = {:.3e} (tol {MEAN_P_REL_TOL:e})", m.max_rel_mean_p),
    ));
    r.push(CheckItem::new(
        "energy_margin",
        m.min_rel_energy_margin >= -ENERGY_REL_TOL,
        format!("min relative margin = {:.3e} (tol -{ENERGY_REL_TOL:e})", m.min_rel_energy_margin),
    ));
    if dispersive {
        r.push(CheckItem::new(
            "p_identity",
            m.max_p_identity_residual <= IDENTITY_TOL,
            format!("max residual = {:.3e} (tol {IDENTITY_TOL:e})", m.max_p_identity_residual),
        ));
        r.push(CheckItem::new(
            "up_identity",
            m.max_up_identity_residual <= IDENTITY_TOL,
            format!("max residual = {:.3e} (tol {IDENTITY_TOL:e})", m.max_up_identity_residual),
        ));
        r.push(CheckItem::new(
            "right_edge",
            m.max_rel_f_right_edge <= RIGHT_EDGE_REL_TOL,
            format!("max |F(+inf)|/(L |P|inf) = {:.3e} (tol {RIGHT_EDGE_REL_TOL:e})", m.max_rel_f_right_edge),
        ));
    }

    // every column but the accumulated energy margin is a function of one snapshot
    let coeffs = traj.coeffs();
    let mut worst = 0.0_f64;
    let mut matched = 0;
    for (t, u) in traj.times.iter().zip(&traj.snapshots) {
        let Some(stored) = traj.diagnostics.iter().find(|d| (d.t - *t).abs() <= time_tolerance(*t)) else { continue };
        let p = traj.nonlocal_field(u)?;
        let mut tracker = EnergyTracker::new(coeffs, 0.0);
        let fresh = record(u, &p, coeffs, *t, &mut tracker);
        for (c, (a, b)) in stored.values().iter().zip(fresh.values()).enumerate() {
            if shortpulse::DiagnosticsRecord::COLUMNS[c] == "energy_margin" {
                continue;
            }
            let scale = a.abs().max(b.abs()).max(1e-300);
            if a != &b {
                worst = worst.max((a - b).abs() / scale);
            }
        }
        matched += 1;
    }
    r.push(CheckItem::new(
        "recomputed_diagnostics",
        worst <= RECOMPUTE_TOL,
        format!("{matched} snapshots, max relative deviation {worst:.3e} (tol {RECOMPUTE_TOL:e})"),
    ));
    Ok(r)
}

/// Checks a single run directory.
pub fn check_run_dir(dir: &Path) -> Result<CheckReport> {
    if !dir.join("params.json").exists() {
        return Err(LabError::MissingArtifact(dir.join("params.json")));
    }
    check_trajectory(&Trajectory::read_dir(dir)?)
}

/// Checks a sweep directory: every trajectory, plus a rebuild of
/// `report.json` from the stored snapshots that must match byte for byte.
pub fn check_sweep_dir(dir: &Path, jobs: usize) -> Result<CheckReport> {
    let cfg_path = dir.join("config.json");
    let report_path = dir.join("report.json");
    for p in [&cfg_path, &report_path] {
        if !p.exists() {
            return Err(LabError::MissingArtifact(p.clone()));
        }
    }
    let config: SweepConfig = config::parse(&fs::read_to_string(&cfg_path)?, &cfg_path.display().to_string())?;
    config.validate()?;
    let sweep = read_sweep(dir, &config)?;
    let mut r = CheckReport::default();
    r.extend_prefixed("reference", check_trajectory(&sweep.reference)?);
    for (i, traj) in sweep.runs.iter().enumerate() {
        r.extend_prefixed(&format!("run{i:02}"), check_trajectory(traj)?);
    }
    let rebuilt = report_json(&assemble_report(&config, &sweep, jobs)?)?;
    let stored = fs::read_to_string(&report_path)?;
    r.push(CheckItem::new(
        "report_recomputed",
        rebuilt == stored,
        if rebuilt == stored { "report.json rebuilt bit for bit".to_string() } else { "report.json differs from rebuild".to_string() },
    ));
    Ok(r)
}

/// Dispatches on the directory layout.
pub fn check_dir(dir: &Path, jobs: usize) -> Result<CheckReport> {
    if dir.join("report.json").exists() {
        check_sweep_dir(dir, jobs)
    } else {
        check_run_dir(dir)
    }
}
