//! Time-stamped solver output and its on-disk directory layout:
//!
//! ```text
//! params.json
//! diagnostics.csv
//! snapshots/NNNN.f64 + NNNN.json
//! dat/<column>.dat          two-column (t, value) series
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsRecord, ModelCoeffs, DIAGNOSTICS_SCHEMA_VERSION};
use crate::dispersive::DispersiveParams;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fv::FvParams;
use crate::grid::Grid1D;
use crate::initial::Ricker;
use crate::nonlocal::{primitive, solve_p_regularized};
use crate::scalar::Real;
use crate::snapshot::{read_snapshot_on, write_snapshot};

pub const TRAJECTORY_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum SolverSpec {
    Dispersive(DispersiveParams),
    FiniteVolume(FvParams),
}

impl SolverSpec {
    pub fn coeffs(&self) -> ModelCoeffs {
        match self {
            SolverSpec::Dispersive(p) => p.coeffs(),
            SolverSpec::FiniteVolume(p) => p.coeffs(),
        }
    }

    pub fn t_final(&self) -> f64 {
        match self {
            SolverSpec::Dispersive(p) => p.t_final,
            SolverSpec::FiniteVolume(p) => p.t_final,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    /// Integration stopped; everything recorded up to `last_valid_time` is kept.
    Aborted { last_valid_time: f64, reason: String },
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub spec: SolverSpec,
    pub grid: Grid1D<T>,
    pub datum: Option<Ricker>,
    pub times: Vec<f64>,
    pub snapshots: Vec<Field<T>>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GridSpec {
    n_points: usize,
    length: f64,
    x_left: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ParamsFile {
    schema_version: u32,
    diagnostics_schema: u32,
    #[serde(flatten)]
    spec: SolverSpec,
    grid: GridSpec,
    datum: Option<Ricker>,
    outcome: Outcome,
    snapshot_times: Vec<f64>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(spec: SolverSpec, u0: Field<T>) -> Self {
        Self {
            spec,
            grid: u0.grid().clone(),
            datum: None,
            times: vec![0.0],
            snapshots: vec![u0],
            diagnostics: Vec::new(),
            outcome: Outcome::Completed,
        }
    }

    pub fn coeffs(&self) -> ModelCoeffs {
        self.spec.coeffs()
    }

    pub fn is_complete(&self) -> bool {
        self.outcome == Outcome::Completed
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial datum")
    }

    pub fn last(&self) -> &Field<T> {
        self.snapshots.last().expect("trajectory holds the initial datum")
    }

    /// The nonlocal field paired with `u` by this trajectory's model.
    pub fn nonlocal_field(&self, u: &Field<T>) -> Result<Field<T>> {
        match &self.spec {
            SolverSpec::Dispersive(p) => Ok(solve_p_regularized(u, T::of(p.epsilon))?.p),
            SolverSpec::FiniteVolume(p) => Ok(primitive(u, p.primitive_rule)?.p),
        }
    }

    /// Snapshot whose time lies within `tol` of `t`.
    pub fn snapshot_at(&self, t: f64, tol: f64) -> Result<(usize, &Field<T>)> {
        let (i, &ti) = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .expect("non-empty");
        if (ti - t).abs() > tol {
            return Err(Error::TimeNotFound { time: t, nearest: ti });
        }
        Ok((i, &self.snapshots[i]))
    }

    pub fn push_snapshot(&mut self, t: f64, u: Field<T>) {
        self.times.push(t);
        self.snapshots.push(u);
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("snapshots"))?;
        fs::create_dir_all(dir.join("dat"))?;
        let params = ParamsFile {
            schema_version: TRAJECTORY_SCHEMA_VERSION,
            diagnostics_schema: DIAGNOSTICS_SCHEMA_VERSION,
            spec: self.spec.clone(),
            grid: GridSpec {
                n_points: self.grid.n_points(),
                length: self.grid.length().as_f64(),
                x_left: self.grid.x_left().as_f64(),
            },
            datum: self.datum,
            outcome: self.outcome.clone(),
            snapshot_times: self.times.clone(),
        };
        fs::write(dir.join("params.json"), serde_json::to_vec_pretty(&params)?)?;
        write_diagnostics_csv(&dir.join("diagnostics.csv"), &self.diagnostics)?;
        for (i, (u, &t)) in self.snapshots.iter().zip(&self.times).enumerate() {
            write_snapshot(&dir.join("snapshots").join(format!("{i:04}")), u, t)?;
        }
        for (c, name) in DiagnosticsRecord::COLUMNS.iter().enumerate().skip(1) {
            let mut body = String::new();
            for r in &self.diagnostics {
                let v = r.values();
                body.push_str(&format!("{:e} {:e}\n", v[0], v[c]));
            }
            fs::write(dir.join("dat").join(format!("{name}.dat")), body)?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let params: ParamsFile = serde_json::from_slice(&fs::read(dir.join("params.json"))?)?;
        if params.schema_version != TRAJECTORY_SCHEMA_VERSION || params.diagnostics_schema != DIAGNOSTICS_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "unsupported schema versions {}/{}",
                params.schema_version, params.diagnostics_schema
            )));
        }
        let g = &params.grid;
        let grid = Grid1D::new(g.n_points, T::of(g.length), T::of(g.x_left))?;
        let mut snapshots = Vec::with_capacity(params.snapshot_times.len());
        for (i, &t) in params.snapshot_times.iter().enumerate() {
            let (u, meta) = read_snapshot_on(&dir.join("snapshots").join(format!("{i:04}")), &grid)?;
            if meta.time != t {
                return Err(Error::Format(format!("snapshot {i} time {} != {t}", meta.time)));
            }
            snapshots.push(u);
        }
        Ok(Self {
            spec: params.spec,
            grid,
            datum: params.datum,
            times: params.snapshot_times,
            snapshots,
            diagnostics: read_diagnostics_csv(&dir.join("diagnostics.csv"))?,
            outcome: params.outcome,
        })
    }
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DiagnosticsRecord::COLUMNS)?;
    for r in rows {
        w.write_record(r.values().iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != DiagnosticsRecord::COLUMNS {
        return Err(Error::Format(format!("unexpected diagnostics header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
