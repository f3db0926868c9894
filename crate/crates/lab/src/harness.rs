//! Sweeps of the regularized equation towards the entropy reference.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shortpulse::diagnostics::RunScaling;
use shortpulse::stats::fit_loglog_slope;
use shortpulse::{
    derivative, entropy_suite, fv_integrate, integrate, scaling_suite, EntropyBattery, EntropyReport, Field64,
    Outcome, ScalingReport, TestBattery, Trajectory,
};

use crate::config::SweepConfig;
use crate::error::{LabError, Result};
use crate::remap::{common_grid, compare, time_tolerance};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Header carried by every report.
pub const DEFAULTS_NOTE: &str = "The epsilon sequence, beta scaling constant, initial datum, grid, comparison \
windows and verdict thresholds are choices of this tool; the underlying convergence theorem prescribes none of them.";

/// Relative slack of the monotone-trend verdicts.
pub const MONOTONE_SLACK: f64 = 0.05;
/// Required ratio of the last to the first distance.
pub const FINAL_RATIO: f64 = 0.5;
/// Lower bound on the fitted exponent of `sup ε‖∂ₓP‖∞` against `ε`.
pub const DXP_SLOPE_FLOOR: f64 = 0.5 - 0.2;
/// Largest admitted relative change of the distances when the reference grid doubles.
pub const REFERENCE_SENSITIVITY: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    pub min_residual: f64,
    pub violation: f64,
    pub worst_entropy: String,
}

impl From<&EntropyReport> for EntropySummary {
    fn from(r: &EntropyReport) -> Self {
        let worst = r.pairs.iter().min_by(|a, b| a.min_residual.total_cmp(&b.min_residual));
        Self {
            min_residual: r.min_residual,
            violation: r.violation,
            worst_entropy: worst.map(|p| p.label.clone()).unwrap_or_default(),
        }
    }
}

/// Worst-case invariant values over a run's diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantMargins {
    pub max_abs_mean_u: f64,
    /// `max |mean P| / ‖P‖∞`
    pub max_rel_mean_p: f64,
    /// `min energy_margin / (e^{2γt}‖u₀‖²)`
    pub min_rel_energy_margin: f64,
    pub max_p_identity_residual: f64,
    pub max_up_identity_residual: f64,
    /// `max |F(+∞)| / (length · ‖P‖∞)`
    pub max_rel_f_right_edge: f64,
    pub all_finite: bool,
}

impl InvariantMargins {
    pub fn of(traj: &Trajectory<f64>) -> Self {
        let d = &traj.diagnostics;
        let e0 = d.first().map(|r| r.l2_u * r.l2_u).unwrap_or(0.0);
        let gamma = traj.coeffs().gamma;
        let length = traj.grid.length();
        let fold_max = |f: &dyn Fn(&shortpulse::DiagnosticsRecord) -> f64| d.iter().map(f).fold(0.0_f64, f64::max);
        let safe_div = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
        Self {
            max_abs_mean_u: fold_max(&|r| r.mean_u.abs()),
            max_rel_mean_p: fold_max(&|r| safe_div(r.mean_p.abs(), r.linf_p)),
            min_rel_energy_margin: d
                .iter()
                .map(|r| safe_div(r.energy_margin, (2.0 * gamma * r.t).exp() * e0))
                .fold(f64::INFINITY, f64::min),
            max_p_identity_residual: fold_max(&|r| r.p_identity_residual.abs()),
            max_up_identity_residual: fold_max(&|r| r.up_identity_residual.abs()),
            max_rel_f_right_edge: fold_max(&|r| safe_div(r.f_right_edge.abs(), length * r.linf_p)),
            all_finite: d.iter().all(|r| r.is_finite()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub epsilon: f64,
    pub beta: f64,
    pub outcome: Outcome,
    pub failed: bool,
    pub invariants: InvariantMargins,
    pub entropy: Option<EntropySummary>,
    pub scaling: RunScaling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub n_points: usize,
    pub spacing: f64,
    pub invariants: InvariantMargins,
    pub entropy: EntropySummary,
    /// entropy violation divided by the grid spacing
    pub violation_constant: f64,
}

/// Distances of every run to the reference for one `(t, window, p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSeries {
    pub t: f64,
    pub window: [f64; 2],
    pub p: f64,
    /// `d_n`, `None` for failed runs
    pub distances: Vec<Option<f64>>,
    /// `‖u_n − u_{n+1}‖`
    pub successive: Vec<Option<f64>>,
    /// log-log slope of `d_n` against `ε_n`
    pub rate_vs_epsilon: f64,
    pub non_increasing: bool,
    pub final_over_first: Option<f64>,
    pub halved: bool,
}

/// Behaviour of `P` and `∂ₓP` along the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PConvergence {
    pub times: Vec<f64>,
    pub window: [f64; 2],
    /// `sup |P_n − P_{n+1}|` over the window, per time
    pub p_successive_sup: Vec<Vec<Option<f64>>>,
    /// `sup |∂ₓP_n − ∂ₓP_{n+1}|` over the window, per time
    pub dxp_successive_sup: Vec<Vec<Option<f64>>>,
    /// `max ε‖∂ₓP‖∞` over the comparison times, per run
    pub eps_linf_dxp: Vec<Option<f64>>,
    pub eps_linf_dxp_slope: f64,
    /// `max_t √ε‖∂ₓP‖∞ / ‖u‖₂`, at most 1 by the interpolation inequality
    pub max_sqrt_eps_dxp_over_l2_u: f64,
}

/// Verdicts derived from a [`PConvergence`] block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PVerdict {
    pub p_non_increasing: bool,
    pub dxp_non_increasing: bool,
    pub sqrt_eps_bound: bool,
    pub slope_ok: bool,
    pub finite: bool,
}

impl PVerdict {
    pub fn holds(&self) -> bool {
        self.p_non_increasing && self.dxp_non_increasing && self.sqrt_eps_bound && self.slope_ok && self.finite
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub all_runs_completed: bool,
    /// (a) every `L¹` distance series non-increasing within the slack
    pub distances_non_increasing: bool,
    /// (b) every `L¹` distance series ends at most `FINAL_RATIO` of where it starts
    pub final_halved: bool,
    /// (c) entropy violation non-increasing; only for `β = o(ε²)`
    pub entropy_non_increasing: Option<bool>,
    pub p_convergence: PVerdict,
    pub reference_converged: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub note: String,
    pub config: SweepConfig,
    pub runs: Vec<RunSummary>,
    pub reference: ReferenceSummary,
    pub distances: Vec<DistanceSeries>,
    pub entropy_violations: Vec<Option<f64>>,
    pub scaling: Option<ScalingReport>,
    pub p_convergence: PConvergence,
    /// `max |d'_n − d_n| / d_n` over the `L¹` series, against a reference on
    /// a twice finer grid
    pub reference_sensitivity: Option<f64>,
    pub verdicts: Verdicts,
}

/// Trajectories produced by a sweep.
pub struct SweepRuns {
    pub reference: Trajectory<f64>,
    pub fine_reference: Option<Trajectory<f64>>,
    pub runs: Vec<Trajectory<f64>>,
}

fn datum(config: &SweepConfig, refinement: usize) -> Result<Field64> {
    let grid = config.grid.refined(refinement).build()?;
    Ok(config.ic.sample(&grid)?)
}

/// The finite-volume entropy reference on the refined grid.
pub fn run_reference(config: &SweepConfig) -> Result<Trajectory<f64>> {
    reference_at(config, config.reference_refinement)
}

fn reference_at(config: &SweepConfig, refinement: usize) -> Result<Trajectory<f64>> {
    Ok(fv_integrate(&datum(config, refinement)?, &config.reference_params())?)
}

/// Integrates the reference and every dispersive run on a pool of `jobs`
/// workers; results come back in configuration order.
pub fn integrate_sweep(config: &SweepConfig, jobs: usize) -> Result<SweepRuns> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    pool.install(|| {
        let u0 = datum(config, 1)?;
        let (runs, references) = rayon::join(
            || {
                config
                    .epsilons
                    .par_iter()
                    .map(|&eps| integrate(&u0, &config.dispersive_params(eps)).map_err(LabError::from))
                    .collect::<Result<Vec<_>>>()
            },
            || -> Result<_> {
                let (reference, fine) = rayon::join(
                    || run_reference(config),
                    || config.reference_check.then(|| reference_at(config, 2 * config.reference_refinement)).transpose(),
                );
                Ok((reference?, fine?))
            },
        );
        let (reference, fine_reference) = references?;
        Ok(SweepRuns { reference, fine_reference, runs: runs? })
    })
}

/// Integrates and assembles the report.
pub fn run_sweep(config: &SweepConfig, jobs: usize) -> Result<(ConvergenceReport, SweepRuns)> {
    let runs = integrate_sweep(config, jobs)?;
    let report = assemble_report(config, &runs, jobs)?;
    Ok((report, runs))
}

fn entropy_of(traj: &Trajectory<f64>, battery: &EntropyBattery, config: &SweepConfig) -> Result<EntropyReport> {
    let g = &traj.grid;
    let [nx, nt] = config.entropy_lattice;
    let tests = TestBattery::lattice((g.x_left(), g.x_right()), (0.0, traj.final_time()), nx, nt)?;
    Ok(entropy_suite(traj, battery, &tests)?)
}

fn non_increasing(values: &[Option<f64>], slack: f64) -> bool {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    present.len() == values.len() && present.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
}

fn distance_series(config: &SweepConfig, runs: &[Trajectory<f64>], reference: &Trajectory<f64>) -> Result<Vec<DistanceSeries>> {
    let mut out = Vec::new();
    for &t in &config.comparison_times {
        for &window in &config.windows {
            for &p in &config.p_norms {
                let distances: Vec<Option<f64>> = runs
                    .iter()
                    .map(|r| if r.is_complete() { compare(r, reference, window, p, t).map(Some) } else { Ok(None) })
                    .collect::<Result<_>>()?;
                let successive: Vec<Option<f64>> = runs
                    .windows(2)
                    .map(|w| {
                        if w[0].is_complete() && w[1].is_complete() {
                            compare(&w[0], &w[1], window, p, t).map(Some)
                        } else {
                            Ok(None)
                        }
                    })
                    .collect::<Result<_>>()?;
                let (eps, d): (Vec<f64>, Vec<f64>) = config
                    .epsilons
                    .iter()
                    .zip(&distances)
                    .filter_map(|(e, d)| d.map(|d| (*e, d)))
                    .unzip();
                let final_over_first = match (distances.first(), distances.last()) {
                    (Some(Some(a)), Some(Some(b))) if *a > 0.0 => Some(b / a),
                    _ => None,
                };
                out.push(DistanceSeries {
                    t,
                    window,
                    p,
                    rate_vs_epsilon: fit_loglog_slope(&eps, &d),
                    non_increasing: non_increasing(&distances, MONOTONE_SLACK),
                    halved: final_over_first.is_some_and(|r| r <= FINAL_RATIO),
                    final_over_first,
                    distances,
                    successive,
                });
            }
        }
    }
    Ok(out)
}

fn window_sup(f: &Field64, window: [f64; 2]) -> Result<f64> {
    Ok(f.lp_norm_local(shortpulse::Lp::Infinity, window[0], window[1])?)
}

fn p_convergence(config: &SweepConfig, runs: &[Trajectory<f64>]) -> Result<PConvergence> {
    let window = config.windows[0];
    let tol = time_tolerance;
    let mut p_succ = Vec::new();
    let mut dxp_succ = Vec::new();
    for &t in &config.comparison_times {
        let mut ps = Vec::new();
        let mut ds = Vec::new();
        for w in runs.windows(2) {
            if !(w[0].is_complete() && w[1].is_complete()) {
                ps.push(None);
                ds.push(None);
                continue;
            }
            let (_, a) = w[0].snapshot_at(t, tol(t))?;
            let (_, b) = w[1].snapshot_at(t, tol(t))?;
            let (pa, pb) = (w[0].nonlocal_field(a)?, w[1].nonlocal_field(b)?);
            let (pa, pb) = common_grid(&pa, &pb)?;
            ps.push(Some(window_sup(&pa.sub(&pb), window)?));
            let (da, db) = common_grid(&derivative(&pa, 1), &derivative(&pb, 1))?;
            ds.push(Some(window_sup(&da.sub(&db), window)?));
        }
        p_succ.push(ps);
        dxp_succ.push(ds);
    }

    let mut eps_dxp = Vec::new();
    let mut worst_ratio = 0.0_f64;
    for (traj, &eps) in runs.iter().zip(&config.epsilons) {
        if !traj.is_complete() {
            eps_dxp.push(None);
            continue;
        }
        let mut sup = 0.0_f64;
        for &t in &config.comparison_times {
            let (_, u) = traj.snapshot_at(t, tol(t))?;
            let dxp = derivative(&traj.nonlocal_field(u)?, 1);
            sup = sup.max(eps * dxp.linf_norm());
        }
        for rec in &traj.diagnostics {
            if rec.l2_u > 0.0 {
                worst_ratio = worst_ratio.max(eps.sqrt() * rec.linf_dxp / rec.l2_u);
            }
        }
        eps_dxp.push(Some(sup));
    }
    let (e, v): (Vec<f64>, Vec<f64>) =
        config.epsilons.iter().zip(&eps_dxp).filter_map(|(e, v)| v.map(|v| (*e, v))).unzip();
    Ok(PConvergence {
        times: config.comparison_times.clone(),
        window,
        p_successive_sup: p_succ,
        dxp_successive_sup: dxp_succ,
        eps_linf_dxp_slope: fit_loglog_slope(&e, &v),
        eps_linf_dxp: eps_dxp,
        max_sqrt_eps_dxp_over_l2_u: worst_ratio,
    })
}

/// Verdicts on `P`: consecutive sup-distances of `P` and `∂ₓP` shrink
/// (within the monotone slack), `√ε‖∂ₓP‖∞ ≤ ‖u‖₂` on every record, and
/// `ε‖∂ₓP‖∞` decays at least like `ε^{0.3}`.
pub fn check_p_convergence(pc: &PConvergence) -> PVerdict {
    let finite = pc
        .p_successive_sup
        .iter()
        .chain(&pc.dxp_successive_sup)
        .flatten()
        .chain(&pc.eps_linf_dxp)
        .all(|v| v.is_some_and(f64::is_finite))
        && pc.eps_linf_dxp_slope.is_finite();
    PVerdict {
        p_non_increasing: pc.p_successive_sup.iter().all(|s| non_increasing(s, MONOTONE_SLACK)),
        dxp_non_increasing: pc.dxp_successive_sup.iter().all(|s| non_increasing(s, MONOTONE_SLACK)),
        sqrt_eps_bound: pc.max_sqrt_eps_dxp_over_l2_u <= 1.0 + 1e-8,
        slope_ok: pc.eps_linf_dxp_slope >= DXP_SLOPE_FLOOR,
        finite,
    }
}

fn l1(series: &[DistanceSeries]) -> impl Iterator<Item = &DistanceSeries> {
    series.iter().filter(|d| d.p == 1.0)
}

/// Builds the report from integrated trajectories. Every number is a
/// function of the stored snapshots and diagnostics, so `check` can
/// rebuild it from disk.
pub fn assemble_report(config: &SweepConfig, sweep: &SweepRuns, jobs: usize) -> Result<ConvergenceReport> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    pool.install(|| {
        let u0 = datum(config, 1)?;
        let battery = EntropyBattery::for_datum(&u0)?;
        let entropy: Vec<Option<EntropyReport>> = sweep
            .runs
            .par_iter()
            .map(|r| if r.is_complete() { entropy_of(r, &battery, config).map(Some) } else { Ok(None) })
            .collect::<Result<_>>()?;
        let reference_entropy = entropy_of(&sweep.reference, &battery, config)?;

        let runs: Vec<RunSummary> = sweep
            .runs
            .iter()
            .zip(&config.epsilons)
            .zip(&entropy)
            .map(|((traj, &eps), ent)| RunSummary {
                epsilon: eps,
                beta: config.scaling.beta(eps),
                outcome: traj.outcome.clone(),
                failed: !traj.is_complete(),
                invariants: InvariantMargins::of(traj),
                entropy: ent.as_ref().map(EntropySummary::from),
                scaling: RunScaling::from_records(traj.coeffs(), &traj.diagnostics, traj.is_complete()),
            })
            .collect();

        let reference = ReferenceSummary {
            n_points: sweep.reference.grid.n_points(),
            spacing: sweep.reference.grid.spacing(),
            invariants: InvariantMargins::of(&sweep.reference),
            entropy: EntropySummary::from(&reference_entropy),
            violation_constant: reference_entropy.violation / sweep.reference.grid.spacing(),
        };

        let distances = distance_series(config, &sweep.runs, &sweep.reference)?;
        let reference_sensitivity = match &sweep.fine_reference {
            Some(fine) => {
                let finer = distance_series(config, &sweep.runs, fine)?;
                let mut worst = 0.0_f64;
                for (a, b) in distances.iter().zip(&finer).filter(|(a, _)| a.p == 1.0) {
                    for (x, y) in a.distances.iter().zip(&b.distances) {
                        if let (Some(x), Some(y)) = (x, y) {
                            worst = worst.max((y - x).abs() / x.max(f64::MIN_POSITIVE));
                        }
                    }
                }
                Some(worst)
            }
            None => None,
        };

        let entropy_violations: Vec<Option<f64>> = entropy.iter().map(|e| e.as_ref().map(|e| e.violation)).collect();
        let scaling_rows: Vec<RunScaling> = runs.iter().map(|r| r.scaling.clone()).collect();
        let scaling = scaling_suite(&scaling_rows).ok();
        let p_convergence = p_convergence(config, &sweep.runs)?;

        let verdicts = Verdicts {
            all_runs_completed: runs.iter().all(|r| !r.failed),
            distances_non_increasing: l1(&distances).all(|d| d.non_increasing),
            final_halved: l1(&distances).all(|d| d.halved),
            entropy_non_increasing: config.is_subquadratic().then(|| non_increasing(&entropy_violations, 0.0)),
            p_convergence: check_p_convergence(&p_convergence),
            reference_converged: reference_sensitivity.map(|s| s <= REFERENCE_SENSITIVITY),
        };

        Ok(ConvergenceReport {
            schema_version: REPORT_SCHEMA_VERSION,
            note: DEFAULTS_NOTE.to_string(),
            config: config.clone(),
            runs,
            reference,
            distances,
            entropy_violations,
            scaling,
            p_convergence,
            reference_sensitivity,
            verdicts,
        })
    })
}

/// Directory of run `i` inside a sweep output.
pub fn run_dir(out: &Path, i: usize) -> std::path::PathBuf {
    out.join("runs").join(format!("{i:02}"))
}

pub fn report_json(report: &ConvergenceReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

/// Writes config, trajectories, report and plot-ready distance series.
pub fn write_sweep(out: &Path, config: &SweepConfig, sweep: &SweepRuns, report: &ConvergenceReport) -> Result<()> {
    fs::create_dir_all(out.join("dat"))?;
    fs::write(out.join("config.json"), serde_json::to_string_pretty(config)? + "\n")?;
    sweep.reference.write_dir(&out.join("reference"))?;
    if let Some(fine) = &sweep.fine_reference {
        fine.write_dir(&out.join("reference_fine"))?;
    }
    for (i, traj) in sweep.runs.iter().enumerate() {
        traj.write_dir(&run_dir(out, i))?;
    }
    for (k, d) in report.distances.iter().enumerate() {
        let mut body = String::from("# epsilon distance\n");
        for (eps, v) in config.epsilons.iter().zip(&d.distances) {
            if let Some(v) = v {
                body.push_str(&format!("{eps:e} {v:e}\n"));
            }
        }
        fs::write(out.join("dat").join(format!("distance_{k:02}_t{}_p{}.dat", d.t, d.p)), body)?;
    }
    let mut body = String::from("# epsilon entropy_violation\n");
    for (eps, v) in config.epsilons.iter().zip(&report.entropy_violations) {
        if let Some(v) = v {
            body.push_str(&format!("{eps:e} {v:e}\n"));
        }
    }
    fs::write(out.join("dat").join("entropy_violation.dat"), body)?;
    fs::write(out.join("report.json"), report_json(report)?)?;
    Ok(())
}

/// Loads the trajectories of a sweep directory.
pub fn read_sweep(out: &Path, config: &SweepConfig) -> Result<SweepRuns> {
    let need = |p: std::path::PathBuf| if p.exists() { Ok(p) } else { Err(LabError::MissingArtifact(p)) };
    let reference = Trajectory::read_dir(&need(out.join("reference"))?)?;
    let fine_reference = if config.reference_check {
        Some(Trajectory::read_dir(&need(out.join("reference_fine"))?)?)
    } else {
        None
    };
    let runs = (0..config.epsilons.len())
        .map(|i| Ok(Trajectory::read_dir(&need(run_dir(out, i))?)?))
        .collect::<Result<_>>()?;
    Ok(SweepRuns { reference, fine_reference, runs })
}
