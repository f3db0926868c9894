//! Sup-in-time bounds across a parameter sweep and their fitted exponents.

use serde::{Deserialize, Serialize};

use super::record::{DiagnosticsRecord, ModelCoeffs};
use crate::error::{Error, Result};
use crate::stats::fit_loglog_slope;

/// Per-run aggregates of the diagnostics time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunScaling {
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub completed: bool,
    pub t_end: f64,
    pub sup_linf_u: f64,
    pub sup_linf_p: f64,
    pub sup_l6_u: f64,
    /// `sup ε‖∂ₓu‖₂`
    pub sup_eps_l2_dxu: f64,
    /// `β ∫₀ᵀ ∫|∂ₓu ∂²ₓu| dx dt`
    pub beta_l1_dxu_dxxu: f64,
    /// `(β²/ε) ∫₀ᵀ ‖∂²ₓu‖₂² dt`
    pub beta2_l2_dxxu_sq_over_eps: f64,
    /// `sup [β‖∂ₓu‖² + γ‖P‖² + ε²γ‖∂ₓP‖² + βε e^{2γt}∫₀ᵗ e^{−2γs}‖∂²ₓu‖² ds]`
    pub sup_dissipative_energy: f64,
    pub sup_g1: f64,
    pub sup_g2: f64,
    /// `sup ε‖∂ₓP‖∞`
    pub sup_eps_linf_dxp: f64,
    /// `sup √ε‖∂ₓP‖∞`
    pub sup_sqrt_eps_linf_dxp: f64,
    pub min_energy_margin: f64,
}

fn trapezoid(t: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..t.len()).map(|k| 0.5 * (t[k] - t[k - 1]) * (f(k) + f(k - 1))).sum()
}

impl RunScaling {
    pub fn from_records(coeffs: ModelCoeffs, records: &[DiagnosticsRecord], completed: bool) -> Self {
        let ModelCoeffs { epsilon: eps, beta, gamma } = coeffs;
        let sup = |f: &dyn Fn(&DiagnosticsRecord) -> f64| records.iter().map(f).fold(0.0_f64, f64::max);
        let t: Vec<f64> = records.iter().map(|r| r.t).collect();

        let int_dxu_dxxu = trapezoid(&t, |k| records[k].l1_dxu_dxxu);
        let int_dxxu_sq = trapezoid(&t, |k| records[k].l2_dxxu.powi(2));

        // running weighted integral ∫₀ᵗ e^{−2γs}‖∂²ₓu‖² ds
        let mut weighted = 0.0;
        let mut sup_energy = 0.0_f64;
        for (k, r) in records.iter().enumerate() {
            if k > 0 {
                let p = &records[k - 1];
                let f = |r: &DiagnosticsRecord| (-2.0 * gamma * r.t).exp() * r.l2_dxxu.powi(2);
                weighted += 0.5 * (r.t - p.t) * (f(r) + f(p));
            }
            let e = beta * r.l2_dxu.powi(2)
                + gamma * r.l2_p.powi(2)
                + eps * eps * gamma * r.l2_dxp.powi(2)
                + beta * eps * (2.0 * gamma * r.t).exp() * weighted;
            sup_energy = sup_energy.max(e);
        }

        Self {
            epsilon: eps,
            beta,
            gamma,
            completed,
            t_end: t.last().copied().unwrap_or(0.0),
            sup_linf_u: sup(&|r| r.linf_u),
            sup_linf_p: sup(&|r| r.linf_p),
            sup_l6_u: sup(&|r| r.l6_u),
            sup_eps_l2_dxu: sup(&|r| eps * r.l2_dxu),
            beta_l1_dxu_dxxu: beta * int_dxu_dxxu,
            beta2_l2_dxxu_sq_over_eps: if eps > 0.0 { beta * beta * int_dxxu_sq / eps } else { 0.0 },
            sup_dissipative_energy: sup_energy,
            sup_g1: sup(&|r| r.g1.abs()),
            sup_g2: sup(&|r| r.g2),
            sup_eps_linf_dxp: sup(&|r| eps * r.linf_dxp),
            sup_sqrt_eps_linf_dxp: sup(&|r| eps.sqrt() * r.linf_dxp),
            min_energy_margin: records.iter().map(|r| r.energy_margin).fold(f64::INFINITY, f64::min),
        }
    }
}

/// Sweep-level fits and aggregates. Slopes are least-squares fits in
/// log-log coordinates; a degenerate abscissa gives slope 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub runs: Vec<RunScaling>,
    /// slope of `sup‖u‖∞` against `β`
    pub linf_u_vs_beta_slope: f64,
    /// slope of the dissipative energy against `β`, reported without a threshold
    pub dissipative_energy_vs_beta_slope: f64,
    /// slope of `sup ε‖∂ₓP‖∞` against `ε`
    pub eps_linf_dxp_vs_eps_slope: f64,
    pub max_linf_p: f64,
    /// `sup‖P‖∞` of the run with the largest `ε`
    pub coarsest_linf_p: f64,
    pub max_l6_u: f64,
    pub max_eps_l2_dxu: f64,
    pub max_beta_l1_dxu_dxxu: f64,
    pub max_beta2_l2_dxxu_sq_over_eps: f64,
}

/// Scaling report over completed runs; needs at least three.
pub fn scaling_suite(runs: &[RunScaling]) -> Result<ScalingReport> {
    let used: Vec<&RunScaling> = runs.iter().filter(|r| r.completed).collect();
    if used.len() < 3 {
        return Err(Error::TooFewRuns { needed: 3, got: used.len() });
    }
    let col = |f: &dyn Fn(&RunScaling) -> f64| used.iter().map(|r| f(r)).collect::<Vec<f64>>();
    let max = |f: &dyn Fn(&RunScaling) -> f64| used.iter().map(|r| f(r)).fold(f64::NEG_INFINITY, f64::max);
    let beta = col(&|r| r.beta);
    let eps = col(&|r| r.epsilon);
    let coarsest = used
        .iter()
        .max_by(|a, b| a.epsilon.total_cmp(&b.epsilon))
        .expect("at least three runs");
    Ok(ScalingReport {
        linf_u_vs_beta_slope: fit_loglog_slope(&beta, &col(&|r| r.sup_linf_u)),
        dissipative_energy_vs_beta_slope: fit_loglog_slope(&beta, &col(&|r| r.sup_dissipative_energy)),
        eps_linf_dxp_vs_eps_slope: fit_loglog_slope(&eps, &col(&|r| r.sup_eps_linf_dxp)),
        max_linf_p: max(&|r| r.sup_linf_p),
        coarsest_linf_p: coarsest.sup_linf_p,
        max_l6_u: max(&|r| r.sup_l6_u),
        max_eps_l2_dxu: max(&|r| r.sup_eps_l2_dxu),
        max_beta_l1_dxu_dxxu: max(&|r| r.beta_l1_dxu_dxxu),
        max_beta2_l2_dxxu_sq_over_eps: max(&|r| r.beta2_l2_dxxu_sq_over_eps),
        runs: runs.to_vec(),
    })
}
