//! Per-snapshot invariant records and the energy/Lyapunov functionals.

use serde::{Deserialize, Serialize};

use crate::field::{Field, Lp};
use crate::nonlocal::right_edge_value;
use crate::scalar::Real;
use crate::spectral::derivative;

/// Version of the `diagnostics.csv` column layout.
pub const DIAGNOSTICS_SCHEMA_VERSION: u32 = 1;

/// Coefficients of the model a trajectory solves. The limit equation has
/// `epsilon = beta = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCoeffs {
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// One row of `diagnostics.csv`. Column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_u: f64,
    pub l6_u: f64,
    pub linf_u: f64,
    pub mean_u: f64,
    pub mean_p: f64,
    pub linf_p: f64,
    pub l2_p: f64,
    pub l2_dxp: f64,
    pub l2_dxxp: f64,
    pub linf_dxp: f64,
    pub l2_dxu: f64,
    pub l2_dxxu: f64,
    /// `∫ |∂ₓu ∂²ₓu| dx`
    pub l1_dxu_dxxu: f64,
    pub g1: f64,
    pub g2: f64,
    /// `e^{2γt}‖u₀‖² − ‖u‖² − 2ε∫₀ᵗ e^{2γ(t−s)}‖∂ₓu‖² ds`; non-negative in exact arithmetic.
    pub energy_margin: f64,
    /// `(ε²‖∂²ₓP‖² + ‖∂ₓP‖² − ‖u‖²) / ‖u‖²`
    pub p_identity_residual: f64,
    /// `(∫uP − ε‖∂ₓP‖²) / scale`, scale `ε‖∂ₓP‖²` (or `‖u‖²` when that vanishes)
    pub up_identity_residual: f64,
    /// `∫P` over the whole period: the discrete `F(+∞)`.
    pub f_right_edge: f64,
    /// `P` at the left grid edge.
    pub p_left_edge: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 21] = [
        "t",
        "l2_u",
        "l6_u",
        "linf_u",
        "mean_u",
        "mean_p",
        "linf_p",
        "l2_p",
        "l2_dxp",
        "l2_dxxp",
        "linf_dxp",
        "l2_dxu",
        "l2_dxxu",
        "l1_dxu_dxxu",
        "g1",
        "g2",
        "energy_margin",
        "p_identity_residual",
        "up_identity_residual",
        "f_right_edge",
        "p_left_edge",
    ];

    pub fn values(&self) -> [f64; 21] {
        [
            self.t,
            self.l2_u,
            self.l6_u,
            self.linf_u,
            self.mean_u,
            self.mean_p,
            self.linf_p,
            self.l2_p,
            self.l2_dxp,
            self.l2_dxxp,
            self.linf_dxp,
            self.l2_dxu,
            self.l2_dxxu,
            self.l1_dxu_dxxu,
            self.g1,
            self.g2,
            self.energy_margin,
            self.p_identity_residual,
            self.up_identity_residual,
            self.f_right_edge,
            self.p_left_edge,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// Running trapezoidal time integral behind `energy_margin`.
#[derive(Clone, Debug)]
pub struct EnergyTracker {
    gamma: f64,
    epsilon: f64,
    u0_sq: f64,
    last: Option<(f64, f64)>,
    /// `∫₀ᵗ e^{−2γs}‖∂ₓu(s)‖² ds`
    weighted_integral: f64,
}

impl EnergyTracker {
    pub fn new(coeffs: ModelCoeffs, u0_l2_sq: f64) -> Self {
        Self {
            gamma: coeffs.gamma,
            epsilon: coeffs.epsilon,
            u0_sq: u0_l2_sq,
            last: None,
            weighted_integral: 0.0,
        }
    }

    /// Adds the sample `‖∂ₓu(t)‖²` and returns the margin at `t`.
    pub fn advance(&mut self, t: f64, u_sq: f64, dxu_sq: f64) -> f64 {
        let w = (-2.0 * self.gamma * t).exp() * dxu_sq;
        if let Some((t_prev, w_prev)) = self.last {
            self.weighted_integral += 0.5 * (t - t_prev) * (w + w_prev);
        }
        self.last = Some((t, w));
        let growth = (2.0 * self.gamma * t).exp();
        growth * self.u0_sq - u_sq - 2.0 * self.epsilon * growth * self.weighted_integral
    }

    pub fn initial_energy(&self) -> f64 {
        self.u0_sq
    }
}

/// Computes every field of [`DiagnosticsRecord`] for the state `(u, p)` at `t`.
pub fn record<T: Real>(
    u: &Field<T>,
    p: &Field<T>,
    coeffs: ModelCoeffs,
    t: f64,
    tracker: &mut EnergyTracker,
) -> DiagnosticsRecord {
    let f = |x: T| x.as_f64();
    let (eps, beta, gamma) = (coeffs.epsilon, coeffs.beta, coeffs.gamma);

    let dxu = derivative(u, 1);
    let dxxu = derivative(u, 2);
    let dxp = derivative(p, 1);
    let dxxp = derivative(p, 2);

    let l2_u = f(u.l2_norm());
    let l2_p = f(p.l2_norm());
    let l2_dxu = f(dxu.l2_norm());
    let l2_dxxu = f(dxxu.l2_norm());
    let l2_dxp = f(dxp.l2_norm());
    let l2_dxxp = f(dxxp.l2_norm());
    let l6_u = f(u.lp_norm(Lp::Finite(6.0)));
    let u4 = f(u.map(|v| v * v * v * v).integral());
    let up = f(u.inner(p));

    let u_sq = l2_u * l2_u;
    let dxp_sq = l2_dxp * l2_dxp;
    let p_identity_residual = if u_sq > 0.0 {
        (eps * eps * l2_dxxp * l2_dxxp + dxp_sq - u_sq) / u_sq
    } else {
        0.0
    };
    let up_scale = if eps * dxp_sq > 0.0 { eps * dxp_sq } else { u_sq };
    let up_identity_residual = if up_scale > 0.0 { (up - eps * dxp_sq) / up_scale } else { 0.0 };

    let g1 = beta * l2_dxu * l2_dxu - u4 / 12.0 + gamma * l2_p * l2_p + eps * eps * gamma * dxp_sq;
    let g2 = l6_u.powi(6) / 6.0 + 1.5 * eps * eps * l2_dxu * l2_dxu;

    DiagnosticsRecord {
        t,
        l2_u,
        l6_u,
        linf_u: f(u.linf_norm()),
        mean_u: f(u.mean()),
        mean_p: f(p.mean()),
        linf_p: f(p.linf_norm()),
        l2_p,
        l2_dxp,
        l2_dxxp,
        linf_dxp: f(dxp.linf_norm()),
        l2_dxu,
        l2_dxxu,
        l1_dxu_dxxu: f(dxu.zip_map(&dxxu, |a, b| (a * b).abs()).integral()),
        g1,
        g2,
        energy_margin: tracker.advance(t, u_sq, l2_dxu * l2_dxu),
        p_identity_residual,
        up_identity_residual,
        f_right_edge: f(right_edge_value(p)),
        p_left_edge: f(p.values()[0]),
    }
}
