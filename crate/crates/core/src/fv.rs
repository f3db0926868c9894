//! First-order monotone finite-volume solver for the limit equation
//! `∂ₜu + ∂ₓf(u) = γP`, `f(u) = −u³/6`, `∂ₓP = u`.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{record, EnergyTracker, ModelCoeffs};
use crate::dispersive::Cadence;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::nonlocal::{check_mean, primitive, PrimitiveRule};
use crate::scalar::Real;
use crate::trajectory::{Outcome, SolverSpec, Trajectory};

pub const DEFAULT_CFL: f64 = 0.45;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    #[default]
    Godunov,
    Rusanov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FvParams {
    pub gamma: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_final: f64,
    #[serde(default)]
    pub flux: FluxKind,
    pub snapshot_interval: f64,
    pub diagnostics_interval: f64,
    #[serde(default = "default_fv_rule")]
    pub primitive_rule: PrimitiveRule,
}

fn default_cfl() -> f64 {
    DEFAULT_CFL
}

fn default_fv_rule() -> PrimitiveRule {
    PrimitiveRule::Trapezoid
}

impl FvParams {
    pub fn coeffs(&self) -> ModelCoeffs {
        ModelCoeffs { epsilon: 0.0, beta: 0.0, gamma: self.gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParams(format!("cfl = {} outside (0, 1]", self.cfl)));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParams(format!("gamma = {} must be positive", self.gamma)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidParams(format!("t_final = {} must be non-negative", self.t_final)));
        }
        if !(self.snapshot_interval > 0.0) || !(self.diagnostics_interval > 0.0) {
            return Err(Error::InvalidParams("snapshot and diagnostics intervals must be positive".into()));
        }
        Ok(())
    }
}

/// Physical flux `f(u) = −u³/6`; non-increasing in `u`.
#[inline]
pub fn flux<T: Real>(u: T) -> T {
    -(u * u * u) / T::of(6.0)
}

/// Godunov flux. Since `f` is non-increasing, the interval extremum is
/// always attained at `u_r`.
#[inline]
pub fn godunov_flux<T: Real>(_ul: T, ur: T) -> T {
    flux(ur)
}

/// Local Lax–Friedrichs flux with speed bound `max(u_l², u_r²)/2`.
#[inline]
pub fn rusanov_flux<T: Real>(ul: T, ur: T) -> T {
    let half = T::of(0.5);
    let alpha = half * (ul * ul).max(ur * ur);
    half * (flux(ul) + flux(ur)) - half * alpha * (ur - ul)
}

impl FluxKind {
    #[inline]
    pub fn eval<T: Real>(self, ul: T, ur: T) -> T {
        match self {
            FluxKind::Godunov => godunov_flux(ul, ur),
            FluxKind::Rusanov => rusanov_flux(ul, ur),
        }
    }
}

/// CFL step `cfl · h / max_j(u_j²/2)`; infinite for the zero state.
pub fn cfl_dt<T: Real>(u: &Field<T>, cfl: f64) -> f64 {
    let umax = u.linf_norm().as_f64();
    let speed = 0.5 * umax * umax;
    if speed > 0.0 {
        cfl * u.grid().spacing().as_f64() / speed
    } else {
        f64::INFINITY
    }
}

/// `u_j − (dt/h)(F_{j+1/2} − F_{j−1/2}) + dt γ P_j` on periodic cells.
pub fn fv_step<T: Real>(u: &Field<T>, p: &Field<T>, gamma: f64, kind: FluxKind, dt: f64) -> Result<Field<T>> {
    let v = u.values();
    let n = v.len();
    let ratio = T::of(dt) / u.grid().spacing();
    let source = T::of(dt * gamma);
    // interface j+1/2 sits between cells j and j+1
    let fluxes: Vec<T> = (0..n).map(|j| kind.eval(v[j], v[(j + 1) % n])).collect();
    let out: Vec<T> = (0..n)
        .map(|j| v[j] - ratio * (fluxes[j] - fluxes[(j + n - 1) % n]) + source * p.values()[j])
        .collect();
    Field::new(u.grid().clone(), out).map_err(|_| Error::StepRejected {
        time: f64::NAN,
        reason: "non-finite state".into(),
    })
}

/// Integrates with a per-step CFL time step capped to land on output times.
pub fn fv_integrate<T: Real>(u0: &Field<T>, params: &FvParams) -> Result<Trajectory<T>> {
    params.validate()?;
    check_mean(u0)?;
    let coeffs = params.coeffs();
    let rule = params.primitive_rule;
    let mut traj = Trajectory::new(SolverSpec::FiniteVolume(params.clone()), u0.clone());
    let mut tracker = EnergyTracker::new(coeffs, u0.l2_norm().as_f64().powi(2));
    let p0 = primitive(u0, rule)?.p;
    traj.diagnostics.push(record(u0, &p0, coeffs, 0.0, &mut tracker));

    let mut clock = Cadence::new(params.t_final, params.snapshot_interval, params.diagnostics_interval);
    let mut u = u0.clone();
    let mut p = p0;
    let mut t = 0.0;
    while let Some(event) = clock.next_event() {
        while t < event.time {
            let dt = cfl_dt(&u, params.cfl).min(event.time - t);
            let next = fv_step(&u, &p, params.gamma, params.flux, dt).and_then(|next| {
                let p_next = primitive(&next, rule)?.p;
                Ok((next, p_next))
            });
            match next {
                Ok((un, pn)) => {
                    u = un;
                    p = pn;
                }
                Err(e) => {
                    traj.outcome = Outcome::Aborted { last_valid_time: t, reason: e.to_string() };
                    if traj.final_time() < t {
                        traj.push_snapshot(t, u);
                    }
                    return Ok(traj);
                }
            }
            // snap onto the event once the remainder is below rounding
            t = if event.time - (t + dt) <= 1e-13 * event.time.max(1.0) { event.time } else { t + dt };
        }
        if event.diagnostics {
            traj.diagnostics.push(record(&u, &p, coeffs, t, &mut tracker));
        }
        if event.snapshot {
            traj.push_snapshot(t, u.clone());
        }
    }
    Ok(traj)
}

/// Total variation `Σ|u_{j+1} − u_j|` over the periodic cells.
pub fn total_variation<T: Real>(u: &Field<T>) -> T {
    let v = u.values();
    let n = v.len();
    (0..n).map(|j| (v[(j + 1) % n] - v[j]).abs()).fold(T::zero(), |a, b| a + b)
}
