//! Pseudospectral integrator for the regularized system
//!
//! ```text
//! ∂ₜu = (1/6)∂ₓ(u³) + γP + ε∂²ₓu + β∂³ₓu,   −ε∂²ₓP + ∂ₓP = u
//! ```
//!
//! The linear part `ε∂²ₓ + β∂³ₓ` is integrated exactly per mode (integrating
//! factor); the cubic advection and the nonlocal source go through classical
//! RK4 in the transformed variable (Lawson RK4). `P` is re-solved at every stage.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{record, EnergyTracker, ModelCoeffs};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid1D;
use crate::nonlocal::{check_mean, regularized_inverse_symbol, solve_p_regularized};
use crate::scalar::Real;
use crate::spectral::{cubic_coeffs, derivative_symbol, from_spectral, to_spectral, SpectralCoeffs};
use crate::trajectory::{Outcome, SolverSpec, Trajectory};

type Spectrum<T> = Vec<Complex<T>>;

/// Safety factor of the advective time-step guard.
pub const ADVECTIVE_SAFETY: f64 = 0.5;

/// Which right-hand-side terms are active. Everything is on for physical
/// runs; switching terms off is a verification hook.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhsTerms {
    pub advection: bool,
    pub source: bool,
}

impl Default for RhsTerms {
    fn default() -> Self {
        Self { advection: true, source: true }
    }
}

impl RhsTerms {
    fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveParams {
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_interval: f64,
    pub diagnostics_interval: f64,
    #[serde(default, skip_serializing_if = "RhsTerms::is_default")]
    pub terms: RhsTerms,
}

impl DispersiveParams {
    pub fn coeffs(&self) -> ModelCoeffs {
        ModelCoeffs { epsilon: self.epsilon, beta: self.beta, gamma: self.gamma }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {} outside (0, 1)", self.epsilon));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad(format!("beta = {} outside (0, 1)", self.beta));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return bad(format!("gamma = {} must be positive", self.gamma));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return bad(format!("t_final = {} must be non-negative", self.t_final));
        }
        if !(self.snapshot_interval > 0.0) || !(self.diagnostics_interval > 0.0) {
            return bad("snapshot and diagnostics intervals must be positive".into());
        }
        Ok(())
    }
}

/// `λ(k) = −εk² − iβk³`, the symbol of `ε∂²ₓ + β∂³ₓ`.
pub fn linear_symbol<T: Real>(k: T, epsilon: T, beta: T) -> Complex<T> {
    Complex::new(-epsilon * k * k, -beta * k * k * k)
}

/// Per-slot linear symbol on a grid; the Nyquist slot drops the odd term.
pub fn linear_symbols<T: Real>(grid: &Grid1D<T>, epsilon: T, beta: T) -> Vec<Complex<T>> {
    let nyq = grid.nyquist();
    (0..grid.n_points())
        .map(|m| {
            let k = grid.wavenumber(m);
            if m == nyq {
                Complex::new(-epsilon * k * k, T::zero())
            } else {
                linear_symbol(k, epsilon, beta)
            }
        })
        .collect()
}

/// `(1/6)∂ₓ(u³) + γP` with `P` from the regularized solve.
pub fn nonlinear_rhs<T: Real>(u: &Field<T>, params: &DispersiveParams) -> Result<Field<T>> {
    check_mean(u)?;
    let stepper = Stepper::new(u.grid(), params);
    Ok(from_spectral(&SpectralCoeffs::new(u.grid(), stepper.rhs(&to_spectral(u), 0.0, None))))
}

/// Largest step admitted by the advective guard for state `u`.
pub fn advective_dt_limit<T: Real>(u: &Field<T>) -> f64 {
    let umax = u.linf_norm().as_f64();
    ADVECTIVE_SAFETY * u.grid().spacing().as_f64() / (0.5 * umax * umax).max(1.0)
}

/// Time-dependent additive forcing in spectral space.
pub type Forcing<'a, T> = &'a (dyn Fn(f64) -> Vec<Complex<T>> + Sync);

/// Reusable stage machinery for one grid and parameter set.
pub struct Stepper<T: Real> {
    grid: Grid1D<T>,
    terms: RhsTerms,
    gamma: T,
    lambda: Vec<Complex<T>>,
    dx_over_6: Vec<Complex<T>>,
    p_inverse: Vec<Complex<T>>,
    cached: Option<(f64, Spectrum<T>, Spectrum<T>)>,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: &Grid1D<T>, params: &DispersiveParams) -> Self {
        let sixth = T::one() / T::of(6.0);
        Self {
            grid: grid.clone(),
            terms: params.terms,
            gamma: T::of(params.gamma),
            lambda: linear_symbols(grid, T::of(params.epsilon), T::of(params.beta)),
            dx_over_6: derivative_symbol(grid, 1).into_iter().map(|z| z * sixth).collect(),
            p_inverse: regularized_inverse_symbol(grid, T::of(params.epsilon)),
            cached: None,
        }
    }

    /// Spectral nonlinear right-hand side plus optional forcing at time `t`.
    pub fn rhs(&self, u_hat: &SpectralCoeffs<T>, t: f64, forcing: Option<Forcing<'_, T>>) -> Vec<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; self.grid.n_points()];
        if self.terms.advection {
            let cube = cubic_coeffs(u_hat);
            for ((o, c), d) in out.iter_mut().zip(cube.modes()).zip(&self.dx_over_6) {
                *o = *o + *c * *d;
            }
        }
        if self.terms.source {
            for ((o, u), pi) in out.iter_mut().zip(u_hat.modes()).zip(&self.p_inverse) {
                *o = *o + *u * *pi * self.gamma;
            }
        }
        if let Some(f) = forcing {
            for (o, fv) in out.iter_mut().zip(f(t)) {
                *o = *o + fv;
            }
        }
        out
    }

    fn exponentials(&mut self, dt: f64) -> (&[Complex<T>], &[Complex<T>]) {
        let stale = !matches!(&self.cached, Some((h, _, _)) if *h == dt);
        if stale {
            let half = T::of(0.5 * dt);
            let full = T::of(dt);
            let e_half = self.lambda.iter().map(|l| (*l * half).exp()).collect();
            let e_full = self.lambda.iter().map(|l| (*l * full).exp()).collect();
            self.cached = Some((dt, e_half, e_full));
        }
        let (_, h, f) = self.cached.as_ref().expect("just filled");
        (h, f)
    }

    /// One Lawson RK4 step from time `t`; no guard checks.
    pub fn advance(&mut self, u_hat: &SpectralCoeffs<T>, t: f64, dt: f64, forcing: Option<Forcing<'_, T>>) -> SpectralCoeffs<T> {
        let grid = self.grid.clone();
        let (e_half, e_full) = {
            let (h, f) = self.exponentials(dt);
            (h.to_vec(), f.to_vec())
        };
        let h = T::of(dt);
        let h2 = T::of(0.5 * dt);
        let u = u_hat.modes();
        let n = u.len();

        let k1 = self.rhs(u_hat, t, forcing);
        let s2: Vec<_> = (0..n).map(|m| e_half[m] * (u[m] + k1[m] * h2)).collect();
        let k2 = self.rhs(&SpectralCoeffs::new(&grid, s2), t + 0.5 * dt, forcing);
        let s3: Vec<_> = (0..n).map(|m| e_half[m] * u[m] + k2[m] * h2).collect();
        let k3 = self.rhs(&SpectralCoeffs::new(&grid, s3), t + 0.5 * dt, forcing);
        let s4: Vec<_> = (0..n).map(|m| e_full[m] * u[m] + e_half[m] * k3[m] * h).collect();
        let k4 = self.rhs(&SpectralCoeffs::new(&grid, s4), t + dt, forcing);

        let two = T::of(2.0);
        let sixth = h / T::of(6.0);
        let mut next: Vec<_> = (0..n)
            .map(|m| {
                e_full[m] * u[m]
                    + (e_full[m] * k1[m] + e_half[m] * (k2[m] + k3[m]) * two + k4[m]) * sixth
            })
            .collect();
        next[0] = Complex::new(T::zero(), T::zero());
        SpectralCoeffs::new(&grid, next)
    }
}

/// Guarded step of a prepared stepper; shared by [`step`] and the integrators.
fn guarded_step<T: Real>(
    stepper: &mut Stepper<T>,
    u: &Field<T>,
    t: f64,
    dt: f64,
    forcing: Option<Forcing<'_, T>>,
) -> Result<Field<T>> {
    let limit = advective_dt_limit(u);
    if dt > limit {
        return Err(Error::StepRejected {
            time: t,
            reason: format!("dt = {dt:e} exceeds advective limit {limit:e}"),
        });
    }
    let next = from_spectral(&stepper.advance(&to_spectral(u), t, dt, forcing));
    if !next.is_finite() {
        return Err(Error::StepRejected { time: t, reason: "non-finite state".into() });
    }
    Ok(next)
}

/// One integrating-factor RK4 step of size `dt`.
pub fn step<T: Real>(u: &Field<T>, params: &DispersiveParams, dt: f64) -> Result<Field<T>> {
    let mut stepper = Stepper::new(u.grid(), params);
    guarded_step(&mut stepper, u, 0.0, dt, None)
}

/// Integrates to `t_final`, recording snapshots and diagnostics at their
/// cadences. A rejected step ends the run with [`Outcome::Aborted`] and the
/// trajectory recorded so far.
pub fn integrate<T: Real>(u0: &Field<T>, params: &DispersiveParams) -> Result<Trajectory<T>> {
    integrate_forced(u0, params, None)
}

pub(crate) fn integrate_forced<T: Real>(
    u0: &Field<T>,
    params: &DispersiveParams,
    forcing: Option<Forcing<'_, T>>,
) -> Result<Trajectory<T>> {
    params.validate()?;
    check_mean(u0)?;
    let coeffs = params.coeffs();
    let mut traj = Trajectory::new(SolverSpec::Dispersive(params.clone()), u0.clone());
    let mut tracker = EnergyTracker::new(coeffs, u0.l2_norm().as_f64().powi(2));
    let p0 = solve_p_regularized(u0, T::of(params.epsilon))?.p;
    traj.diagnostics.push(record(u0, &p0, coeffs, 0.0, &mut tracker));

    let mut stepper = Stepper::new(u0.grid(), params);
    let mut clock = Cadence::new(params.t_final, params.snapshot_interval, params.diagnostics_interval);
    let mut u = u0.clone();
    let mut t = 0.0;
    while let Some(event) = clock.next_event() {
        let n_sub = ((event.time - t) / params.dt - 1e-9).ceil().max(1.0) as usize;
        let h = (event.time - t) / n_sub as f64;
        for i in 0..n_sub {
            let ti = t + h * i as f64;
            match guarded_step(&mut stepper, &u, ti, h, forcing) {
                Ok(next) => u = next,
                Err(e) => {
                    traj.outcome = Outcome::Aborted { last_valid_time: ti, reason: e.to_string() };
                    if traj.final_time() < ti {
                        traj.push_snapshot(ti, u);
                    }
                    return Ok(traj);
                }
            }
        }
        t = event.time;
        if event.diagnostics {
            let p = solve_p_regularized(&u, T::of(params.epsilon))?.p;
            traj.diagnostics.push(record(&u, &p, coeffs, t, &mut tracker));
        }
        if event.snapshot {
            traj.push_snapshot(t, u.clone());
        }
    }
    Ok(traj)
}

/// Output schedule: snapshot and diagnostics times as exact multiples of
/// their intervals, plus `t_final`.
pub(crate) struct Cadence {
    t_final: f64,
    snap_interval: f64,
    diag_interval: f64,
    next_snap: u64,
    next_diag: u64,
    done: bool,
}

pub(crate) struct Event {
    pub time: f64,
    pub snapshot: bool,
    pub diagnostics: bool,
}

impl Cadence {
    pub fn new(t_final: f64, snap_interval: f64, diag_interval: f64) -> Self {
        Self { t_final, snap_interval, diag_interval, next_snap: 1, next_diag: 1, done: t_final <= 0.0 }
    }

    pub fn next_event(&mut self) -> Option<Event> {
        if self.done {
            return None;
        }
        let tol = 1e-12 * self.t_final.max(1.0);
        let ts = self.next_snap as f64 * self.snap_interval;
        let td = self.next_diag as f64 * self.diag_interval;
        let mut time = ts.min(td).min(self.t_final);
        let at_end = (time - self.t_final).abs() <= tol;
        if at_end {
            time = self.t_final;
            self.done = true;
        }
        let snapshot = at_end || (ts - time).abs() <= tol;
        let diagnostics = at_end || (td - time).abs() <= tol;
        if (ts - time).abs() <= tol {
            self.next_snap += 1;
        }
        if (td - time).abs() <= tol {
            self.next_diag += 1;
        }
        Some(Event { time, snapshot, diagnostics })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::Ricker;

    fn params() -> DispersiveParams {
        DispersiveParams {
            epsilon: 0.1,
            beta: 0.01,
            gamma: 0.5,
            dt: 1e-3,
            t_final: 0.1,
            snapshot_interval: 0.05,
            diagnostics_interval: 0.01,
            terms: RhsTerms::default(),
        }
    }

    #[test]
    fn symbol_values() {
        assert_eq!(linear_symbol(0.0, 0.1, 0.01), Complex::new(-0.0, -0.0));
        let l = linear_symbol(1.0, 0.1, 0.01);
        assert!((l - Complex::new(-0.1, -0.01)).norm() < 1e-16);
        for i in 0..1000 {
            let k = -500.0 + i as f64;
            assert!(linear_symbol(k, 0.1, 0.01).re <= 0.0);
        }
    }

    #[test]
    fn zero_is_fixed_point() {
        let g = Grid1D::<f64>::new(64, 40.0, -20.0).unwrap();
        let z = Field::zeros(&g);
        assert_eq!(nonlinear_rhs(&z, &params()).unwrap().linf_norm(), 0.0);
        assert_eq!(step(&z, &params(), 1e-3).unwrap().linf_norm(), 0.0);
    }

    #[test]
    fn linear_mode_evolves_by_exact_semigroup() {
        let l = 2.0 * std::f64::consts::PI;
        let g = Grid1D::<f64>::new(64, l, 0.0).unwrap();
        let k = 7.0;
        let mut p = params();
        p.terms = RhsTerms { advection: false, source: false };
        let u = Field::from_fn(&g, |x| (k * x).cos());
        let dt = 0.01;
        let next = step(&u, &p, dt).unwrap();
        // cos(kx) = Re e^{ikx}; mode k multiplies by e^{dt λ(k)}
        let lam = linear_symbol(k, p.epsilon, p.beta) * dt;
        let exact = Field::from_fn(&g, |x| (lam.exp() * Complex::new(0.0, k * x).exp()).re);
        assert!(next.max_abs_diff(&exact) <= 1e-12);
    }

    #[test]
    fn guard_rejects_large_step() {
        let g = Grid1D::<f64>::new(256, 40.0, -20.0).unwrap();
        let u = Ricker::default().sample(&g).unwrap();
        let limit = advective_dt_limit(&u);
        assert!(matches!(step(&u, &params(), 1.01 * limit), Err(Error::StepRejected { .. })));
        assert!(step(&u, &params(), limit).is_ok());
    }

    #[test]
    fn rhs_is_mean_free() {
        let g = Grid1D::<f64>::new(512, 40.0, -20.0).unwrap();
        let u = Ricker { amplitude: 1.3, center: -2.0, width: 1.2 }.sample(&g).unwrap();
        let r = nonlinear_rhs(&u, &params()).unwrap();
        assert!(r.mean().abs() <= 1e-12 * u.linf_norm());
    }

    #[test]
    fn zero_final_time_keeps_only_datum() {
        let g = Grid1D::<f64>::new(256, 40.0, -20.0).unwrap();
        let u = Ricker::default().sample(&g).unwrap();
        let mut p = params();
        p.t_final = 0.0;
        let tr = integrate(&u, &p).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.snapshots.len(), 1);
        assert_eq!(tr.snapshots[0], u);
    }

    #[test]
    fn cadence_hits_exact_multiples() {
        let mut c = Cadence::new(0.1, 0.05, 0.02);
        let mut got = Vec::new();
        while let Some(e) = c.next_event() {
            got.push((e.time, e.snapshot, e.diagnostics));
        }
        let times: Vec<f64> = got.iter().map(|g| g.0).collect();
        assert_eq!(times.len(), 6);
        assert!((times[2] - 0.05).abs() < 1e-15 && got[2].1 && !got[2].2);
        assert!(got.last().unwrap().1 && got.last().unwrap().2);
    }

    #[test]
    fn params_validation() {
        let mut p = params();
        p.epsilon = 1.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.gamma = 0.0;
        assert!(p.validate().is_err());
        assert!(params().validate().is_ok());
    }
}
