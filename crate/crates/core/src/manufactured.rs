//! Manufactured-solution verification of the dispersive integrator.
//!
//! For a separable exact solution `u*(t,x) = a(t) S(x)` the forcing
//! `∂ₜu* − (1/6)∂ₓ(u*³) − β∂³ₓu* − ε∂²ₓu* − γP[u*]` is assembled from
//! analytic profile derivatives and added to the right-hand side.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dispersive::{integrate_forced, DispersiveParams};
use crate::error::Result;
use crate::field::Field;
use crate::grid::Grid1D;
use crate::initial::Ricker;
use crate::nonlocal::solve_p_regularized_coeffs;
use crate::scalar::Real;
use crate::spectral::to_spectral;
use crate::trajectory::Trajectory;

/// Separable space-time function `a(t) S(x)`.
pub trait SeparableExact: Sync {
    fn amplitude(&self, t: f64) -> f64;
    fn amplitude_rate(&self, t: f64) -> f64;
    /// `S^{(j)}(x)` for `j = 0..=3`.
    fn profile_derivative(&self, j: u32, x: f64) -> f64;

    fn exact<T: Real>(&self, grid: &Grid1D<T>, t: f64) -> Field<T>
    where
        Self: Sized,
    {
        let a = self.amplitude(t);
        Field::from_fn(grid, |x| T::of(a * self.profile_derivative(0, x.as_f64())))
    }
}

/// `u*(t,x) = cos(t) · Ricker(x)`.
#[derive(Clone, Copy, Debug)]
pub struct CosRicker(pub Ricker);

impl SeparableExact for CosRicker {
    fn amplitude(&self, t: f64) -> f64 {
        t.cos()
    }
    fn amplitude_rate(&self, t: f64) -> f64 {
        -t.sin()
    }
    fn profile_derivative(&self, j: u32, x: f64) -> f64 {
        self.0.derivative_at(j, x)
    }
}

/// `u* ≡ 0`, whose forcing vanishes.
#[derive(Clone, Copy, Debug)]
pub struct ZeroSolution;

impl SeparableExact for ZeroSolution {
    fn amplitude(&self, _: f64) -> f64 {
        0.0
    }
    fn amplitude_rate(&self, _: f64) -> f64 {
        0.0
    }
    fn profile_derivative(&self, _: u32, _: f64) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsError {
    pub t: f64,
    pub linf: f64,
    pub l2: f64,
}

/// Spectral profiles the forcing is assembled from.
struct ForcingProfiles<T: Real> {
    s: Vec<Complex<T>>,
    cube_dx: Vec<Complex<T>>,
    linear: Vec<Complex<T>>,
}

fn profiles<T: Real, E: SeparableExact>(exact: &E, grid: &Grid1D<T>, params: &DispersiveParams) -> ForcingProfiles<T> {
    let sample = |f: &dyn Fn(f64) -> f64| to_spectral(&Field::from_fn(grid, |x| T::of(f(x.as_f64()))));
    let s_hat = sample(&|x| exact.profile_derivative(0, x));
    let cube_dx = sample(&|x| {
        let s = exact.profile_derivative(0, x);
        3.0 * s * s * exact.profile_derivative(1, x)
    });
    let s2 = sample(&|x| exact.profile_derivative(2, x));
    let s3 = sample(&|x| exact.profile_derivative(3, x));
    let p_hat = solve_p_regularized_coeffs(&s_hat, T::of(params.epsilon));

    let (eps, beta, gamma) = (T::of(params.epsilon), T::of(params.beta), T::of(params.gamma));
    let zero = Complex::new(T::zero(), T::zero());
    let linear = (0..grid.n_points())
        .map(|m| {
            let source = if params.terms.source { p_hat.modes()[m] * gamma } else { zero };
            s3.modes()[m] * beta + s2.modes()[m] * eps + source
        })
        .collect();
    let cube_dx = if params.terms.advection { cube_dx.into_modes() } else { vec![zero; grid.n_points()] };
    ForcingProfiles { s: s_hat.into_modes(), cube_dx, linear }
}

/// Integrates from `u*(0)` with the manufactured forcing and reports the
/// error against `u*` at every snapshot.
pub fn integrate_manufactured<T: Real, E: SeparableExact>(
    grid: &Grid1D<T>,
    params: &DispersiveParams,
    exact: &E,
) -> Result<(Trajectory<T>, Vec<MmsError>)> {
    let prof = profiles(exact, grid, params);
    let forcing = move |t: f64| -> Vec<Complex<T>> {
        let a = exact.amplitude(t);
        let (rate, cube, lin) = (T::of(exact.amplitude_rate(t)), T::of(a * a * a / 6.0), T::of(a));
        (0..prof.s.len())
            .map(|m| prof.s[m] * rate - prof.cube_dx[m] * cube - prof.linear[m] * lin)
            .collect()
    };
    let u0 = exact.exact(grid, 0.0);
    let traj = integrate_forced(&u0, params, Some(&forcing))?;
    let errors = traj
        .times
        .iter()
        .zip(&traj.snapshots)
        .map(|(&t, u)| {
            let d = u.sub(&exact.exact(grid, t));
            MmsError { t, linf: d.linf_norm().as_f64(), l2: d.l2_norm().as_f64() }
        })
        .collect();
    Ok((traj, errors))
}
