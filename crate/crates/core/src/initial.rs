//! Admissible initial data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid1D;
use crate::scalar::Real;

/// Minimum distance from the centre to either domain edge, in widths.
pub const EDGE_CLEARANCE_WIDTHS: f64 = 8.0;
/// Minimum width, in grid spacings.
pub const MIN_WIDTH_SPACINGS: f64 = 4.0;

/// `amplitude * d²/dx² exp(-((x - center)/width)²)`.
///
/// Both the datum and its primitive `amplitude * d/dx exp(..)` integrate to
/// zero, so the zero-mean conditions on `u₀` and on `P₀` hold at once.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ricker {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Default for Ricker {
    fn default() -> Self {
        Self { amplitude: 1.0, center: 0.0, width: 1.0 }
    }
}

/// `d^n/ds^n exp(-s²) = (-1)^n H_n(s) exp(-s²)` with physicists' Hermite `H_n`.
pub fn gaussian_derivative(order: u32, s: f64) -> f64 {
    let (mut h_prev, mut h) = (1.0, 2.0 * s);
    let hn = match order {
        0 => 1.0,
        _ => {
            for n in 1..order {
                let next = 2.0 * s * h - 2.0 * n as f64 * h_prev;
                h_prev = h;
                h = next;
            }
            h
        }
    };
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * hn * (-s * s).exp()
}

impl Ricker {
    /// Derivative of order `order` of `amplitude * exp(-((x-c)/w)²)` at `x`;
    /// the datum itself is `order = 2`, its primitive `order = 1`.
    pub fn gaussian_deriv(&self, order: u32, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        self.amplitude * gaussian_derivative(order, s) / self.width.powi(order as i32)
    }

    /// `j`-th derivative of the datum.
    pub fn derivative_at(&self, j: u32, x: f64) -> f64 {
        self.gaussian_deriv(j + 2, x)
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.derivative_at(0, x)
    }

    /// Samples the `j`-th derivative of the datum on `grid` without admissibility checks.
    pub fn sample_derivative<T: Real>(&self, j: u32, grid: &Grid1D<T>) -> Field<T> {
        Field::from_fn(grid, |x| T::of(self.derivative_at(j, x.as_f64())))
    }

    /// Analytic primitive `∫_{-∞}^x u₀`.
    pub fn sample_primitive<T: Real>(&self, grid: &Grid1D<T>) -> Field<T> {
        Field::from_fn(grid, |x| T::of(self.gaussian_deriv(1, x.as_f64())))
    }

    /// Analytic second primitive.
    pub fn sample_second_primitive<T: Real>(&self, grid: &Grid1D<T>) -> Field<T> {
        Field::from_fn(grid, |x| T::of(self.gaussian_deriv(0, x.as_f64())))
    }

    pub fn validate<T: Real>(&self, grid: &Grid1D<T>) -> Result<()> {
        if !(self.width > 0.0) || !self.amplitude.is_finite() || !self.center.is_finite() {
            return Err(Error::InvalidParams(format!("invalid Ricker parameters {self:?}")));
        }
        let h = grid.spacing().as_f64();
        if self.width < MIN_WIDTH_SPACINGS * h {
            return Err(Error::InvalidParams(format!(
                "width {} below {MIN_WIDTH_SPACINGS} grid spacings ({h})",
                self.width
            )));
        }
        let left = self.center - grid.x_left().as_f64();
        let right = grid.x_right().as_f64() - self.center;
        let need = EDGE_CLEARANCE_WIDTHS * self.width;
        if left < need || right < need {
            return Err(Error::InsufficientDecay(format!(
                "centre {} is {:.3}/{:.3} from the edges, need {need}",
                self.center, left, right
            )));
        }
        Ok(())
    }

    /// Samples the datum after checking width and edge decay.
    pub fn sample<T: Real>(&self, grid: &Grid1D<T>) -> Result<Field<T>> {
        self.validate(grid)?;
        Ok(self.sample_derivative(0, grid))
    }
}

pub fn ricker_ic<T: Real>(amplitude: f64, center: f64, width: f64, grid: &Grid1D<T>) -> Result<Field<T>> {
    Ricker { amplitude, center, width }.sample(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_grid() -> Grid1D<f64> {
        Grid1D::new(1024, 40.0, -20.0).unwrap()
    }

    #[test]
    fn hermite_derivatives_match_finite_differences() {
        let h = 1e-4;
        for order in 0..6 {
            for &s in &[-1.3, -0.2, 0.0, 0.7, 2.1] {
                let fd = (gaussian_derivative(order, s + h) - gaussian_derivative(order, s - h)) / (2.0 * h);
                let exact = gaussian_derivative(order + 1, s);
                assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "order {order} s {s}");
            }
        }
    }

    #[test]
    fn ricker_profile_closed_form() {
        let r = Ricker { amplitude: 1.5, center: 0.3, width: 0.8 };
        let x = 1.1;
        let s: f64 = (x - 0.3) / 0.8;
        let exact = 1.5 * (4.0 * s * s - 2.0) * (-s * s).exp() / 0.64;
        assert!((r.value_at(x) - exact).abs() < 1e-14);
    }

    #[test]
    fn ricker_mean_zero() {
        let u = ricker_ic(1.0, 0.0, 1.0, &std_grid()).unwrap();
        assert!(u.mean().abs() <= 1e-13);
        let u = ricker_ic(2.0, 3.0, 1.5, &std_grid()).unwrap();
        assert!(u.mean().abs() <= 1e-13);
    }

    #[test]
    fn zero_amplitude_is_zero_field() {
        let u = ricker_ic(0.0, 0.0, 1.0, &std_grid()).unwrap();
        assert_eq!(u.linf_norm(), 0.0);
    }

    #[test]
    fn rejects_poor_decay_or_resolution() {
        let g = std_grid();
        assert!(matches!(ricker_ic(1.0, 15.0, 1.0, &g), Err(Error::InsufficientDecay(_))));
        assert!(ricker_ic(1.0, 0.0, 3.0, &g).is_err());
        assert!(ricker_ic(1.0, 0.0, 0.1, &g).is_err());
    }
}
