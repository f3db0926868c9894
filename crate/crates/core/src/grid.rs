use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform periodic grid on `[x_left, x_left + length)`.
///
/// Nodes are `x_j = x_left + j * spacing`. FFT plans for `n` points and for
/// the `2n` de-aliasing grid are built once and shared by every field on the
/// grid, so cloning a grid is cheap.
#[derive(Clone)]
pub struct Grid1D<T: Real> {
    n_points: usize,
    length: T,
    x_left: T,
    spacing: T,
    plans: Arc<Plans<T>>,
}

pub(crate) struct Plans<T: Real> {
    pub forward: Arc<dyn Fft<T>>,
    pub inverse: Arc<dyn Fft<T>>,
    pub forward_padded: Arc<dyn Fft<T>>,
    pub inverse_padded: Arc<dyn Fft<T>>,
}

pub const MIN_POINTS: usize = 8;

impl<T: Real> Grid1D<T> {
    pub fn new(n_points: usize, length: T, x_left: T) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points}, need at least {MIN_POINTS}"
            )));
        }
        if !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n_points = {n_points} must be even")));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("length = {length} must be positive")));
        }
        if !x_left.is_finite() {
            return Err(Error::InvalidGrid(format!("x_left = {x_left} must be finite")));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
            forward_padded: planner.plan_fft_forward(2 * n_points),
            inverse_padded: planner.plan_fft_inverse(2 * n_points),
        };
        Ok(Self {
            n_points,
            length,
            x_left,
            spacing: length / T::of_usize(n_points),
            plans: Arc::new(plans),
        })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    #[inline]
    pub fn x_left(&self) -> T {
        self.x_left
    }

    /// Right end of the periodic cell (not a node).
    #[inline]
    pub fn x_right(&self) -> T {
        self.x_left + self.length
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.spacing
    }

    #[inline]
    pub fn node(&self, j: usize) -> T {
        self.x_left + T::of_usize(j) * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |j| self.node(j))
    }

    /// Wavenumber `2πm/L` of FFT slot `index`, with `m` in `[-n/2, n/2)`.
    pub fn wavenumber(&self, index: usize) -> T {
        T::of(2.0) * T::PI() * T::of(signed_mode(index, self.n_points) as f64) / self.length
    }

    pub fn wavenumbers(&self) -> Vec<T> {
        (0..self.n_points).map(|m| self.wavenumber(m)).collect()
    }

    /// Slot of the Nyquist mode.
    #[inline]
    pub fn nyquist(&self) -> usize {
        self.n_points / 2
    }

    /// Same node set (size, extent and origin).
    pub fn same_as(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.length == other.length && self.x_left == other.x_left
    }

    pub(crate) fn plans(&self) -> &Plans<T> {
        &self.plans
    }
}

impl<T: Real> PartialEq for Grid1D<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl<T: Real> fmt::Debug for Grid1D<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("n_points", &self.n_points)
            .field("length", &self.length)
            .field("x_left", &self.x_left)
            .field("spacing", &self.spacing)
            .finish()
    }
}

/// Signed mode number of FFT slot `index`; the Nyquist slot maps to `-n/2`.
#[inline]
pub fn signed_mode(index: usize, n: usize) -> i64 {
    if index < n / 2 {
        index as i64
    } else {
        index as i64 - n as i64
    }
}
