//! Floating point abstraction shared by every solver.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar usable by the spectral and finite-volume machinery.
///
/// Tolerances that the solvers enforce at run time (mean-zero solvability,
/// finiteness checks) depend on the working precision, so each implementation
/// carries its own.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Relative tolerance on `|mean(u)| / ‖u‖∞` for inputs to the nonlocal solves.
    const MEAN_TOLERANCE: f64;

    /// Converts a literal. Every `f64` is representable (possibly rounded).
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("real converts to f64")
    }
}

impl Real for f64 {
    const MEAN_TOLERANCE: f64 = 1e-10;
}

impl Real for f32 {
    const MEAN_TOLERANCE: f64 = 1e-4;
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}
