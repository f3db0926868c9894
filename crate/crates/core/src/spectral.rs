//! Discrete Fourier representation on a periodic grid.
//!
//! Convention: `c_m = (1/n) Σ_j f_j e^{-i k_m (x_j - x_left)}`, so
//! `f_j = Σ_m c_m e^{i k_m (x_j - x_left)}` and `‖f‖₂² = L Σ |c_m|²`.

use rustfft::num_complex::Complex;

use crate::field::Field;
use crate::grid::Grid1D;
use crate::scalar::Real;

/// Fourier coefficients of a real field, in FFT slot order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCoeffs<T: Real> {
    grid: Grid1D<T>,
    modes: Vec<Complex<T>>,
}

impl<T: Real> SpectralCoeffs<T> {
    pub fn new(grid: &Grid1D<T>, modes: Vec<Complex<T>>) -> Self {
        assert_eq!(modes.len(), grid.n_points(), "mode count must match grid");
        Self { grid: grid.clone(), modes }
    }

    pub fn zeros(grid: &Grid1D<T>) -> Self {
        Self::new(grid, vec![Complex::new(T::zero(), T::zero()); grid.n_points()])
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn modes(&self) -> &[Complex<T>] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.modes
    }

    pub fn into_modes(self) -> Vec<Complex<T>> {
        self.modes
    }

    /// Multiplies mode `m` by `symbol(k_m, m)`.
    pub fn apply(&self, symbol: impl Fn(T, usize) -> Complex<T>) -> Self {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(m, &c)| c * symbol(self.grid.wavenumber(m), m))
            .collect();
        Self { grid: self.grid.clone(), modes }
    }

    /// Largest deviation from conjugate symmetry `c_{-m} = conj(c_m)`.
    pub fn conjugate_asymmetry(&self) -> T {
        let n = self.modes.len();
        (0..n)
            .map(|m| (self.modes[m] - self.modes[(n - m) % n].conj()).norm())
            .fold(T::zero(), T::max)
    }
}

pub fn to_spectral<T: Real>(f: &Field<T>) -> SpectralCoeffs<T> {
    let grid = f.grid();
    let n = grid.n_points();
    let mut buf: Vec<Complex<T>> = f.values().iter().map(|&v| Complex::new(v, T::zero())).collect();
    grid.plans().forward.process(&mut buf);
    let inv_n = T::one() / T::of_usize(n);
    for c in &mut buf {
        *c = *c * inv_n;
    }
    SpectralCoeffs { grid: grid.clone(), modes: buf }
}

/// Inverse transform; the imaginary residue of asymmetric input is discarded.
pub fn from_spectral<T: Real>(c: &SpectralCoeffs<T>) -> Field<T> {
    let mut buf = c.modes.clone();
    c.grid.plans().inverse.process(&mut buf);
    Field::from_vec_unchecked(c.grid.clone(), buf.into_iter().map(|z| z.re).collect())
}

/// Symbol `(ik)^order` of the `order`-th derivative, with the Nyquist mode
/// removed for odd orders.
pub fn derivative_symbol<T: Real>(grid: &Grid1D<T>, order: u32) -> Vec<Complex<T>> {
    let nyq = grid.nyquist();
    (0..grid.n_points())
        .map(|m| {
            if order % 2 == 1 && m == nyq {
                return Complex::new(T::zero(), T::zero());
            }
            let k = grid.wavenumber(m);
            let mag = k.powi(order as i32);
            match order % 4 {
                0 => Complex::new(mag, T::zero()),
                1 => Complex::new(T::zero(), mag),
                2 => Complex::new(-mag, T::zero()),
                _ => Complex::new(T::zero(), -mag),
            }
        })
        .collect()
}

pub fn derivative_coeffs<T: Real>(c: &SpectralCoeffs<T>, order: u32) -> SpectralCoeffs<T> {
    let sym = derivative_symbol(&c.grid, order);
    c.apply(|_, m| sym[m])
}

/// Spectral derivative of the given order.
pub fn derivative<T: Real>(f: &Field<T>, order: u32) -> Field<T> {
    if order == 0 {
        return f.clone();
    }
    from_spectral(&derivative_coeffs(&to_spectral(f), order))
}

/// Spectral coefficients of `f³`, de-aliased by zero padding to `2n` points.
pub fn cubic_coeffs<T: Real>(c: &SpectralCoeffs<T>) -> SpectralCoeffs<T> {
    let grid = &c.grid;
    let n = grid.n_points();
    let m = 2 * n;
    let half = n / 2;
    let zero = Complex::new(T::zero(), T::zero());
    let two = T::of(2.0);

    let mut padded = vec![zero; m];
    padded[..half].copy_from_slice(&c.modes[..half]);
    padded[half + n + 1..].copy_from_slice(&c.modes[half + 1..]);
    padded[half] = c.modes[half] / two;
    padded[m - half] = c.modes[half] / two;

    grid.plans().inverse_padded.process(&mut padded);
    for z in &mut padded {
        let v = z.re;
        *z = Complex::new(v * v * v, T::zero());
    }
    grid.plans().forward_padded.process(&mut padded);

    let inv_m = T::one() / T::of_usize(m);
    let mut out = vec![zero; n];
    for (dst, src) in out[..half].iter_mut().zip(&padded[..half]) {
        *dst = *src * inv_m;
    }
    for (dst, src) in out[half + 1..].iter_mut().zip(&padded[half + n + 1..]) {
        *dst = *src * inv_m;
    }
    let nyq = (padded[half] + padded[m - half]) * inv_m;
    out[half] = Complex::new(nyq.re, T::zero());
    SpectralCoeffs { grid: grid.clone(), modes: out }
}

/// Pointwise cube, de-aliased.
pub fn cubic<T: Real>(f: &Field<T>) -> Field<T> {
    from_spectral(&cubic_coeffs(&to_spectral(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, l: f64) -> Grid1D<f64> {
        Grid1D::new(n, l, 0.0).unwrap()
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let g = grid(16, 3.0);
        let c = to_spectral(&Field::constant(&g, 2.5));
        assert!((c.modes()[0].re - 2.5).abs() < 1e-15);
        assert!(c.modes()[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn sine_is_single_mode_pair() {
        let l = 5.0;
        let g = grid(32, l);
        let c = to_spectral(&Field::from_fn(&g, |x| (2.0 * PI * x / l).sin()));
        for (m, z) in c.modes().iter().enumerate() {
            match m {
                1 => assert!((z - Complex::new(0.0, -0.5)).norm() < 1e-15),
                31 => assert!((z - Complex::new(0.0, 0.5)).norm() < 1e-15),
                _ => assert!(z.norm() < 1e-15, "mode {m} = {z}"),
            }
        }
        assert!(c.conjugate_asymmetry() < 1e-15);
    }

    #[test]
    fn derivatives_of_sine() {
        let l = 2.0 * PI;
        let g = grid(64, l);
        let k = 5.0;
        let f = Field::from_fn(&g, |x| (k * x).sin());
        let d1 = derivative(&f, 1);
        let d3 = derivative(&f, 3);
        let e1 = Field::from_fn(&g, |x| k * (k * x).cos());
        let e3 = Field::from_fn(&g, |x| -k * k * k * (k * x).cos());
        assert!(d1.max_abs_diff(&e1) <= 1e-10);
        assert!(d3.max_abs_diff(&e3) <= 1e-10 * k * k);
        let c = derivative(&Field::constant(&g, 3.0), 2);
        assert!(c.linf_norm() < 1e-14);
    }

    #[test]
    fn odd_derivative_drops_nyquist() {
        let g = grid(8, 8.0);
        let f = Field::from_fn(&g, |x| (PI * x).cos()); // alternating: pure Nyquist
        assert!(derivative(&f, 1).linf_norm() < 1e-14);
        let d2 = derivative(&f, 2);
        assert!(d2.max_abs_diff(&f.scale(-PI * PI)) < 1e-12);
    }

    #[test]
    fn cubic_of_sine_triple_angle() {
        let l = 2.0 * PI;
        let g = grid(32, l);
        let k = 4.0; // 3k = 12 < 16
        let f = Field::from_fn(&g, |x| (k * x).sin());
        let exact = Field::from_fn(&g, |x| 0.75 * (k * x).sin() - 0.25 * (3.0 * k * x).sin());
        assert!(cubic(&f).max_abs_diff(&exact) <= 1e-10);
        let two = Field::constant(&g, 2.0);
        assert!(cubic(&two).max_abs_diff(&Field::constant(&g, 8.0)) < 1e-13);
        assert!(cubic(&Field::zeros(&g)).linf_norm() == 0.0);
    }

    #[test]
    fn cubic_removes_aliasing_that_pointwise_keeps() {
        // sin(7x) on 16 points: sin³ carries mode 21, which aliases onto mode 5 pointwise.
        let g = grid(16, 2.0 * PI);
        let f = Field::from_fn(&g, |x| (7.0 * x).sin());
        let dealiased = to_spectral(&cubic(&f));
        let aliased = to_spectral(&f.map(|v| v * v * v));
        assert!(dealiased.modes()[5].norm() < 1e-14);
        assert!(aliased.modes()[5].norm() > 0.1);
    }
}
