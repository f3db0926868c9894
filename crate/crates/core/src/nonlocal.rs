//! The nonlocal field `P`: either the ε-regularized elliptic solve
//! `-ε P'' + P' = u` or the plain primitive `P' = u`, both normalized to
//! zero mean.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::scalar::Real;
use crate::spectral::{derivative, from_spectral, to_spectral, SpectralCoeffs};

#[derive(Clone, Debug, PartialEq)]
pub struct NonlocalSolution<T: Real> {
    pub p: Field<T>,
    /// `P` at the left grid edge after normalization; stands in for `P(-∞)`.
    pub boundary_value: T,
    pub mean_p: T,
    /// Primitive only: value at `x = 0` before the mean was removed, if `0`
    /// lies in the domain.
    pub anchored_value_at_origin: Option<T>,
}

/// Quadrature used for cumulative integrals anchored at the left edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveRule {
    /// Plain cumulative trapezoid, second order.
    Trapezoid,
    /// Cumulative trapezoid with Euler–Maclaurin endpoint corrections through
    /// `h⁶`, using spectral derivatives; for smooth data.
    #[default]
    EndCorrected,
}

pub fn check_mean<T: Real>(u: &Field<T>) -> Result<()> {
    let mean = u.mean();
    let tol = T::of(T::MEAN_TOLERANCE) * u.linf_norm();
    if mean.abs() > tol {
        return Err(Error::NonZeroMean { mean: mean.as_f64(), tolerance: tol.as_f64() });
    }
    Ok(())
}

/// Symbol of `-ε∂²ₓₓ + ∂ₓ` under the odd-derivative Nyquist convention.
pub fn regularized_operator_symbol<T: Real>(k: T, is_nyquist: bool, epsilon: T) -> Complex<T> {
    let ik = if is_nyquist { T::zero() } else { k };
    Complex::new(epsilon * k * k, ik)
}

/// Multiplier taking `û` to `P̂` for the regularized solve (zero at `k = 0`).
pub fn regularized_inverse_symbol<T: Real>(grid: &crate::Grid1D<T>, epsilon: T) -> Vec<Complex<T>> {
    let nyq = grid.nyquist();
    (0..grid.n_points())
        .map(|m| {
            if m == 0 {
                return Complex::new(T::zero(), T::zero());
            }
            let sym = regularized_operator_symbol(grid.wavenumber(m), m == nyq, epsilon);
            Complex::new(T::one(), T::zero()) / sym
        })
        .collect()
}

pub fn solve_p_regularized_coeffs<T: Real>(u_hat: &SpectralCoeffs<T>, epsilon: T) -> SpectralCoeffs<T> {
    let inv = regularized_inverse_symbol(u_hat.grid(), epsilon);
    u_hat.apply(|_, m| inv[m])
}

/// Solves `-ε P'' + P' = u` spectrally with `∫P = 0`.
pub fn solve_p_regularized<T: Real>(u: &Field<T>, epsilon: T) -> Result<NonlocalSolution<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParams(format!("epsilon = {epsilon} must be positive")));
    }
    check_mean(u)?;
    let p = from_spectral(&solve_p_regularized_coeffs(&to_spectral(u), epsilon));
    Ok(NonlocalSolution {
        boundary_value: p.values()[0],
        mean_p: p.mean(),
        p,
        anchored_value_at_origin: None,
    })
}

/// Cumulative integral from the left edge, `F_j = ∫_{x_0}^{x_j} f`.
pub fn cumulative_integral<T: Real>(f: &Field<T>, rule: PrimitiveRule) -> Field<T> {
    let h = f.grid().spacing();
    let half = T::of(0.5);
    let v = f.values();
    let mut out = Vec::with_capacity(v.len());
    let (mut sum, mut comp) = (T::zero(), T::zero());
    out.push(T::zero());
    for w in v.windows(2) {
        let term = half * h * (w[0] + w[1]);
        let t = sum + term;
        comp = comp + if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        out.push(sum + comp);
    }
    if rule == PrimitiveRule::EndCorrected {
        let h2 = h * h;
        let corrections = [
            (1, -h2 / T::of(12.0)),
            (3, h2 * h2 / T::of(720.0)),
            (5, -h2 * h2 * h2 / T::of(30240.0)),
        ];
        for (order, coef) in corrections {
            let d = derivative(f, order);
            let d0 = d.values()[0];
            for (o, &dj) in out.iter_mut().zip(d.values()) {
                *o = *o + coef * (dj - d0);
            }
        }
    }
    Field::from_vec_unchecked(f.grid().clone(), out)
}

/// Primitive of `u` anchored at the left edge, then shifted to zero mean.
pub fn primitive<T: Real>(u: &Field<T>, rule: PrimitiveRule) -> Result<NonlocalSolution<T>> {
    check_mean(u)?;
    let anchored = cumulative_integral(u, rule);
    let g = u.grid();
    let origin_inside = g.x_left() <= T::zero() && T::zero() < g.x_right();
    let anchored_value_at_origin = origin_inside.then(|| anchored.value_near(T::zero()));
    let p = anchored.project_zero_mean();
    Ok(NonlocalSolution {
        boundary_value: p.values()[0],
        mean_p: p.mean(),
        p,
        anchored_value_at_origin,
    })
}

/// `F(x) = ∫_{x_left}^x p`, the second primitive used by the energy estimates.
pub fn second_primitive<T: Real>(p: &Field<T>, rule: PrimitiveRule) -> Result<Field<T>> {
    check_mean(p)?;
    Ok(cumulative_integral(p, rule))
}

/// `∫ p` over one full period starting at the left edge: the discrete `F(+∞)`.
pub fn right_edge_value<T: Real>(p: &Field<T>) -> T {
    p.integral()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::Ricker;
    use crate::Grid1D;
    use std::f64::consts::PI;

    fn std_grid() -> Grid1D<f64> {
        Grid1D::new(1024, 40.0, -20.0).unwrap()
    }

    #[test]
    fn zero_input_zero_output() {
        let g = std_grid();
        let z = Field::zeros(&g);
        assert_eq!(solve_p_regularized(&z, 0.1).unwrap().p.linf_norm(), 0.0);
        assert_eq!(primitive(&z, PrimitiveRule::EndCorrected).unwrap().p.linf_norm(), 0.0);
        assert_eq!(second_primitive(&z, PrimitiveRule::Trapezoid).unwrap().linf_norm(), 0.0);
    }

    #[test]
    fn sine_residual() {
        let l = 10.0;
        let g = Grid1D::new(64, l, 0.0).unwrap();
        let k = 2.0 * PI * 3.0 / l;
        let u = Field::from_fn(&g, |x| (k * x).sin());
        let eps = 0.05;
        let p = solve_p_regularized(&u, eps).unwrap().p;
        // closed form: P = Re[ (-i e^{ikx}) / (ik + εk²) ]
        let denom = Complex::new(eps * k * k, k);
        let exact = Field::from_fn(&g, |x| {
            (Complex::new(0.0, -1.0) * Complex::new(0.0, k * x).exp() / denom).re
        });
        assert!(p.max_abs_diff(&exact) < 1e-14);
        let residual = derivative(&p, 2).scale(-eps).axpby(1.0, &derivative(&p, 1), 1.0).sub(&u);
        assert!(residual.l2_norm() <= 1e-10 * u.l2_norm());
    }

    #[test]
    fn rejects_nonzero_mean() {
        let g = std_grid();
        let u = Field::constant(&g, 1.0);
        assert!(matches!(solve_p_regularized(&u, 0.1), Err(Error::NonZeroMean { .. })));
        assert!(matches!(primitive(&u, PrimitiveRule::Trapezoid), Err(Error::NonZeroMean { .. })));
    }

    #[test]
    fn primitive_of_ricker_is_gaussian_derivative() {
        let g = std_grid();
        let r = Ricker::default();
        let u = r.sample(&g).unwrap();
        let sol = primitive(&u, PrimitiveRule::EndCorrected).unwrap();
        let exact = r.sample_primitive(&g);
        assert!(sol.p.max_abs_diff(&exact) <= 1e-8);
        assert!(sol.mean_p.abs() <= 1e-12 * sol.p.linf_norm());
        assert!(sol.anchored_value_at_origin.unwrap().abs() < 1e-8);
        // derivative round trip
        assert!(derivative(&sol.p, 1).max_abs_diff(&u) <= 1e-8);
    }

    #[test]
    fn plain_trapezoid_is_second_order() {
        let r = Ricker::default();
        let err = |n: usize| -> f64 {
            let g = Grid1D::new(n, 40.0, -20.0).unwrap();
            let u = r.sample(&g).unwrap();
            primitive(&u, PrimitiveRule::Trapezoid).unwrap().p.max_abs_diff(&r.sample_primitive(&g))
        };
        let (e1, e2) = (err(256), err(512));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn second_primitive_of_gaussian_derivative() {
        let g = std_grid();
        let r = Ricker::default();
        let p = r.sample_primitive(&g);
        let f = second_primitive(&p, PrimitiveRule::EndCorrected).unwrap();
        assert!(f.max_abs_diff(&r.sample_second_primitive(&g)) <= 1e-8);
        assert!(right_edge_value(&p).abs() <= 1e-8 * 40.0 * p.linf_norm());
    }

    #[test]
    fn boundary_value_shrinks_with_domain() {
        // Wide datum so that truncation is visible on small domains.
        let r = Ricker { amplitude: 1.0, center: 0.0, width: 2.0 };
        let bv = |l: f64| {
            let g = Grid1D::new(512, l, -l / 2.0).unwrap();
            let u = r.sample_derivative(0, &g).project_zero_mean();
            solve_p_regularized(&u, 0.1).unwrap().boundary_value.abs()
        };
        let (a, b, c) = (bv(12.0), bv(16.0), bv(24.0));
        assert!(a > b && b > c, "{a} {b} {c}");
        assert!(c < 1e-6);
    }
}
