use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::{neumaier_sum, Real};

/// Real-valued grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Real> {
    grid: Grid1D<T>,
    values: Vec<T>,
}

/// Exponent of an `L^p` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

impl Lp {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Lp::Infinity)
        } else if p >= 1.0 && p.is_finite() {
            Ok(Lp::Finite(p))
        } else {
            Err(Error::InvalidParams(format!("norm exponent p = {p} outside [1, inf]")))
        }
    }
}

impl<T: Real> Field<T> {
    /// Wraps `values`; they must match the grid size and be finite.
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidParams(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite value at node {j}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid1D<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self { grid, values }
    }

    pub fn zeros(grid: &Grid1D<T>) -> Self {
        Self::from_vec_unchecked(grid.clone(), vec![T::zero(); grid.n_points()])
    }

    pub fn constant(grid: &Grid1D<T>, c: T) -> Self {
        Self::from_vec_unchecked(grid.clone(), vec![c; grid.n_points()])
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: &Grid1D<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().map(f).collect();
        Self::from_vec_unchecked(grid.clone(), values)
    }

    #[inline]
    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_vec_unchecked(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_vec_unchecked(self.grid.clone(), values)
    }

    pub fn scale(&self, a: T) -> Self {
        self.map(|v| a * v)
    }

    /// `a*self + b*other`.
    pub fn axpby(&self, a: T, other: &Self, b: T) -> Self {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |x, y| x - y)
    }

    /// Rectangle-rule `L^p` norm; `p = ∞` is the maximum modulus.
    pub fn lp_norm(&self, p: Lp) -> T {
        lp_of(self.values.iter().copied(), self.grid.spacing(), p)
    }

    pub fn l2_norm(&self) -> T {
        self.lp_norm(Lp::Finite(2.0))
    }

    pub fn linf_norm(&self) -> T {
        self.lp_norm(Lp::Infinity)
    }

    /// `L^p` norm restricted to nodes in `[a, b]`.
    pub fn lp_norm_local(&self, p: Lp, a: T, b: T) -> Result<T> {
        let (lo, hi) = self.window_indices(a, b)?;
        Ok(lp_of(self.values[lo..hi].iter().copied(), self.grid.spacing(), p))
    }

    /// Index range `lo..hi` of nodes inside `[a, b]`.
    pub fn window_indices(&self, a: T, b: T) -> Result<(usize, usize)> {
        let g = &self.grid;
        let empty = || Error::EmptyWindow { a: a.as_f64(), b: b.as_f64() };
        if !(a <= b) {
            return Err(empty());
        }
        let lo = (0..g.n_points()).find(|&j| g.node(j) >= a).ok_or_else(empty)?;
        let hi = (lo..g.n_points()).take_while(|&j| g.node(j) <= b).last().ok_or_else(empty)? + 1;
        Ok((lo, hi))
    }

    /// Rectangle-rule integral over the period.
    pub fn integral(&self) -> T {
        neumaier_sum(self.values.iter().copied()) * self.grid.spacing()
    }

    /// Rectangle-rule `∫ self * other dx`.
    pub fn inner(&self, other: &Self) -> T {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
        neumaier_sum(self.values.iter().zip(&other.values).map(|(&a, &b)| a * b)) * self.grid.spacing()
    }

    pub fn mean(&self) -> T {
        neumaier_sum(self.values.iter().copied()) / T::of_usize(self.values.len())
    }

    pub fn project_zero_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// Largest absolute pointwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).linf_norm()
    }

    /// Value at the node nearest to `x` (ties resolve to the left node).
    pub fn value_near(&self, x: T) -> T {
        let g = &self.grid;
        let j = ((x - g.x_left()) / g.spacing()).round();
        let n = g.n_points() as i64;
        let j = j.to_i64().unwrap_or(0).rem_euclid(n) as usize;
        self.values[j]
    }
}

fn lp_of<T: Real>(values: impl Iterator<Item = T>, spacing: T, p: Lp) -> T {
    match p {
        Lp::Infinity => values.fold(T::zero(), |m, v| m.max(v.abs())),
        Lp::Finite(2.0) => (neumaier_sum(values.map(|v| v * v)) * spacing).sqrt(),
        Lp::Finite(1.0) => neumaier_sum(values.map(|v| v.abs())) * spacing,
        Lp::Finite(p) => {
            let pt = T::of(p);
            (neumaier_sum(values.map(|v| v.abs().powf(pt))) * spacing).powf(T::one() / pt)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, l: f64, x0: f64) -> Grid1D<f64> {
        Grid1D::new(n, l, x0).unwrap()
    }

    #[test]
    fn constant_one_l2_is_sqrt_length() {
        let g = grid(64, 7.0, -1.0);
        let f = Field::constant(&g, 1.0);
        assert!((f.l2_norm() - 7.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = grid(32, 3.0, 0.0);
        let f = Field::zeros(&g);
        for p in [1.0, 2.0, 3.5, 6.0] {
            assert_eq!(f.lp_norm(Lp::Finite(p)), 0.0);
        }
        assert_eq!(f.linf_norm(), 0.0);
    }

    #[test]
    fn gaussian_l2_closed_form() {
        let g = grid(1024, 40.0, -20.0);
        let f = Field::from_fn(&g, |x| (-x * x).exp());
        let exact = (std::f64::consts::PI / 2.0).powf(0.25);
        assert!(((f.l2_norm() - exact) / exact).abs() <= 1e-8);
    }

    #[test]
    fn local_norm_restricts_nodes() {
        let g = grid(8, 8.0, 0.0);
        let f = Field::from_fn(&g, |x| x);
        // nodes 2, 3, 4 inside [1.5, 4]
        let l1 = f.lp_norm_local(Lp::Finite(1.0), 1.5, 4.0).unwrap();
        assert_eq!(l1, 9.0);
        assert!(f.lp_norm_local(Lp::Finite(1.0), 2.2, 2.8).is_err());
        assert!(f.lp_norm_local(Lp::Finite(1.0), 3.0, 1.0).is_err());
    }

    #[test]
    fn sine_mean_zero_and_projection() {
        let g = grid(64, 10.0, 0.0);
        let k = 2.0 * std::f64::consts::PI / 10.0 * 3.0;
        let f = Field::from_fn(&g, |x| (k * x).sin());
        assert!(f.mean().abs() < 1e-15);
        let c = Field::constant(&g, 5.0).project_zero_mean();
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lp_exponent_validation() {
        assert!(Lp::new(0.5).is_err());
        assert_eq!(Lp::new(f64::INFINITY).unwrap(), Lp::Infinity);
        assert_eq!(Lp::new(4.0).unwrap(), Lp::Finite(4.0));
    }
}
