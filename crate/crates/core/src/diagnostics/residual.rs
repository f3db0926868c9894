//! Weak entropy residual
//!
//! ```text
//! R(φ) = ∬ [η(u) ∂ₜφ + q(u) ∂ₓφ + γ η'(u) P φ] dx dt
//! ```
//!
//! over a lattice of separable bumps `φ = a(t) b(x)`. Admissible
//! trajectories have `R(φ) ≥ −tol` for every non-negative `φ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::entropy::{adaptive_simpson, EntropyKind, EntropyPair};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::scalar::Real;
use crate::trajectory::Trajectory;

/// `∫_{−1}^{1} cos⁴(πs/2) ds`
const COS4_MASS: f64 = 0.75;

/// Unit-mass `cos⁴` bump centred at `center` with half-width `half_width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn value(&self, y: f64) -> f64 {
        let s = (y - self.center) / self.half_width;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let c = (0.5 * PI * s).cos();
        c * c * c * c / (COS4_MASS * self.half_width)
    }

    pub fn derivative(&self, y: f64) -> f64 {
        let s = (y - self.center) / self.half_width;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let (sn, c) = (0.5 * PI * s).sin_cos();
        -2.0 * PI * c * c * c * sn / (COS4_MASS * self.half_width * self.half_width)
    }

    /// `n` bumps whose supports tile `[a, b]` with 50% overlap.
    fn lattice(a: f64, b: f64, n: usize) -> Vec<Self> {
        let step = (b - a) / (n + 1) as f64;
        (0..n).map(|i| Bump { center: a + (i + 1) as f64 * step, half_width: step }).collect()
    }
}

/// Space-time test functions `φ_{ij}(t, x) = a_i(t) b_j(x)`, each of unit mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestBattery {
    pub time: Vec<Bump>,
    pub space: Vec<Bump>,
}

impl TestBattery {
    pub fn lattice(x_range: (f64, f64), t_range: (f64, f64), nx: usize, nt: usize) -> Result<Self> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if nx == 0 || nt == 0 || !ok(x_range) || !ok(t_range) {
            return Err(Error::InvalidParams(format!(
                "test lattice {nx}x{nt} over x {x_range:?}, t {t_range:?}"
            )));
        }
        Ok(Self {
            time: Bump::lattice(t_range.0, t_range.1, nt),
            space: Bump::lattice(x_range.0, x_range.1, nx),
        })
    }

    /// Default 6×6 lattice over the full grid span and `[0, final_time]`.
    pub fn covering<T: Real>(traj: &Trajectory<T>) -> Result<Self> {
        let g = &traj.grid;
        Self::lattice((g.x_left().as_f64(), g.x_right().as_f64()), (0.0, traj.final_time()), 6, 6)
    }

    pub fn len(&self) -> usize {
        self.time.len() * self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_support<T: Real>(&self, traj: &Trajectory<T>) -> Result<()> {
        let g = &traj.grid;
        let (xl, xr) = (g.x_left().as_f64(), g.x_right().as_f64());
        let slack = 1e-12 * (xr - xl);
        for b in &self.space {
            if b.lo() < xl - slack || b.hi() > xr + slack {
                return Err(Error::BatteryOutsideSupport(format!(
                    "space window [{}, {}] not inside [{xl}, {xr}]",
                    b.lo(),
                    b.hi()
                )));
            }
        }
        let t_end = traj.final_time();
        for a in &self.time {
            if a.lo() < -1e-12 * t_end.max(1.0) || a.hi() > t_end * (1.0 + 1e-12) {
                return Err(Error::BatteryOutsideSupport(format!(
                    "time window [{}, {}] not inside [0, {t_end}]",
                    a.lo(),
                    a.hi()
                )));
            }
        }
        if traj.times.len() < 2 {
            return Err(Error::BatteryOutsideSupport("trajectory holds a single snapshot".into()));
        }
        Ok(())
    }
}

/// Snapshot data shared by all entropies of a battery.
struct Prepared {
    times: Vec<f64>,
    nodes: Vec<f64>,
    spacing: f64,
    u: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    gamma: f64,
}

/// Product-trapezoid weights `∫ ℓ_k(t) a(t) dt` and `∫ ℓ_k(t) a'(t) dt`,
/// `ℓ_k` the piecewise-linear hat of snapshot `k`. The snapshot data are
/// interpolated linearly in time and integrated exactly against the bump,
/// so a state constant in time contributes nothing to the `∂ₜφ` term.
fn time_weights(times: &[f64], a: &Bump) -> (Vec<f64>, Vec<f64>) {
    let m = times.len();
    let mut wv = vec![0.0; m];
    let mut wd = vec![0.0; m];
    for k in 0..m - 1 {
        let lo = times[k].max(a.lo());
        let hi = times[k + 1].min(a.hi());
        if !(lo < hi) {
            continue;
        }
        let (t0, t1) = (times[k], times[k + 1]);
        let len = t1 - t0;
        let right = |t: f64| (t - t0) / len;
        let tol = 1e-14 * (hi - lo);
        wv[k] += adaptive_simpson(&|t| (1.0 - right(t)) * a.value(t), lo, hi, tol);
        wv[k + 1] += adaptive_simpson(&|t| right(t) * a.value(t), lo, hi, tol);
        wd[k] += adaptive_simpson(&|t| (1.0 - right(t)) * a.derivative(t), lo, hi, tol * 10.0 / a.half_width);
        wd[k + 1] += adaptive_simpson(&|t| right(t) * a.derivative(t), lo, hi, tol * 10.0 / a.half_width);
    }
    (wv, wd)
}

impl Prepared {
    fn new<T: Real>(traj: &Trajectory<T>) -> Result<Self> {
        let times = traj.times.clone();
        let m = times.len();
        let to_f64 = |f: &Field<T>| f.values().iter().map(|v| v.as_f64()).collect::<Vec<_>>();
        let mut u = Vec::with_capacity(m);
        let mut p = Vec::with_capacity(m);
        for snap in &traj.snapshots {
            u.push(to_f64(snap));
            p.push(to_f64(&traj.nonlocal_field(snap)?));
        }
        Ok(Self {
            times,
            nodes: traj.grid.nodes().map(|x| x.as_f64()).collect(),
            spacing: traj.grid.spacing().as_f64(),
            u,
            p,
            gamma: traj.coeffs().gamma,
        })
    }

    /// `R(φ_{ij})` for every lattice entry, time-major.
    fn residuals(&self, pair: &EntropyPair, tests: &TestBattery) -> Vec<f64> {
        let (nt, nx) = (tests.time.len(), tests.space.len());
        let h = self.spacing;
        let ranges: Vec<(usize, usize)> = tests
            .space
            .iter()
            .map(|b| {
                let lo = self.nodes.partition_point(|&x| x <= b.lo());
                let hi = self.nodes.partition_point(|&x| x < b.hi());
                (lo, hi)
            })
            .collect();
        let bump_vals: Vec<Vec<(f64, f64)>> = tests
            .space
            .iter()
            .zip(&ranges)
            .map(|(b, &(lo, hi))| (lo..hi).map(|j| (b.value(self.nodes[j]), b.derivative(self.nodes[j]))).collect())
            .collect();

        let weights: Vec<(Vec<f64>, Vec<f64>)> = tests.time.iter().map(|a| time_weights(&self.times, a)).collect();
        let mut out = vec![0.0; nt * nx];
        for k in 0..self.times.len() {
            let active: Vec<usize> = (0..nt).filter(|&i| weights[i].0[k] != 0.0 || weights[i].1[k] != 0.0).collect();
            if active.is_empty() {
                continue;
            }
            let (u, p) = (&self.u[k], &self.p[k]);
            for (jx, (&(lo, _), vals)) in ranges.iter().zip(&bump_vals).enumerate() {
                let (mut x1, mut x2, mut x3) = (0.0, 0.0, 0.0);
                for (off, &(b, db)) in vals.iter().enumerate() {
                    let v = u[lo + off];
                    x1 += pair.eta(v) * b;
                    x2 += pair.q(v) * db;
                    x3 += pair.eta_prime(v) * p[lo + off] * b;
                }
                let (x1, x2, x3) = (h * x1, h * x2, h * x3);
                for &it in &active {
                    let (wv, wd) = (&weights[it].0, &weights[it].1);
                    out[it * nx + jx] += x1 * wd[k] + (x2 + self.gamma * x3) * wv[k];
                }
            }
        }
        out
    }
}

/// Location of the most negative residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualArgmin {
    pub t_center: f64,
    pub x_center: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResidual {
    pub label: String,
    pub entropy: EntropyKind,
    pub min_residual: f64,
    pub argmin: ResidualArgmin,
}

/// Entropy-suite summary. `violation = max(0, −min_residual)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub min_residual: f64,
    pub violation: f64,
    pub n_entropies: usize,
    pub n_tests: usize,
    pub time_windows: Vec<Bump>,
    pub space_windows: Vec<Bump>,
    pub profile: String,
    pub pairs: Vec<PairResidual>,
}

/// The default entropy battery for data with values in `range`.
#[derive(Clone, Debug)]
pub struct EntropyBattery {
    pub pairs: Vec<EntropyPair>,
}

impl EntropyBattery {
    pub const N_QUADRATIC: usize = 11;
    pub const N_KRUZKOV: usize = 5;

    /// Quadratic entropies with `k` on an 11-point lattice spanning `range`
    /// widened by half its width on each side, plus five smoothed Kruzkov
    /// entropies with `k` across `range` and `δ = 0.1·|range|`.
    pub fn default_for(range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        let r = hi - lo;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParams(format!("degenerate datum range [{lo}, {hi}]")));
        }
        // flux tables cover the values a run can plausibly reach
        let table = (lo - 2.0 * r, hi + 2.0 * r);
        let mut pairs = Vec::with_capacity(Self::N_QUADRATIC + Self::N_KRUZKOV);
        let (qa, qb) = (lo - 0.5 * r, hi + 0.5 * r);
        for i in 0..Self::N_QUADRATIC {
            let k = qa + (qb - qa) * i as f64 / (Self::N_QUADRATIC - 1) as f64;
            pairs.push(EntropyPair::new(EntropyKind::Quadratic { k }, table)?);
        }
        for i in 0..Self::N_KRUZKOV {
            let k = lo + r * i as f64 / (Self::N_KRUZKOV - 1) as f64;
            pairs.push(EntropyPair::new(EntropyKind::KruzkovSmooth { k, delta: 0.1 * r }, table)?);
        }
        Ok(Self { pairs })
    }

    /// Default battery for the value range of a field.
    pub fn for_datum<T: Real>(u0: &Field<T>) -> Result<Self> {
        let lo = u0.values().iter().map(|v| v.as_f64()).fold(f64::INFINITY, f64::min);
        let hi = u0.values().iter().map(|v| v.as_f64()).fold(f64::NEG_INFINITY, f64::max);
        Self::default_for((lo, hi))
    }
}

/// Every lattice residual `R(φ_{ij})`, time-major (`i` over time windows).
pub fn residual_table<T: Real>(traj: &Trajectory<T>, pair: &EntropyPair, tests: &TestBattery) -> Result<Vec<f64>> {
    tests.check_support(traj)?;
    Ok(Prepared::new(traj)?.residuals(pair, tests))
}

/// `min_φ R(φ)` over the battery.
pub fn entropy_residual<T: Real>(traj: &Trajectory<T>, pair: &EntropyPair, tests: &TestBattery) -> Result<f64> {
    Ok(residual_table(traj, pair, tests)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Residual minima of a whole entropy battery.
pub fn entropy_suite<T: Real>(traj: &Trajectory<T>, battery: &EntropyBattery, tests: &TestBattery) -> Result<EntropyReport> {
    tests.check_support(traj)?;
    let prepared = Prepared::new(traj)?;
    let nx = tests.space.len();
    let mut pairs = Vec::with_capacity(battery.pairs.len());
    for pair in &battery.pairs {
        let table = prepared.residuals(pair, tests);
        let (imin, &min) = table
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty battery");
        pairs.push(PairResidual {
            label: pair.label(),
            entropy: pair.kind.clone(),
            min_residual: min,
            argmin: ResidualArgmin { t_center: tests.time[imin / nx].center, x_center: tests.space[imin % nx].center },
        });
    }
    let min_residual = pairs.iter().map(|p| p.min_residual).fold(f64::INFINITY, f64::min);
    Ok(EntropyReport {
        min_residual,
        violation: (-min_residual).max(0.0),
        n_entropies: pairs.len(),
        n_tests: tests.len(),
        time_windows: tests.time.clone(),
        space_windows: tests.space.clone(),
        profile: "cos4".into(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersive::{integrate, DispersiveParams, RhsTerms};
    use crate::grid::Grid1D;
    use crate::initial::Ricker;
    use crate::spectral::derivative;
    use crate::trajectory::SolverSpec;

    #[test]
    fn bump_mass_and_derivative() {
        let b = Bump { center: 0.3, half_width: 0.7 };
        let mass = adaptive_simpson(&|y| b.value(y), b.lo(), b.hi(), 1e-13);
        assert!((mass - 1.0).abs() < 1e-11);
        for y in [-0.2, 0.1, 0.3, 0.55, 0.9] {
            let fd = (b.value(y + 1e-6) - b.value(y - 1e-6)) / 2e-6;
            assert!((fd - b.derivative(y)).abs() < 1e-6);
        }
        assert_eq!(b.value(b.hi()), 0.0);
    }

    #[test]
    fn lattice_windows_fit_range() {
        let tb = TestBattery::lattice((-20.0, 20.0), (0.0, 2.0), 6, 6).unwrap();
        assert_eq!(tb.len(), 36);
        assert!((tb.time[0].lo() - 0.0).abs() < 1e-15);
        assert!((tb.time[5].hi() - 2.0).abs() < 1e-14);
        assert!((tb.space[0].half_width - 40.0 / 7.0).abs() < 1e-14);
    }

    fn zero_trajectory() -> Trajectory<f64> {
        let g = Grid1D::new(128, 40.0, -20.0).unwrap();
        let params = DispersiveParams {
            epsilon: 0.1,
            beta: 0.01,
            gamma: 0.5,
            dt: 0.01,
            t_final: 1.0,
            snapshot_interval: 0.1,
            diagnostics_interval: 0.1,
            terms: RhsTerms::default(),
        };
        integrate(&Field::zeros(&g), &params).unwrap()
    }

    #[test]
    fn zero_state_has_zero_residual() {
        let tr = zero_trajectory();
        let tests = TestBattery::covering(&tr).unwrap();
        let battery = EntropyBattery::default_for((-1.0, 1.0)).unwrap();
        let report = entropy_suite(&tr, &battery, &tests).unwrap();
        assert_eq!(report.n_entropies, 16);
        for p in &report.pairs {
            assert!(p.min_residual.abs() < 1e-14, "{}: {}", p.label, p.min_residual);
        }
    }

    #[test]
    fn windows_outside_support_rejected() {
        let tr = zero_trajectory();
        let pair = EntropyPair::new(EntropyKind::Quadratic { k: 0.0 }, (-1.0, 1.0)).unwrap();
        let wide = TestBattery::lattice((-30.0, 20.0), (0.0, 1.0), 6, 6).unwrap();
        assert!(matches!(entropy_residual(&tr, &pair, &wide), Err(Error::BatteryOutsideSupport(_))));
        let late = TestBattery::lattice((-20.0, 20.0), (0.0, 1.5), 6, 6).unwrap();
        assert!(matches!(entropy_residual(&tr, &pair, &late), Err(Error::BatteryOutsideSupport(_))));
    }

    /// For `η = u` the residual of a smooth regularized solution is
    /// `−ε∬u φₓₓ + β∬u φₓₓₓ` (the conservative viscous and dispersive fluxes).
    #[test]
    fn affine_entropy_matches_regularizing_flux() {
        let g = Grid1D::<f64>::new(256, 40.0, -20.0).unwrap();
        let u0 = Ricker { amplitude: 0.5, center: 0.0, width: 1.5 }.sample(&g).unwrap();
        let params = DispersiveParams {
            epsilon: 0.1,
            beta: 0.01,
            gamma: 0.5,
            dt: 0.005,
            t_final: 0.4,
            snapshot_interval: 0.005,
            diagnostics_interval: 0.1,
            terms: RhsTerms::default(),
        };
        let tr = integrate(&u0, &params).unwrap();
        assert!(matches!(tr.spec, SolverSpec::Dispersive(_)));
        let tests = TestBattery::lattice((-6.0, 6.0), (0.0, 0.4), 3, 3).unwrap();
        let pair = EntropyPair::new(EntropyKind::Affine, (-1.0, 1.0)).unwrap();
        let table = residual_table(&tr, &pair, &tests).unwrap();

        let n_nodes = g.n_points();
        let h = g.spacing();
        for (i, a) in tests.time.iter().enumerate() {
            for (j, b) in tests.space.iter().enumerate() {
                let phi = Field::from_fn(&g, |x| b.value(x));
                let phi_xx = derivative(&phi, 2);
                let phi_xxx = derivative(&phi, 3);
                let mut expect = 0.0;
                for (k, (&t, u)) in tr.times.iter().zip(&tr.snapshots).enumerate() {
                    let w = if k == 0 || k + 1 == tr.times.len() { 0.5 } else { 1.0 } * params.snapshot_interval;
                    let s: f64 = (0..n_nodes)
                        .map(|n| u.values()[n] * (-params.epsilon * phi_xx.values()[n] + params.beta * phi_xxx.values()[n]))
                        .sum();
                    expect += w * h * s * a.value(t);
                }
                let got = table[i * tests.space.len() + j];
                assert!((got - expect).abs() < 2e-4, "window ({i},{j}): {got} vs {expect}");
            }
        }
    }
}
