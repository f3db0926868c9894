//! Conservative transfer between periodic grids and windowed distances.
//!
//! Grid nodes are read as cell centres: node `j` owns
//! `[x_j − h/2, x_j + h/2)`. A field is treated as piecewise constant on
//! its cells and averaged exactly over the target cells, so the discrete
//! integral is preserved.

use shortpulse::{Error, Field64, Grid64, Lp, Trajectory};

use crate::error::Result;

/// Periodic cumulative integral of a piecewise-constant field.
struct Cumulative {
    origin: f64,
    h: f64,
    period: f64,
    partial: Vec<f64>,
    values: Vec<f64>,
}

impl Cumulative {
    fn new(f: &Field64) -> Self {
        let g = f.grid();
        let h = g.spacing();
        let mut partial = Vec::with_capacity(g.n_points() + 1);
        let mut acc = 0.0;
        partial.push(0.0);
        for v in f.values() {
            acc += v * h;
            partial.push(acc);
        }
        Self { origin: g.x_left() - 0.5 * h, h, period: g.length(), partial, values: f.values().to_vec() }
    }

    /// `∫_{origin}^{x}` with periodic continuation.
    fn at(&self, x: f64) -> f64 {
        let total = *self.partial.last().unwrap();
        let s = x - self.origin;
        let wraps = (s / self.period).floor();
        let r = s - wraps * self.period;
        let n = self.values.len();
        let i = ((r / self.h).floor() as usize).min(n - 1);
        wraps * total + self.partial[i] + (r - i as f64 * self.h) * self.values[i]
    }
}

/// Cell averages of `f` over the cells of `target`.
pub fn conservative_average(f: &Field64, target: &Grid64) -> Result<Field64> {
    let src = f.grid();
    if (src.length() - target.length()).abs() > 1e-12 * src.length() {
        return Err(Error::IncommensurateGrids(format!(
            "periods {} and {} differ",
            src.length(),
            target.length()
        ))
        .into());
    }
    if src.same_as(target) {
        return Ok(f.clone());
    }
    let cum = Cumulative::new(f);
    let h = target.spacing();
    let values = (0..target.n_points())
        .map(|j| {
            let x = target.node(j);
            (cum.at(x + 0.5 * h) - cum.at(x - 0.5 * h)) / h
        })
        .collect();
    Ok(Field64::new(target.clone(), values)?)
}

/// Brings two fields onto the coarser of their grids.
pub fn common_grid(a: &Field64, b: &Field64) -> Result<(Field64, Field64)> {
    if a.grid().same_as(b.grid()) {
        return Ok((a.clone(), b.clone()));
    }
    if a.grid().n_points() <= b.grid().n_points() {
        Ok((a.clone(), conservative_average(b, a.grid())?))
    } else {
        Ok((conservative_average(a, b.grid())?, b.clone()))
    }
}

/// `‖a − b‖_{Lᵖ(window)}` after mapping onto the coarser grid.
pub fn field_distance(a: &Field64, b: &Field64, window: [f64; 2], p: f64) -> Result<f64> {
    let (a, b) = common_grid(a, b)?;
    Ok(a.sub(&b).lp_norm_local(Lp::new(p)?, window[0], window[1])?)
}

/// Matching tolerance when looking up a comparison time in a trajectory.
pub fn time_tolerance(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

/// `Lᵖ(window)` distance between two trajectories at time `t`.
pub fn compare(run_a: &Trajectory<f64>, run_b: &Trajectory<f64>, window: [f64; 2], p: f64, t: f64) -> Result<f64> {
    let (_, a) = run_a.snapshot_at(t, time_tolerance(t))?;
    let (_, b) = run_b.snapshot_at(t, time_tolerance(t))?;
    field_distance(a, b, window, p)
}
