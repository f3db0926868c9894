#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shortpulse::{Field64, Grid64};

/// Random smooth mean-zero field: a sum of the lowest `n/8` Fourier modes
/// with amplitudes decaying like `e^{−m/8}`.
pub fn random_smooth(grid: &Grid64, seed: u64) -> Field64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_modes = grid.n_points() / 8;
    let coeffs: Vec<(f64, f64)> = (1..=n_modes)
        .map(|m| {
            let decay = (-(m as f64) / 8.0).exp();
            (decay * rng.gen_range(-1.0..1.0), decay * rng.gen_range(-1.0..1.0))
        })
        .collect();
    let (l, x0) = (grid.length(), grid.x_left());
    Field64::from_fn(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = 2.0 * std::f64::consts::PI * (i + 1) as f64 / l;
                a * (k * (x - x0)).cos() + b * (k * (x - x0)).sin()
            })
            .sum()
    })
}

pub fn standard_grid(n: usize) -> Grid64 {
    Grid64::new(n, 40.0, -20.0).unwrap()
}
