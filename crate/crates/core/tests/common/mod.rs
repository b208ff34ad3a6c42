#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbo_core::diagnostics::sigma_norm_sq;
use rbo_core::spectral::{apply_multiplier, MultiplierSymbol};
use rbo_core::{Field, GridSpec};
use std::f64::consts::PI;

pub fn reference_grid() -> GridSpec {
    GridSpec::new(1024, 64.0 * PI).unwrap()
}

pub fn gaussian(grid: &GridSpec, amplitude: f64) -> Field {
    Field::from_fn(grid, move |x| amplitude * (-x * x).exp())
}

/// Shifted and modulated Gaussians with random parameters.
pub fn smooth_corpus(grid: &GridSpec, seed: u64, count: usize) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let a = rng.gen_range(0.2..2.0);
            let c = rng.gen_range(-4.0..4.0);
            let w = rng.gen_range(0.5..3.0);
            let k = if i % 2 == 0 {
                0.0
            } else {
                rng.gen_range(0.5..3.0)
            };
            Field::from_fn(grid, move |x| {
                a * (-((x - c) / w).powi(2)).exp() * (k * x).cos()
            })
        })
        .collect()
}

/// Band-limited random fields: a sum of low modes under a wide Gaussian window.
pub fn band_limited_corpus(grid: &GridSpec, seed: u64, count: usize) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let modes: Vec<(f64, f64, f64)> = (0..6)
                .map(|_| {
                    (
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(0.0..4.0),
                        rng.gen_range(0.0..2.0 * PI),
                    )
                })
                .collect();
            Field::from_fn(grid, move |x| {
                let window = (-(x / 8.0).powi(2)).exp();
                window
                    * modes
                        .iter()
                        .map(|(a, k, p)| a * (k * x + p).cos())
                        .sum::<f64>()
            })
        })
        .collect()
}

/// `||A phi||_{s,2}^2 / ||phi||_{s,2}^2` with `A = d_x (1 + H d_x)^{-1}`.
pub fn operator_ratio(phi: &Field, s: f64) -> (f64, f64) {
    let a = apply_multiplier(phi, &MultiplierSymbol::regularized_derivative()).unwrap();
    (sigma_norm_sq(&a, s, 2.0), sigma_norm_sq(phi, s, 2.0))
}
