//! Seeded smooth random fields: short trigonometric sums with random
//! coefficients, reproducible across platforms.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{GridForm, PeriodicGrid, ScalarField};

/// One random Fourier mode `a·cos(k·x) + b·sin(k·x)`.
#[derive(Clone, Debug, PartialEq)]
struct Mode {
    k: Vec<i32>,
    a: f64,
    b: f64,
}

fn modes(rng: &mut ChaCha8Rng, dim: usize, count: usize, max_k: i32, amplitude: f64) -> Vec<Mode> {
    (0..count)
        .map(|_| {
            let mut k: Vec<i32> = (0..dim).map(|_| rng.gen_range(-max_k..=max_k)).collect();
            if k.iter().all(|&v| v == 0) {
                k[rng.gen_range(0..dim)] = 1;
            }
            let scale = amplitude / count as f64;
            Mode {
                k,
                a: scale * rng.gen_range(-1.0..1.0),
                b: scale * rng.gen_range(-1.0..1.0),
            }
        })
        .collect()
}

fn eval(modes: &[Mode], grid: &PeriodicGrid, x: &[f64]) -> f64 {
    modes
        .iter()
        .map(|m| {
            let phase: f64 = m
                .k
                .iter()
                .zip(x)
                .enumerate()
                .map(|(a, (&k, &xi))| 2.0 * PI * k as f64 * xi / grid.period(a))
                .sum();
            m.a * phase.cos() + m.b * phase.sin()
        })
        .sum()
}

/// Mean-free smooth function with sup norm at most `amplitude`, using
/// `count` modes of wavenumber at most `max_k` per axis.
pub fn random_smooth_field(grid: &PeriodicGrid, seed: u64, amplitude: f64, count: usize, max_k: i32) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = modes(&mut rng, grid.dim(), count, max_k, amplitude);
    GridForm::scalar_fn(grid, |x| eval(&m, grid, x))
}

/// Smooth `k`-form whose components are independent random fields.
pub fn random_smooth_form(
    grid: &PeriodicGrid,
    degree: usize,
    seed: u64,
    amplitude: f64,
    count: usize,
    max_k: i32,
) -> GridForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ncomp = crate::formcalc::form::binomial(grid.dim(), degree);
    let per: Vec<Vec<Mode>> = (0..ncomp)
        .map(|_| modes(&mut rng, grid.dim(), count, max_k, amplitude))
        .collect();
    GridForm::from_fn(grid, degree, |r, x| eval(&per[r], grid, x))
}
