//! Scalar Poisson solves on periodic grids and harmonic representatives.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::grid::{pairwise_sum, GridForm, PeriodicGrid, ScalarField};
use super::ops::{mesh_d, ConformalMetric};
use crate::error::{Error, Result};

pub const POISSON_TOL: f64 = 1e-10;
pub const POISSON_MAX_ITER: usize = 10_000;

/// In-place multidimensional FFT (unnormalized in both directions).
fn fft_nd(grid: &PeriodicGrid, data: &mut [Complex<f64>], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    for axis in 0..grid.dim() {
        let n = grid.points(axis);
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let stride = grid.stride(axis);
        let mut line = vec![Complex::new(0.0, 0.0); n];
        for start in 0..grid.len() {
            if !(start / stride).is_multiple_of(n) {
                continue;
            }
            for (i, l) in line.iter_mut().enumerate() {
                *l = data[start + i * stride];
            }
            fft.process(&mut line);
            for (i, l) in line.iter().enumerate() {
                data[start + i * stride] = *l;
            }
        }
    }
}

/// Fourier symbol of the flat wide-stencil Laplacian `−Σ D_i D_i`.
fn wide_symbol(grid: &PeriodicGrid, flat: usize) -> f64 {
    grid.multi_index(flat)
        .iter()
        .enumerate()
        .map(|(a, &m)| {
            let s = (2.0 * PI * m as f64 / grid.points(a) as f64).sin() / grid.spacing(a);
            s * s
        })
        .sum()
}

/// Pseudo-inverse of the flat wide Laplacian: solves `Δu = f` on the range
/// (modes where the symbol vanishes are dropped), scaled by `1/scale`.
pub fn flat_poisson_pinv(f: &[f64], grid: &PeriodicGrid, scale: f64) -> Vec<f64> {
    let mut data: Vec<Complex<f64>> = f.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_nd(grid, &mut data, false);
    let cutoff = 1e-10 * (0..grid.dim()).map(|a| grid.spacing(a).powi(-2)).fold(0.0, f64::max);
    for (i, d) in data.iter_mut().enumerate() {
        let s = wide_symbol(grid, i);
        *d = if s > cutoff { *d / (s * scale) } else { Complex::new(0.0, 0.0) };
    }
    fft_nd(grid, &mut data, true);
    let norm = grid.len() as f64;
    data.iter().map(|c| c.re / norm).collect()
}

/// Removes the components of `f` on the kernel of the wide Laplacian.
fn project_to_range(f: &[f64], grid: &PeriodicGrid) -> Vec<f64> {
    let mut data: Vec<Complex<f64>> = f.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_nd(grid, &mut data, false);
    let cutoff = 1e-10 * (0..grid.dim()).map(|a| grid.spacing(a).powi(-2)).fold(0.0, f64::max);
    for (i, d) in data.iter_mut().enumerate() {
        if wide_symbol(grid, i) <= cutoff {
            *d = Complex::new(0.0, 0.0);
        }
    }
    fft_nd(grid, &mut data, true);
    let norm = grid.len() as f64;
    data.iter().map(|c| c.re / norm).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonSolution {
    pub u: ScalarField,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `Δ_g u = f` (mean-free solution on the range of `Δ_g`): by FFT
/// when the metric is flat, otherwise by conjugate gradients on the
/// symmetric form `e^{nφ}Δ_g` preconditioned with the flat FFT solve.
pub fn solve_poisson(g: &ConformalMetric, f: &ScalarField) -> Result<PoissonSolution> {
    let grid = g.grid().clone();
    if g.is_flat() {
        let rhs = project_to_range(f.values(), &grid);
        let u = GridForm::from_components(&grid, 0, vec![flat_poisson_pinv(&rhs, &grid, 1.0)])?;
        let res = &g.laplacian(&u) - &GridForm::from_components(&grid, 0, vec![rhs.clone()])?;
        let rel = res.max_abs() / rhs.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        return Ok(PoissonSolution {
            u,
            iterations: 1,
            relative_residual: rel,
        });
    }
    let density = g.volume_density();
    let b_field = f.mul_scalar_field(&density);
    let b = project_to_range(b_field.values(), &grid);
    let w_mean = pairwise_sum(g.weight(grid.dim() as f64 - 2.0).values()) / grid.len() as f64;
    let apply = |x: &[f64]| -> Vec<f64> {
        let xf = GridForm::from_components(&grid, 0, vec![x.to_vec()]).expect("shape");
        g.laplacian(&xf).mul_scalar_field(&density).values().to_vec()
    };
    let bnorm = dot(&b, &b).sqrt();
    let mut x = vec![0.0; b.len()];
    if bnorm == 0.0 {
        return Ok(PoissonSolution {
            u: GridForm::zero(&grid, 0),
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = b.clone();
    let mut z = flat_poisson_pinv(&r, &grid, w_mean);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=POISSON_MAX_ITER {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let step = rz / pap;
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += step * pi);
        r.iter_mut().zip(&ap).for_each(|(ri, ai)| *ri -= step * ai);
        let rel = dot(&r, &r).sqrt() / bnorm;
        if rel < POISSON_TOL {
            let mean = pairwise_sum(&x) / x.len() as f64;
            x.iter_mut().for_each(|v| *v -= mean);
            return Ok(PoissonSolution {
                u: GridForm::from_components(&grid, 0, vec![x])?,
                iterations: it,
                relative_residual: rel,
            });
        }
        z = flat_poisson_pinv(&r, &grid, w_mean);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    Err(Error::NoConvergence {
        iterations: POISSON_MAX_ITER,
        residual: dot(&r, &r).sqrt() / bnorm,
    })
}

/// `a + dh` with `Δ_g h = −δ_g a`: the `g`-harmonic representative of the
/// class of a closed 1-form.
pub fn harmonic_representative(a: &GridForm, g: &ConformalMetric) -> Result<GridForm> {
    if a.degree() != 1 {
        return Err(Error::InvalidParameter("harmonic representative of a non-1-form".into()));
    }
    let da = mesh_d(a).max_abs();
    if da > 1e-8 * (1.0 + a.max_abs()) {
        return Err(Error::NotClosed(da));
    }
    let rhs = -&g.codifferential(a);
    let h = solve_poisson(g, &rhs)?;
    Ok(a + &mesh_d(&h.u))
}
