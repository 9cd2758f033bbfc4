//! Gauduchon conformal factors and the twisted-Gauduchon identity on
//! conformally flat Hermitian data over `T⁴`.

use serde::Serialize;

use super::grid::{GridForm, OneFormField, PeriodicGrid, ScalarField, TwoFormField};
use super::ops::{mesh_d, mesh_d_alpha, mesh_dc_alpha, ConformalMetric};
use crate::error::{Error, Result};
use crate::formcalc::form::multi_indices;
use crate::formcalc::{metric_of_form, ComplexStructureJ, FrameForm};

/// Relative tolerance for recognizing `F = ρ·C` with `C` constant.
const FLATNESS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct GauduchonFactor {
    /// `u > 0` with `dd^c(uF) = 0`, normalized by `∫u² v_F = 1`.
    pub u: ScalarField,
    /// Sup norm of `dd^c(uF)` computed with the mesh operators.
    pub residual: f64,
}

/// Splits `F = ρ·C` with `C` a constant 2-form, `ρ > 0`, `ρ(node 0) = 1`.
fn conformal_split(f: &TwoFormField) -> Result<(ScalarField, Vec<f64>)> {
    let grid = f.grid();
    let c: Vec<f64> = f.components().iter().map(|comp| comp[0]).collect();
    let cnorm2: f64 = c.iter().map(|v| v * v).sum();
    if cnorm2 == 0.0 {
        return Err(Error::NotConformallyFlat);
    }
    let mut rho = vec![0.0; grid.len()];
    for (p, r) in rho.iter_mut().enumerate() {
        let proj: f64 = f.components().iter().zip(&c).map(|(comp, ci)| comp[p] * ci).sum::<f64>() / cnorm2;
        let dev = f
            .components()
            .iter()
            .zip(&c)
            .map(|(comp, ci)| (comp[p] - proj * ci).abs())
            .fold(0.0, f64::max);
        if proj <= 0.0 || dev > FLATNESS_TOL * proj * cnorm2.sqrt() {
            return Err(Error::NotConformallyFlat);
        }
        *r = proj;
    }
    Ok((GridForm::from_components(grid, 0, vec![rho])?, c))
}

/// `dd^c` of a 2-form with a constant complex structure.
fn ddc(a: &TwoFormField, j: &ComplexStructureJ<f64>) -> Result<GridForm> {
    let zero = GridForm::zero(a.grid(), 1);
    Ok(mesh_d(&mesh_dc_alpha(a, &zero, j)?))
}

/// Gauduchon factor of a conformally flat Hermitian form `F = ρ·C` on `T⁴`:
/// `u = ρ^{-1}` (so `uF` is constant, hence `dd^c`-closed), normalized in
/// `L²(v_F)` with `v_F = F²/2`.
pub fn gauduchon_factor(f: &TwoFormField, j: &ComplexStructureJ<f64>) -> Result<GauduchonFactor> {
    let grid = f.grid();
    if grid.dim() != 4 || f.degree() != 2 || j.dim() != 4 {
        return Err(Error::InvalidParameter("Gauduchon factor needs a 2-form on T⁴".into()));
    }
    let (rho, c) = conformal_split(f)?;
    let cf = FrameForm::from_coeffs(4, 2, c.clone());
    if cf.pullback(j.matrix()).coeffs().iter().zip(&c).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::InvalidParameter("form is not J-invariant".into()));
    }
    metric_of_form(&cf, j)?;
    // v_F = ρ² · (C²/2), with C²/2 = Pf(C) dx.
    let pf = c[0] * c[5] - c[1] * c[4] + c[2] * c[3];
    let u_raw = rho.map_values(|r| 1.0 / r);
    let integral = u_raw.zip_with(&rho, |u, r| u * u * r * r * pf).values().iter().sum::<f64>()
        * grid.cell_volume();
    let u = u_raw.scale(1.0 / integral.sqrt());
    let residual = ddc(&f.mul_scalar_field(&u), j)?.max_abs();
    let scale = f.max_abs() * u.max_abs();
    if residual > 1e-8 * scale.max(1.0) {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual,
        });
    }
    Ok(GauduchonFactor { u, residual })
}

/// Both sides of `d_α d^c_α F = −(δ(θ−α) + g(θ−α, α)) v_g` for
/// `F = e^{2φ}ω₀` (standard complex structure, `ω₀ = Σ dx_{2a}∧dx_{2a+1}`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaResidual {
    pub grid_n: usize,
    pub lhs_max: f64,
    pub rhs_max: f64,
    /// Sup norm of the difference of the two top-form coefficients.
    pub residual: f64,
}

/// Lee form `θ = dρ/ρ`, `ρ = e^{2φ}`, built from the mesh `d`: with it the
/// discrete equation `dF = θ∧F` holds exactly, and so does the identity.
pub fn discrete_lee_form(phi: &ScalarField) -> OneFormField {
    let rho = phi.map_values(|p| (2.0 * p).exp());
    mesh_d(&rho).mul_scalar_field(&rho.map_values(|r| 1.0 / r))
}

/// Evaluates the identity for `F = e^{2φ}ω₀` with a caller-supplied Lee form
/// (e.g. `2dφ` sampled from a closed form, or [`discrete_lee_form`]).
pub fn lemma_residual(phi: &ScalarField, theta: &OneFormField, alpha: &OneFormField) -> Result<LemmaResidual> {
    let grid = phi.grid();
    if grid.dim() != 4 {
        return Err(Error::InvalidParameter("identity is checked on T⁴".into()));
    }
    let closed = mesh_d(alpha).max_abs();
    if closed > 1e-10 * (1.0 + alpha.max_abs()) {
        return Err(Error::NotClosed(closed));
    }
    let j = ComplexStructureJ::<f64>::standard(4);
    let g = ConformalMetric::new(phi.clone())?;
    let rho = g.weight(2.0);
    let omega0 = GridForm::from_fn(grid, 2, |r, _| {
        let idx = &multi_indices(4, 2)[r];
        if idx[1] == idx[0] + 1 && idx[0].is_multiple_of(2) {
            1.0
        } else {
            0.0
        }
    });
    let f = omega0.mul_scalar_field(&rho);
    let lhs = mesh_d_alpha(&mesh_dc_alpha(&f, alpha, &j)?, alpha)?;
    let diff = theta - alpha;
    let scalar = &g.codifferential(&diff) + &g.inner(&diff, alpha);
    let rhs = (-&scalar).mul_scalar_field(&g.volume_density());
    let residual = lhs.components()[0]
        .iter()
        .zip(rhs.values())
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    Ok(LemmaResidual {
        grid_n: grid.points(0),
        lhs_max: lhs.max_abs(),
        rhs_max: rhs.max_abs(),
        residual,
    })
}

/// Smooth data on `T⁴` with `N` points per axis for refinement studies:
/// `φ = 0.1 sin x₁ + 0.1 cos x₂`, its exact Lee form `θ = 2dφ` sampled at the
/// nodes, and the closed twist `α = 0.5 dx₁ + d(0.2 sin x₃)` (mesh `d`).
pub fn lemma_test_data(n: usize) -> Result<(ScalarField, OneFormField, OneFormField)> {
    let grid = PeriodicGrid::new(4, n)?;
    let phi = GridForm::scalar_fn(&grid, |x| 0.1 * x[0].sin() + 0.1 * x[1].cos());
    let theta = GridForm::one_form_fn(&grid, |i, x| match i {
        0 => 0.2 * x[0].cos(),
        1 => -0.2 * x[1].sin(),
        _ => 0.0,
    });
    let s = GridForm::scalar_fn(&grid, |x| 0.2 * x[2].sin());
    let alpha = &GridForm::constant_one_form(&grid, &[0.5, 0.0, 0.0, 0.0]) + &mesh_d(&s);
    Ok((phi, theta, alpha))
}
