//! Centered discrete exterior calculus with a conformal metric `e^{2φ}·flat`.

use super::grid::{pairwise_sum, GridForm, PeriodicGrid, ScalarField};
use crate::error::{Error, Result};
use crate::formcalc::form::{multi_index_rank, multi_indices, sort_with_sign};
use crate::formcalc::{ComplexStructureJ, FrameForm, Mat};

/// `g = e^{2φ}` times the flat metric; `v_g = e^{nφ}` times the flat volume.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMetric {
    phi: ScalarField,
}

impl ConformalMetric {
    pub fn flat(grid: &PeriodicGrid) -> Self {
        Self {
            phi: GridForm::zero(grid, 0),
        }
    }

    pub fn new(phi: ScalarField) -> Result<Self> {
        if phi.degree() != 0 {
            return Err(Error::InvalidParameter("conformal factor must be a function".into()));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("conformal factor is not finite".into()));
        }
        Ok(Self { phi })
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.phi.grid()
    }

    pub fn is_flat(&self) -> bool {
        self.phi.max_abs() == 0.0
    }

    /// `e^{sφ}` as a field.
    pub fn weight(&self, s: f64) -> ScalarField {
        self.phi.map_values(|p| (s * p).exp())
    }

    /// Density of `v_g` against the flat volume.
    pub fn volume_density(&self) -> ScalarField {
        self.weight(self.grid().dim() as f64)
    }

    /// Pointwise `g(a, b)` for forms of equal degree.
    pub fn inner(&self, a: &GridForm, b: &GridForm) -> ScalarField {
        let k = a.degree() as f64;
        a.flat_dot(b).mul_scalar_field(&self.weight(-2.0 * k))
    }

    pub fn norm2(&self, a: &GridForm) -> ScalarField {
        self.inner(a, a)
    }

    /// `∫ f v_g` by the uniform rule (exact for constants).
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        let w = f.mul_scalar_field(&self.volume_density());
        pairwise_sum(w.values()) * self.grid().cell_volume()
    }

    /// `∫ ⟨a, b⟩_g v_g`.
    pub fn l2_inner(&self, a: &GridForm, b: &GridForm) -> f64 {
        self.integrate(&self.inner(a, b))
    }

    pub fn volume(&self) -> f64 {
        self.integrate(&GridForm::constant(self.grid(), 1.0))
    }

    /// Hodge star of `g` (orientation `dx_1∧…∧dx_n`).
    pub fn star(&self, a: &GridForm) -> GridForm {
        let n = self.grid().dim();
        let k = a.degree();
        flat_star(a).mul_scalar_field(&self.weight(n as f64 - 2.0 * k as f64))
    }

    /// `δ = (−1)^{n(k+1)+1} ⋆d⋆` on `k`-forms, so that `Δ = δd ≥ 0`.
    pub fn codifferential(&self, a: &GridForm) -> GridForm {
        let n = self.grid().dim();
        let k = a.degree();
        assert!(k >= 1, "codifferential of a function");
        let s = if (n * (k + 1) + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        self.star(&mesh_d(&self.star(a))).scale(s)
    }

    /// `Δ_g u = δ_g du` on functions (wide centered stencil).
    pub fn laplacian(&self, u: &ScalarField) -> ScalarField {
        self.codifferential(&mesh_d(u))
    }

    /// Metric dual components `g^{ij} a_j = e^{−2φ} a_i` of a 1-form.
    pub fn sharp(&self, a: &GridForm) -> GridForm {
        assert_eq!(a.degree(), 1);
        a.mul_scalar_field(&self.weight(-2.0))
    }

    /// `g(a, du)` for a 1-form `a`.
    pub fn pair_with_differential(&self, a: &GridForm, u: &ScalarField) -> ScalarField {
        self.inner(a, &mesh_d(u))
    }
}

/// Centered difference `(f(x+h e_i) − f(x−h e_i)) / 2h`.
pub fn centered_partial(grid: &PeriodicGrid, f: &[f64], axis: usize) -> Vec<f64> {
    let inv = 1.0 / (2.0 * grid.spacing(axis));
    (0..grid.len())
        .map(|i| (f[grid.neighbor(i, axis, 1)] - f[grid.neighbor(i, axis, -1)]) * inv)
        .collect()
}

/// Discrete exterior derivative built from centered differences. The
/// difference operators commute, so `d∘d = 0` up to rounding.
pub fn mesh_d(a: &GridForm) -> GridForm {
    let grid = a.grid();
    let n = grid.dim();
    let k = a.degree();
    if k >= n {
        return GridForm::zero(grid, n);
    }
    let mut out = GridForm::zero(grid, k + 1);
    let sources = multi_indices(n, k);
    // Derivatives of every component along every axis, computed once.
    let partials: Vec<Vec<Vec<f64>>> = a
        .components()
        .iter()
        .map(|c| (0..n).map(|axis| centered_partial(grid, c, axis)).collect())
        .collect();
    for (r, big) in multi_indices(n, k + 1).iter().enumerate() {
        for p in 0..=k {
            let rest: Vec<usize> = big.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, &v)| v).collect();
            let src = sources.iter().position(|s| *s == rest).expect("sub-index exists");
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let dp = &partials[src][big[p]];
            for (o, v) in out.components_mut()[r].iter_mut().zip(dp) {
                *o += sign * v;
            }
        }
    }
    out
}

/// `d_α a = da − α∧a`.
pub fn mesh_d_alpha(a: &GridForm, alpha: &GridForm) -> Result<GridForm> {
    let n = a.grid().dim();
    if a.degree() >= n {
        return Ok(GridForm::zero(a.grid(), n));
    }
    Ok(&mesh_d(a) - &alpha.wedge(a)?)
}

/// Matrix of the pullback by `m` on `k`-form components (rows: output).
pub fn pullback_matrix(n: usize, k: usize, m: &Mat<f64>) -> Vec<Vec<f64>> {
    let idx = multi_indices(n, k);
    let cols: Vec<FrameForm<f64>> = idx.iter().map(|i| FrameForm::<f64>::basis(n, i).pullback(m)).collect();
    (0..idx.len()).map(|r| (0..idx.len()).map(|c| cols[c].coeffs()[r]).collect()).collect()
}

/// Constant complex structure acting on grid forms by `(J^{-1})^*`.
pub fn j_act(a: &GridForm, j: &ComplexStructureJ<f64>) -> GridForm {
    let n = a.grid().dim();
    a.apply_pointwise(a.degree(), &pullback_matrix(n, a.degree(), &j.neg_matrix()))
}

pub fn j_act_inverse(a: &GridForm, j: &ComplexStructureJ<f64>) -> GridForm {
    let n = a.grid().dim();
    a.apply_pointwise(a.degree(), &pullback_matrix(n, a.degree(), j.matrix()))
}

/// `d^c_α = J d_α J^{-1}`.
pub fn mesh_dc_alpha(a: &GridForm, alpha: &GridForm, j: &ComplexStructureJ<f64>) -> Result<GridForm> {
    Ok(j_act(&mesh_d_alpha(&j_act_inverse(a, j), alpha)?, j))
}

/// Flat Hodge star `⋆dx^I = ε(I, I^c) dx^{I^c}`.
pub fn flat_star(a: &GridForm) -> GridForm {
    let n = a.grid().dim();
    let k = a.degree();
    let mut m = vec![vec![0.0; multi_indices(n, k).len()]; multi_indices(n, n - k).len()];
    for (c, idx) in multi_indices(n, k).iter().enumerate() {
        let comp: Vec<usize> = (0..n).filter(|i| !idx.contains(i)).collect();
        let full: Vec<usize> = idx.iter().chain(&comp).copied().collect();
        let (_, sign) = sort_with_sign(&full).expect("disjoint indices");
        m[multi_index_rank(n, &comp)][c] = sign as f64;
    }
    a.apply_pointwise(n - k, &m)
}

/// `∫ top-form` or `∫ f v_g`: top forms are integrated against the flat
/// coordinate volume, functions against `v_g`.
pub fn mesh_integrate(a: &GridForm, g: &ConformalMetric) -> f64 {
    let n = a.grid().dim();
    if a.degree() == n {
        pairwise_sum(&a.components()[0]) * a.grid().cell_volume()
    } else if a.degree() == 0 {
        g.integrate(a)
    } else {
        panic!("only functions and top-degree forms can be integrated");
    }
}

pub fn mesh_codifferential(a: &GridForm, g: &ConformalMetric) -> GridForm {
    g.codifferential(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn d_of_constant_vanishes() {
        let g = PeriodicGrid::new(2, 8).unwrap();
        assert_eq!(mesh_d(&GridForm::constant(&g, 3.0)).max_abs(), 0.0);
    }

    #[test]
    fn d_of_sin_dx2_is_second_order() {
        let err = |n: usize| {
            let g = PeriodicGrid::new(2, n).unwrap();
            let a = GridForm::one_form_fn(&g, |i, x| if i == 1 { x[0].sin() } else { 0.0 });
            let exact = GridForm::from_fn(&g, 2, |_, x| x[0].cos());
            (&mesh_d(&a) - &exact).max_abs()
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 < 0.05);
        assert!((e1 / e2 - 4.0).abs() < 0.4, "ratio {}", e1 / e2);
    }

    #[test]
    fn d_squared_is_zero_to_rounding() {
        let g = PeriodicGrid::new(4, 6).unwrap();
        let f = GridForm::scalar_fn(&g, |x| (x[0] + 2.0 * x[3]).sin() * x[1].cos() + x[2].sin());
        assert!(mesh_d(&mesh_d(&f)).max_abs() < 1e-12);
        let a = GridForm::one_form_fn(&g, |i, x| ((i + 1) as f64 * x[i]).sin() * x[(i + 1) % 4].cos());
        assert!(mesh_d(&mesh_d(&a)).max_abs() < 1e-12);
    }

    #[test]
    fn codifferential_examples() {
        let grid = PeriodicGrid::new(2, 64).unwrap();
        let g = ConformalMetric::flat(&grid);
        let dx1 = GridForm::constant_one_form(&grid, &[1.0, 0.0]);
        assert!(g.codifferential(&dx1).max_abs() < 1e-14);
        let a = GridForm::one_form_fn(&grid, |i, x| if i == 0 { x[0].sin() } else { 0.0 });
        let exact = GridForm::scalar_fn(&grid, |x| -x[0].cos());
        assert!((&g.codifferential(&a) - &exact).max_abs() < 2e-3);
    }

    #[test]
    fn star_squares_to_sign() {
        let grid = PeriodicGrid::new(4, 4).unwrap();
        let g = ConformalMetric::new(GridForm::scalar_fn(&grid, |x| 0.2 * x[0].sin())).unwrap();
        for k in 0..=4 {
            let a = GridForm::from_fn(&grid, k, |r, x| (r as f64 + 1.0) * (x[1] + r as f64).cos());
            let ss = g.star(&g.star(&a));
            let sign = if (k * (4 - k)) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((&ss - &a.scale(sign)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn integrals() {
        let g4 = PeriodicGrid::new(4, 4).unwrap();
        let one = GridForm::constant(&g4, 1.0);
        let v = ConformalMetric::flat(&g4).integrate(&one);
        assert!((v - (2.0 * PI).powi(4)).abs() < 1e-9);
        let g2 = PeriodicGrid::new(2, 16).unwrap();
        let s2 = GridForm::scalar_fn(&g2, |x| x[0].sin().powi(2));
        let i = ConformalMetric::flat(&g2).integrate(&s2);
        assert!((i - 0.5 * (2.0 * PI).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn laplacian_integrates_to_zero() {
        let grid = PeriodicGrid::new(2, 12).unwrap();
        let g = ConformalMetric::new(GridForm::scalar_fn(&grid, |x| 0.3 * (x[0] - x[1]).cos())).unwrap();
        let u = GridForm::scalar_fn(&grid, |x| (2.0 * x[0]).sin() + x[1].cos().exp());
        assert!(g.integrate(&g.laplacian(&u)).abs() < 1e-12);
        let top = mesh_d(&GridForm::one_form_fn(&grid, |i, x| (x[i] * 3.0).cos() + x[0]));
        assert!(mesh_integrate(&top, &g).abs() < 1e-12);
    }

    #[test]
    fn discrete_adjointness_is_exact() {
        let grid = PeriodicGrid::new(2, 10).unwrap();
        let g = ConformalMetric::new(GridForm::scalar_fn(&grid, |x| 0.2 * x[1].sin())).unwrap();
        let u = GridForm::scalar_fn(&grid, |x| (x[0] + x[1]).sin());
        let b = GridForm::one_form_fn(&grid, |i, x| (x[0] * (i + 1) as f64).cos());
        let lhs = g.l2_inner(&mesh_d(&u), &b);
        let rhs = g.l2_inner(&u, &g.codifferential(&b));
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
