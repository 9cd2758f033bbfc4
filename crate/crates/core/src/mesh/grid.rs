//! Periodic grids and differential-form fields sampled at grid nodes.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::formcalc::form::{binomial, multi_index_rank, multi_indices, sort_with_sign};

/// Flat torus `∏ ℝ/P_iℤ` sampled at `N_i` equispaced nodes per axis.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PeriodicGrid {
    dim: usize,
    n: Vec<usize>,
    period: Vec<f64>,
}

impl PeriodicGrid {
    /// `dim`-torus with `n` points per axis and period `2π`.
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        Self::with_axes(vec![n; dim], vec![2.0 * PI; dim])
    }

    pub fn with_axes(n: Vec<usize>, period: Vec<f64>) -> Result<Self> {
        let dim = n.len();
        if dim == 0 || dim > 4 || period.len() != dim {
            return Err(Error::InvalidParameter(format!("grid dimension {dim} not in 1..=4")));
        }
        if let Some(bad) = n.iter().find(|&&k| k < 4 || k % 2 != 0) {
            return Err(Error::InvalidParameter(format!("points per axis must be even and ≥ 4, got {bad}")));
        }
        if period.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidParameter("periods must be positive".into()));
        }
        Ok(Self { dim, n, period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn axes(&self) -> &[usize] {
        &self.n
    }

    pub fn period(&self, axis: usize) -> f64 {
        self.period[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.n[axis] as f64
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn total_volume(&self) -> f64 {
        self.period.iter().product()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major stride of an axis (last axis fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.n[axis + 1..].iter().product()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            out[a] = flat % self.n[a];
            flat /= self.n[a];
        }
        out
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| i as f64 * self.spacing(a))
            .collect()
    }

    /// Flat index of the neighbour `shift` steps along `axis` (periodic).
    #[inline]
    pub fn neighbor(&self, flat: usize, axis: usize, shift: isize) -> usize {
        let stride = self.stride(axis);
        let n = self.n[axis];
        let i = (flat / stride) % n;
        let j = (i as isize + shift).rem_euclid(n as isize) as usize;
        flat - i * stride + j * stride
    }
}

/// A degree-`k` form on a periodic grid, stored by components on increasing
/// multi-indices of the coordinate coframe `dx_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridForm {
    grid: PeriodicGrid,
    degree: usize,
    comps: Vec<Vec<f64>>,
}

pub type ScalarField = GridForm;
pub type OneFormField = GridForm;
pub type TwoFormField = GridForm;

impl GridForm {
    pub fn zero(grid: &PeriodicGrid, degree: usize) -> Self {
        assert!(degree <= grid.dim());
        Self {
            grid: grid.clone(),
            degree,
            comps: vec![vec![0.0; grid.len()]; binomial(grid.dim(), degree)],
        }
    }

    pub fn from_components(grid: &PeriodicGrid, degree: usize, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != binomial(grid.dim(), degree) || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::DimensionMismatch(comps.len(), binomial(grid.dim(), degree)));
        }
        Ok(Self {
            grid: grid.clone(),
            degree,
            comps,
        })
    }

    pub fn scalar_fn(grid: &PeriodicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self {
            grid: grid.clone(),
            degree: 0,
            comps: vec![values],
        }
    }

    pub fn constant(grid: &PeriodicGrid, c: f64) -> Self {
        Self::scalar_fn(grid, |_| c)
    }

    /// Form whose component on the multi-index number `r` is `f(r, x)`.
    pub fn from_fn(grid: &PeriodicGrid, degree: usize, f: impl Fn(usize, &[f64]) -> f64) -> Self {
        let mut out = Self::zero(grid, degree);
        for i in 0..grid.len() {
            let x = grid.coords(i);
            for (r, c) in out.comps.iter_mut().enumerate() {
                c[i] = f(r, &x);
            }
        }
        out
    }

    /// 1-form `Σ f_i(x) dx_i`.
    pub fn one_form_fn(grid: &PeriodicGrid, f: impl Fn(usize, &[f64]) -> f64) -> Self {
        Self::from_fn(grid, 1, f)
    }

    /// Constant-coefficient 1-form.
    pub fn constant_one_form(grid: &PeriodicGrid, c: &[f64]) -> Self {
        Self::from_fn(grid, 1, |i, _| c[i])
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.comps
    }

    /// Component on an increasing multi-index.
    pub fn component(&self, idx: &[usize]) -> &[f64] {
        &self.comps[multi_index_rank(self.grid.dim(), idx)]
    }

    /// Values of a 0-form.
    pub fn values(&self) -> &[f64] {
        assert_eq!(self.degree, 0, "values() on a form of positive degree");
        &self.comps[0]
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        assert_eq!(self.degree, 0);
        &mut self.comps[0]
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.iter().map(|&v| f(v)).collect()).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid.clone(),
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_values(|v| v * s)
    }

    /// Pointwise product with a function.
    pub fn mul_scalar_field(&self, f: &ScalarField) -> Self {
        assert_eq!(f.degree, 0);
        let fv = f.values();
        Self {
            grid: self.grid.clone(),
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.iter().zip(fv).map(|(a, b)| a * b).collect()).collect(),
        }
    }

    /// Pointwise exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let n = self.grid.dim();
        let k = self.degree + other.degree;
        if k > n {
            return Err(Error::DegreeOverflow {
                left: self.degree,
                right: other.degree,
                dim: n,
            });
        }
        let mut out = Self::zero(&self.grid, k);
        for (i, a) in multi_indices(n, self.degree).iter().enumerate() {
            for (j, b) in multi_indices(n, other.degree).iter().enumerate() {
                let joined: Vec<usize> = a.iter().chain(b).copied().collect();
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    let r = multi_index_rank(n, &sorted);
                    let s = sign as f64;
                    let (ca, cb) = (&self.comps[i], &other.comps[j]);
                    for (o, (x, y)) in out.comps[r].iter_mut().zip(ca.iter().zip(cb)) {
                        *o += s * x * y;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies the same linear map to the component vector at every node;
    /// `m[r][c]` maps input component `c` to output component `r`.
    pub fn apply_pointwise(&self, out_degree: usize, m: &[Vec<f64>]) -> Self {
        let mut out = Self::zero(&self.grid, out_degree);
        for (r, row) in m.iter().enumerate() {
            for (c, &w) in row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (o, v) in out.comps[r].iter_mut().zip(&self.comps[c]) {
                    *o += w * v;
                }
            }
        }
        out
    }

    /// Pointwise Euclidean pairing `Σ_I a_I b_I` (flat metric).
    pub fn flat_dot(&self, other: &Self) -> ScalarField {
        assert_eq!(self.degree, other.degree);
        let mut out = Self::zero(&self.grid, 0);
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (o, (x, y)) in out.comps[0].iter_mut().zip(a.iter().zip(b)) {
                *o += x * y;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flatten().all(|v| v.is_finite())
    }
}

impl Add for &GridForm {
    type Output = GridForm;
    fn add(self, rhs: &GridForm) -> GridForm {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GridForm {
    type Output = GridForm;
    fn sub(self, rhs: &GridForm) -> GridForm {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for GridForm {
    type Output = GridForm;
    fn add(self, rhs: GridForm) -> GridForm {
        &self + &rhs
    }
}

impl Sub for GridForm {
    type Output = GridForm;
    fn sub(self, rhs: GridForm) -> GridForm {
        &self - &rhs
    }
}

impl Neg for &GridForm {
    type Output = GridForm;
    fn neg(self) -> GridForm {
        self.scale(-1.0)
    }
}

impl Neg for GridForm {
    type Output = GridForm;
    fn neg(self) -> GridForm {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &GridForm {
    type Output = GridForm;
    fn mul(self, s: f64) -> GridForm {
        self.scale(s)
    }
}

/// Pairwise (cascade) summation in index order; deterministic and accurate.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if v.len() <= BLOCK {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbors_wrap_around() {
        let g = PeriodicGrid::new(2, 4).unwrap();
        assert_eq!(g.neighbor(0, 0, -1), 12);
        assert_eq!(g.neighbor(3, 1, 1), 0);
        assert_eq!(g.multi_index(7), vec![1, 3]);
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(PeriodicGrid::new(2, 5).is_err());
        assert!(PeriodicGrid::new(2, 2).is_err());
        assert!(PeriodicGrid::new(5, 4).is_err());
    }

    #[test]
    fn pointwise_wedge_is_antisymmetric() {
        let g = PeriodicGrid::new(2, 4).unwrap();
        let a = GridForm::one_form_fn(&g, |i, x| (i as f64 + 1.0) * x[0].sin());
        let b = GridForm::one_form_fn(&g, |i, x| (2.0 - i as f64) * x[1].cos());
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert!((&ab + &ba).max_abs() < 1e-15);
        assert!(a.wedge(&a).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }
}
