//! Row-compressed sparse matrices and Krylov solves.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::grid::pairwise_sum;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Builds from per-row `(column, value)` lists; duplicates are summed and
    /// columns sorted so the layout is canonical.
    pub fn from_rows(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        assert_eq!(rows.len(), n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                assert!(c < n, "column out of range");
                if last == Some(c) {
                    *vals.last_mut().expect("entry exists") += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|e| e.0 == c).map_or(0.0, |e| e.1)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                rows[c].push((r, v));
            }
        }
        Self::from_rows(self.n, rows)
    }

    /// `self + s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        let rows = (0..self.n)
            .map(|r| {
                let mut row: Vec<(usize, f64)> = self.row(r).collect();
                row.push((r, s));
                row
            })
            .collect();
        Self::from_rows(self.n, rows)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.row(r).map(|e| e.1).sum()).collect()
    }

    /// Largest off-diagonal entry (≤ 0 for a Z-matrix).
    pub fn max_off_diagonal(&self) -> f64 {
        (0..self.n)
            .flat_map(|r| self.row(r).filter(move |e| e.0 != r).map(|e| e.1))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `min_r (a_rr − Σ_{c≠r} |a_rc|)`.
    pub fn diagonal_dominance_margin(&self) -> f64 {
        (0..self.n)
            .map(|r| {
                let off: f64 = self.row(r).filter(|e| e.0 != r).map(|e| e.1.abs()).sum();
                self.get(r, r) - off
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// Jacobi-preconditioned BiCGSTAB for `self · x = b`.
    pub fn solve(&self, b: &[f64], x0: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.n;
        let inv_diag: Vec<f64> = self
            .diagonal()
            .iter()
            .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(&inv_diag).map(|(a, d)| a * d).collect() };
        let bnorm = norm(b);
        let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let ax = self.matvec(&x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut res = norm(&r) / bnorm;
        for _ in 0..max_iter {
            if res < tol {
                return Ok(x);
            }
            let rho_new = dot(&r_hat, &r);
            if rho_new == 0.0 || omega == 0.0 {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            let ph = precond(&p);
            v = self.matvec(&ph);
            let denom = dot(&r_hat, &v);
            if denom == 0.0 {
                break;
            }
            alpha = rho / denom;
            let s: Vec<f64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
            if norm(&s) / bnorm < tol {
                x.iter_mut().zip(&ph).for_each(|(xi, pi)| *xi += alpha * pi);
                return Ok(x);
            }
            let sh = precond(&s);
            let t = self.matvec(&sh);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..n {
                x[i] += alpha * ph[i] + omega * sh[i];
                r[i] = s[i] - omega * t[i];
            }
            res = norm(&r) / bnorm;
        }
        if res < tol {
            return Ok(x);
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual: res,
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&p)
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
