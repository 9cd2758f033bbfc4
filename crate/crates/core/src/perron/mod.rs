//! Principal eigenvalues of `L(u) = Δu + g(α, du) + cu` on periodic grids.
//!
//! The operator is discretized with a compact conformal Laplacian and an
//! upwinded drift so that `L_h + sI` is a nonsingular M-matrix; the principal
//! eigenpair then comes from power iteration on its (entrywise positive)
//! inverse, which is the discrete Perron–Frobenius route to the positive
//! eigenfunction.

mod eigen;
mod sparse;

use serde::{Deserialize, Serialize};

pub use eigen::{
    adjoint_spec, eigen_derivative, family_root, find_sign_changes, inverse_iteration_ratio, left_eigenpair,
    principal_eigenpair, spectrum_dense, variational_bounds, EigenDerivative, FamilyRoot, PrincipalEigenpair,
    SpectrumReport, DENSE_LIMIT, MAX_POWER_ITER,
};
pub use sparse::SparseOperator;

use crate::error::{Error, Result};
use crate::mesh::{ConformalMetric, GridForm, OneFormField, ScalarField};

/// Discretization of the first-order term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DriftScheme {
    /// One-sided differences against the flow: keeps the M-matrix structure.
    #[default]
    Upwind,
    /// Second-order centered differences; positivity is checked, not guaranteed.
    Centered,
}

/// `L(u) = Δ_g u + g(α, du) + c u`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticSpec {
    pub metric: ConformalMetric,
    pub drift: OneFormField,
    pub potential: ScalarField,
    pub scheme: DriftScheme,
}

impl EllipticSpec {
    pub fn new(metric: ConformalMetric, drift: OneFormField, potential: ScalarField) -> Result<Self> {
        let grid = metric.grid();
        if drift.grid() != grid || potential.grid() != grid {
            return Err(Error::InvalidParameter("drift, potential and metric live on different grids".into()));
        }
        if drift.degree() != 1 || potential.degree() != 0 {
            return Err(Error::InvalidParameter("drift must be a 1-form and potential a function".into()));
        }
        if !drift.is_finite() || !potential.is_finite() {
            return Err(Error::InvalidParameter("non-finite coefficients".into()));
        }
        Ok(Self {
            metric,
            drift,
            potential,
            scheme: DriftScheme::Upwind,
        })
    }

    /// Pure Laplacian plus constant potential on a flat grid.
    pub fn laplacian(metric: ConformalMetric, c0: f64) -> Self {
        let grid = metric.grid().clone();
        Self {
            metric,
            drift: GridForm::zero(&grid, 1),
            potential: GridForm::constant(&grid, c0),
            scheme: DriftScheme::Upwind,
        }
    }

    pub fn with_scheme(mut self, scheme: DriftScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Same operator plus `t·c₁` in the potential.
    pub fn add_potential(&self, c1: &ScalarField, t: f64) -> Self {
        let mut out = self.clone();
        out.potential = &self.potential + &c1.scale(t);
        out
    }

    pub fn len(&self) -> usize {
        self.metric.grid().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The shift `s = max(0, −min c) + 1` making `L_h + sI` strictly
    /// diagonally dominant.
    pub fn shift(&self) -> f64 {
        (-self.potential.min_value()).max(0.0) + 1.0
    }

    /// Sparse matrix of `L_h`.
    pub fn assemble(&self) -> SparseOperator {
        let grid = self.metric.grid();
        let n = grid.dim() as f64;
        let inv_vol = self.metric.weight(-n);
        let w = self.metric.weight(n - 2.0);
        // Metric dual of the drift, b^i = e^{−2φ} α_i.
        let b = self.metric.sharp(&self.drift);
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(grid.len());
        for p in 0..grid.len() {
            let mut diag = self.potential.values()[p];
            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(2 * grid.dim() + 1);
            for axis in 0..grid.dim() {
                let h = grid.spacing(axis);
                let up = grid.neighbor(p, axis, 1);
                let dn = grid.neighbor(p, axis, -1);
                let w_up = 0.5 * (w.values()[p] + w.values()[up]);
                let w_dn = 0.5 * (w.values()[p] + w.values()[dn]);
                let k = inv_vol.values()[p] / (h * h);
                diag += k * (w_up + w_dn);
                entries.push((up, -k * w_up));
                entries.push((dn, -k * w_dn));
                let bi = b.components()[axis][p];
                match self.scheme {
                    DriftScheme::Upwind => {
                        if bi > 0.0 {
                            diag += bi / h;
                            entries.push((dn, -bi / h));
                        } else if bi < 0.0 {
                            diag -= bi / h;
                            entries.push((up, bi / h));
                        }
                    }
                    DriftScheme::Centered => {
                        entries.push((up, bi / (2.0 * h)));
                        entries.push((dn, -bi / (2.0 * h)));
                    }
                }
            }
            entries.push((p, diag));
            rows.push(entries);
        }
        SparseOperator::from_rows(grid.len(), rows)
    }

    /// `L_h u` as a field.
    pub fn apply(&self, u: &ScalarField) -> ScalarField {
        let v = self.assemble().matvec(u.values());
        GridForm::from_components(u.grid(), 0, vec![v]).expect("same grid")
    }
}
