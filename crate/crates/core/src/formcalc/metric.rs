
use super::form::{multi_indices, FrameForm};
use super::linalg::Mat;
use super::scalar::{RealScalar, Scalar};
use crate::error::{Error, Result};

/// Gram matrix `g(e_i, e_j)` of a (possibly non-orthonormal) frame.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor<S> {
    gram: Mat<S>,
    inverse: Mat<S>,
}

impl<S: RealScalar> MetricTensor<S> {
    /// Validates symmetry and positive definiteness (Sylvester's criterion,
    /// exact for rational input).
    pub fn new(gram: Mat<S>) -> Result<Self> {
        let n = gram.rows();
        if gram.cols() != n {
            return Err(Error::NotPositiveDefinite);
        }
        for i in 0..n {
            for j in 0..i {
                if !(gram[(i, j)].clone() - gram[(j, i)].clone()).is_negligible() {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        for k in 1..=n {
            let idx: Vec<usize> = (0..k).collect();
            if gram.minor_matrix(&idx, &idx).det() <= S::zero() {
                return Err(Error::NotPositiveDefinite);
            }
        }
        let inverse = gram.inverse().ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { gram, inverse })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            gram: Mat::identity(n),
            inverse: Mat::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Mat<S> {
        &self.gram
    }

    pub fn inverse(&self) -> &Mat<S> {
        &self.inverse
    }

    pub fn det(&self) -> S {
        self.gram.det()
    }

    pub fn is_identity(&self) -> bool {
        self.gram == Mat::identity(self.dim())
    }

    pub fn vectors(&self, x: &[S], y: &[S]) -> S {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).fold(S::zero(), |a, (u, v)| a + u.clone() * v.clone())
    }

    /// Induced inner product of k-forms, normalized so that an orthonormal
    /// coframe gives `⟨e^I, e^I⟩ = 1`.
    pub fn inner(&self, a: &FrameForm<S>, b: &FrameForm<S>) -> S {
        assert_eq!(a.degree(), b.degree());
        let k = a.degree();
        if k == 0 {
            return a.coeffs()[0].clone() * b.coeffs()[0].clone();
        }
        let idx = multi_indices(self.dim(), k);
        let mut acc = S::zero();
        for (i, ii) in idx.iter().enumerate() {
            if a.coeffs()[i].is_zero() {
                continue;
            }
            for (j, jj) in idx.iter().enumerate() {
                if b.coeffs()[j].is_zero() {
                    continue;
                }
                let g = self.inverse.minor_matrix(ii, jj).det();
                acc = acc + a.coeffs()[i].clone() * b.coeffs()[j].clone() * g;
            }
        }
        acc
    }

    /// Metric dual of a 1-form (index raising).
    pub fn sharp(&self, a: &FrameForm<S>) -> Vec<S> {
        assert_eq!(a.degree(), 1);
        self.inverse.mul_vec(a.coeffs())
    }

    /// Metric dual of a vector (index lowering).
    pub fn flat(&self, x: &[S]) -> FrameForm<S> {
        FrameForm::one_form(self.gram.mul_vec(x))
    }

    /// Riemannian volume form `sqrt(det g) e^1∧…∧e^n` for the given
    /// orientation. Fails when the square root is not in the field.
    pub fn volume_form(&self, orientation: i32) -> Result<FrameForm<S>> {
        let n = self.dim();
        let root = self.det().sqrt_exact().ok_or(Error::IrrationalVolume)?;
        let idx: Vec<usize> = (0..n).collect();
        let sign = S::from_i64(orientation.signum() as i64);
        Ok(FrameForm::basis(n, &idx).scale(&(root * sign)))
    }

    /// Hodge star, characterized by `b ∧ *a = ⟨b, a⟩ v_g`.
    pub fn hodge_star(&self, a: &FrameForm<S>, orientation: i32) -> Result<FrameForm<S>> {
        let n = self.dim();
        let k = a.degree();
        if a.dim() != n {
            return Err(Error::DimensionMismatch(a.dim(), n));
        }
        let root = self.det().sqrt_exact().ok_or(Error::IrrationalVolume)?;
        let scale = root * S::from_i64(orientation.signum() as i64);
        let mut out = FrameForm::<S>::zero(n, n - k);
        for idx in multi_indices(n, k) {
            let e_i = FrameForm::<S>::basis(n, &idx);
            let pairing = self.inner(&e_i, a);
            if pairing.is_zero() {
                continue;
            }
            let complement: Vec<usize> = (0..n).filter(|i| !idx.contains(i)).collect();
            let mut full = idx.clone();
            full.extend_from_slice(&complement);
            let sign = FrameForm::<S>::basis(n, &full).coeffs()[0].clone();
            let pos = super::form::multi_index_rank(n, &complement);
            out.coeffs_mut()[pos] =
                out.coeffs()[pos].clone() + pairing * sign * scale.clone();
        }
        Ok(out)
    }
}

/// Endomorphism `J` of the frame with `J² = −1`; column convention
/// `J e_j = Σ_i J_ij e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructureJ<S> {
    matrix: Mat<S>,
}

impl<S: Scalar> ComplexStructureJ<S> {
    pub fn new(matrix: Mat<S>) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n || !n.is_multiple_of(2) {
            return Err(Error::NotComplexStructure);
        }
        let sq = matrix.mul(&matrix);
        let minus_id = Mat::from_fn(n, n, |i, j| if i == j { -S::one() } else { S::zero() });
        let diff = Mat::from_fn(n, n, |i, j| sq[(i, j)].clone() - minus_id[(i, j)].clone());
        if !diff.is_zero() {
            return Err(Error::NotComplexStructure);
        }
        Ok(Self { matrix })
    }

    /// `J e_{2a} = e_{2a+1}`, the standard structure on `ℝ^{2m} = ℂ^m` with
    /// frame `(x_1, y_1, x_2, y_2, …)`.
    pub fn standard(n: usize) -> Self {
        assert!(n.is_multiple_of(2));
        let mut m = Mat::zeros(n, n);
        for a in 0..n / 2 {
            m[(2 * a + 1, 2 * a)] = S::one();
            m[(2 * a, 2 * a + 1)] = -S::one();
        }
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.matrix
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        self.matrix.mul_vec(x)
    }

    pub fn neg_matrix(&self) -> Mat<S> {
        self.matrix.map(|x| -x.clone())
    }

    /// Natural action on forms, `(J·β)(X, …) = β(J⁻¹X, …)`; on 1-forms
    /// `(Jβ)(X) = −β(JX)`.
    pub fn act(&self, a: &FrameForm<S>) -> FrameForm<S> {
        a.pullback(&self.neg_matrix())
    }

    /// Inverse action `J⁻¹·β = J^*β`.
    pub fn act_inverse(&self, a: &FrameForm<S>) -> FrameForm<S> {
        a.pullback(&self.matrix)
    }

    pub fn complexify(&self) -> ComplexStructureJ<S::Complex>
    where
        S: RealScalar,
    {
        ComplexStructureJ {
            matrix: self.matrix.map(RealScalar::complexify),
        }
    }

    /// `g(J·, J·) = g`.
    pub fn is_compatible(&self, g: &MetricTensor<S>) -> bool
    where
        S: RealScalar,
    {
        let pulled = self.matrix.transpose().mul(g.gram()).mul(&self.matrix);
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (pulled[(i, j)].clone() - g.gram()[(i, j)].clone()).is_negligible()))
    }
}

/// Hermitian metric `g(X, Y) = F(X, JY)` of a 2-form `F`.
pub fn metric_of_form<S: RealScalar>(f: &FrameForm<S>, j: &ComplexStructureJ<S>) -> Result<MetricTensor<S>> {
    let a = f.to_antisymmetric();
    MetricTensor::new(a.mul(j.matrix()))
}
