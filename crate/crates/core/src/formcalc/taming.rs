use nalgebra::DMatrix;

use super::form::FrameForm;
use super::linalg::Mat;
use super::metric::{ComplexStructureJ, MetricTensor};
use super::scalar::RealScalar;

/// Symmetric pairing `h(X, W) = ½(a(X, JW) − a(JX, W))` of a 2-form; its
/// positivity is the taming condition.
pub fn taming_pairing<S: RealScalar>(a: &FrameForm<S>, j: &ComplexStructureJ<S>) -> Mat<S> {
    let am = a.to_antisymmetric();
    let aj = am.mul(j.matrix());
    let jta = j.matrix().transpose().mul(&am);
    let half = S::half();
    Mat::from_fn(am.rows(), am.cols(), |r, c| {
        half.clone() * (aj[(r, c)].clone() - jta[(r, c)].clone())
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TamingVerdict {
    pub is_taming: bool,
    pub min_eigenvalue: f64,
}

/// Smallest eigenvalue of `h` relative to `g` (eigenvalues of `g⁻¹h`).
pub fn taming_check<S: RealScalar>(
    a: &FrameForm<S>,
    j: &ComplexStructureJ<S>,
    g: &MetricTensor<S>,
) -> TamingVerdict {
    let h = taming_pairing(a, j);
    let min_eigenvalue = min_relative_eigenvalue(&to_dmatrix(&h), &to_dmatrix(g.gram()));
    TamingVerdict {
        is_taming: min_eigenvalue > 0.0,
        min_eigenvalue,
    }
}

pub fn to_dmatrix<S: RealScalar>(m: &Mat<S>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].to_f64())
}

/// `min eig(g^{-1/2} h g^{-1/2})` for symmetric `h` and SPD `g`.
pub fn min_relative_eigenvalue(h: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let chol = g.clone().cholesky().expect("metric is positive definite");
    let l = chol.l();
    let linv = l.clone().try_inverse().expect("Cholesky factor is invertible");
    let mut s = &linv * h * linv.transpose();
    s = (&s + s.transpose()) * 0.5;
    s.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formcalc::scalar::{rat, Rational};
    use proptest::prelude::*;

    fn kahler() -> FrameForm<Rational> {
        FrameForm::basis(4, &[0, 1]) + FrameForm::basis(4, &[2, 3])
    }

    #[test]
    fn standard_kahler_form_tames() {
        let j = ComplexStructureJ::standard(4);
        let g = MetricTensor::identity(4);
        let v = taming_check(&kahler(), &j, &g);
        assert!(v.is_taming);
        assert!((v.min_eigenvalue - 1.0).abs() < 1e-14);
        let v = taming_check(&(-kahler()), &j, &g);
        assert!(!v.is_taming);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn pairing_of_kahler_form_is_the_metric() {
        let j = ComplexStructureJ::standard(4);
        assert_eq!(taming_pairing(&kahler(), &j), Mat::identity(4));
        let _ = rat(1, 1);
    }

    proptest! {
        #[test]
        fn verdict_is_scale_invariant(c in prop::collection::vec(-3.0f64..3.0, 6), s in 0.01f64..100.0) {
            let j = ComplexStructureJ::<f64>::standard(4);
            let g = MetricTensor::identity(4);
            let a = FrameForm::from_coeffs(4, 2, c);
            let v1 = taming_check(&a, &j, &g);
            let v2 = taming_check(&a.scale(&s), &j, &g);
            prop_assert_eq!(v1.is_taming, v2.is_taming);
            prop_assert!((v2.min_eigenvalue - s * v1.min_eigenvalue).abs() < 1e-9 * (1.0 + s));
        }
    }
}
