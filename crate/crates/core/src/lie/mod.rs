//! Exact Chevalley–Eilenberg calculus on left-invariant forms.
//!
//! Conventions: `dβ(A, B) = −β([A, B])` on 1-forms, extended by the usual
//! alternating formula; `d_α = d − α∧`; `d^c_α = i(∂̄_α − ∂_α)`.

mod model;
mod taming;

pub use model::{abelian4, catalog, parse_model, sol41, LieAlgebraModel, ABELIAN4_TEXT, CATALOG_NAMES, SOL41_TEXT};
pub use taming::{
    codifferential, complete_to_lcs, invariant_lck_solve, invariant_taming_solve, sample_metric_perturbation, lee_form, twisted_gauduchon_check, GauduchonCheck, LcsCompletion,
    TamingSolve, TAMING_SAMPLES,
};

use crate::error::{Error, Result};
use crate::formcalc::form::{binomial, multi_indices};
use crate::formcalc::linalg::Mat;
use crate::formcalc::scalar::{ComplexRational, Rational, Scalar};
use crate::formcalc::{ComplexFrame, FrameForm};

/// Chevalley–Eilenberg differential of an invariant form.
pub fn ce_d<S: Scalar>(model: &LieAlgebraModel, a: &FrameForm<S>) -> FrameForm<S> {
    let n = model.dim();
    assert_eq!(a.dim(), n);
    let k = a.degree();
    if k >= n {
        return FrameForm::zero(n, n);
    }
    let mut out = FrameForm::zero(n, k + 1);
    if a.is_zero() {
        return out;
    }
    for (r, big) in multi_indices(n, k + 1).iter().enumerate() {
        let mut acc = S::zero();
        for i in 0..=k {
            for j in i + 1..=k {
                let rest: Vec<usize> = big
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != i && *p != j)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if (i + j) % 2 == 0 { S::one() } else { -S::one() };
                for m in 0..n {
                    let c = model.structure_constant(big[i], big[j], m);
                    if num_traits::Zero::is_zero(c) {
                        continue;
                    }
                    let mut idx = vec![m];
                    idx.extend_from_slice(&rest);
                    let comp = a.component(&idx);
                    if comp.is_zero() {
                        continue;
                    }
                    acc = acc + sign.clone() * S::from_rational(c) * comp;
                }
            }
        }
        out.coeffs_mut()[r] = acc;
    }
    out
}

fn check_closed(model: &LieAlgebraModel, alpha: &FrameForm<Rational>) -> Result<()> {
    if alpha.degree() != 1 || alpha.dim() != model.dim() {
        return Err(Error::InvalidParameter("twisting form must be a 1-form on the algebra".into()));
    }
    let da = ce_d(model, alpha);
    if !da.is_zero() {
        return Err(Error::NotClosed(da.max_abs()));
    }
    Ok(())
}

fn lift<S: Scalar>(alpha: &FrameForm<Rational>) -> FrameForm<S> {
    alpha.map(S::from_rational)
}

/// `d_α a = da − α∧a` for a closed invariant 1-form `α`.
pub fn ce_d_alpha<S: Scalar>(
    model: &LieAlgebraModel,
    a: &FrameForm<S>,
    alpha: &FrameForm<Rational>,
) -> Result<FrameForm<S>> {
    check_closed(model, alpha)?;
    Ok(twisted(model, a, &lift(alpha)))
}

fn twisted<S: Scalar>(model: &LieAlgebraModel, a: &FrameForm<S>, alpha: &FrameForm<S>) -> FrameForm<S> {
    let n = model.dim();
    if a.degree() >= n {
        return FrameForm::zero(n, n);
    }
    ce_d(model, a) - alpha.wedge(a).expect("degree checked")
}

/// `(∂_α a, ∂̄_α a)` for a complex form, using integrability of `J`.
pub fn ce_partials(
    model: &LieAlgebraModel,
    a: &FrameForm<ComplexRational>,
    alpha: &FrameForm<Rational>,
) -> Result<(FrameForm<ComplexRational>, FrameForm<ComplexRational>)> {
    check_closed(model, alpha)?;
    let n = model.dim();
    let k = a.degree();
    if k >= n {
        return Ok((FrameForm::zero(n, n), FrameForm::zero(n, n)));
    }
    let frame = ComplexFrame::<ComplexRational>::new(model.j())?;
    let alpha_c = lift(alpha);
    let mut del = FrameForm::zero(n, k + 1);
    let mut delbar = FrameForm::zero(n, k + 1);
    for (p, part) in frame.split(a).into_iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let da = twisted(model, &part, &alpha_c);
        let pieces = frame.split(&da);
        del = del + pieces[p + 1].clone();
        delbar = delbar + pieces[p].clone();
    }
    Ok((del, delbar))
}

/// `d^c_α a = i(∂̄_α − ∂_α) a` through the type decomposition. Real on
/// real input.
pub fn ce_dc_alpha(
    model: &LieAlgebraModel,
    a: &FrameForm<Rational>,
    alpha: &FrameForm<Rational>,
) -> Result<FrameForm<Rational>> {
    let (del, delbar) = ce_partials(model, &a.complexify(), alpha)?;
    let i = ComplexRational::new(Rational::from_integer(0.into()), Rational::from_integer(1.into()));
    (delbar - del).scale(&i).into_real()
}

/// `d^c_α = J d_α J^{-1}`, with `J` acting on forms by `(J^{-1})^*`.
pub fn ce_dc_alpha_conjugated(
    model: &LieAlgebraModel,
    a: &FrameForm<Rational>,
    alpha: &FrameForm<Rational>,
) -> Result<FrameForm<Rational>> {
    let j = model.j();
    let inner = ce_d_alpha(model, &j.act_inverse(a), alpha)?;
    Ok(j.act(&inner))
}

/// Matrix of `d_α: Λ^k → Λ^{k+1}` on the increasing multi-index bases.
pub fn d_alpha_matrix(model: &LieAlgebraModel, k: usize, alpha: &FrameForm<Rational>) -> Result<Mat<Rational>> {
    check_closed(model, alpha)?;
    let n = model.dim();
    let rows = binomial(n, k + 1);
    let cols = binomial(n, k);
    let mut m = Mat::zeros(rows, cols);
    if k >= n {
        return Ok(m);
    }
    for (c, idx) in multi_indices(n, k).iter().enumerate() {
        let img = twisted(model, &FrameForm::basis(n, idx), alpha);
        for (r, v) in img.coeffs().iter().enumerate() {
            m[(r, c)] = v.clone();
        }
    }
    Ok(m)
}

/// Ranks of the invariant twisted complex in degree `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CohomologyRank {
    pub degree: usize,
    pub dim_kernel: usize,
    pub dim_image: usize,
    pub betti: usize,
}

/// Invariant (Chevalley–Eilenberg) twisted cohomology rank in degree `k`.
pub fn twisted_cohomology_rank(model: &LieAlgebraModel, k: usize, alpha: &FrameForm<Rational>) -> Result<CohomologyRank> {
    let n = model.dim();
    if k > n {
        return Err(Error::InvalidParameter(format!("degree {k} exceeds dimension {n}")));
    }
    let dim_kernel = binomial(n, k) - d_alpha_matrix(model, k, alpha)?.rank();
    let dim_image = if k == 0 { 0 } else { d_alpha_matrix(model, k - 1, alpha)?.rank() };
    Ok(CohomologyRank {
        degree: k,
        dim_kernel,
        dim_image,
        betti: dim_kernel - dim_image,
    })
}

/// Basis of `ker d_α` on `Λ^k`.
pub fn closed_forms(model: &LieAlgebraModel, k: usize, alpha: &FrameForm<Rational>) -> Result<Vec<FrameForm<Rational>>> {
    let n = model.dim();
    Ok(d_alpha_matrix(model, k, alpha)?
        .nullspace()
        .into_iter()
        .map(|v| FrameForm::from_coeffs(n, k, v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formcalc::scalar::rat;
    use proptest::prelude::*;

    fn e(idx: &[usize]) -> FrameForm<Rational> {
        FrameForm::basis(4, idx)
    }

    const Y: usize = 0;
    const Z: usize = 1;
    const T: usize = 2;
    const U: usize = 3;

    #[test]
    fn sol41_coframe_differentials() {
        let m = sol41();
        assert_eq!(ce_d(&m, &e(&[Y])), -e(&[Y, T]));
        assert_eq!(ce_d(&m, &e(&[Z])), -e(&[Y, U]));
        assert!(ce_d(&m, &e(&[T])).is_zero());
        assert_eq!(ce_d(&m, &e(&[U])), -e(&[T, U]));
        assert!(ce_d(&m, m.alpha0()).is_zero());
    }

    #[test]
    fn abelian_differential_vanishes() {
        let m = abelian4();
        for k in 0..=4 {
            for idx in multi_indices(4, k) {
                assert!(ce_d(&m, &e(&idx)).is_zero());
            }
        }
    }

    #[test]
    fn twisted_examples_on_sol41() {
        let m = sol41();
        let a0 = m.alpha0().clone();
        assert!(ce_d_alpha(&m, &e(&[Y, Z]), &a0).unwrap().is_zero());
        assert!(ce_d_alpha(&m, &e(&[T, U]), &a0).unwrap().is_zero());
        let one = FrameForm::scalar(4, rat(1, 1));
        assert_eq!(ce_d_alpha(&m, &one, &a0).unwrap(), -a0.clone());
    }

    #[test]
    fn non_closed_twist_is_rejected() {
        let m = sol41();
        assert!(matches!(ce_d_alpha(&m, &e(&[0, 1]), &e(&[Y])), Err(Error::NotClosed(_))));
    }

    #[test]
    fn d_squared_vanishes_on_every_basis_form() {
        for m in [sol41(), abelian4()] {
            let a0 = m.alpha0().clone();
            for k in 0..4 {
                for idx in multi_indices(4, k) {
                    let b = e(&idx);
                    assert!(ce_d(&m, &ce_d(&m, &b)).is_zero());
                    let once = ce_d_alpha(&m, &b, &a0).unwrap();
                    assert!(ce_d_alpha(&m, &once, &a0).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn abelian_betti_numbers() {
        let m = abelian4();
        let zero = FrameForm::zero(4, 1);
        let b: Vec<usize> = (0..=4).map(|k| twisted_cohomology_rank(&m, k, &zero).unwrap().betti).collect();
        assert_eq!(b, vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn sol41_twisted_ranks() {
        let m = sol41();
        let a0 = m.alpha0().clone();
        let r1 = twisted_cohomology_rank(&m, 1, &a0).unwrap();
        assert_eq!((r1.dim_kernel, r1.dim_image, r1.betti), (2, 1, 1));
        let r2 = twisted_cohomology_rank(&m, 2, &a0).unwrap();
        assert_eq!(r2.dim_kernel, 4);
        // The listed span lies in the kernel.
        for f in [e(&[Z, Y]), e(&[T, U]), e(&[Y, T]), e(&[Z, T]) - e(&[Y, U])] {
            assert!(ce_d_alpha(&m, &f, &a0).unwrap().is_zero());
        }
    }

    #[test]
    fn dc_routes_agree_on_basis_forms() {
        let m = sol41();
        let a0 = m.alpha0().clone();
        for k in 0..4 {
            for idx in multi_indices(4, k) {
                let b = e(&idx);
                let via_types = ce_dc_alpha(&m, &b, &a0).unwrap();
                let via_j = ce_dc_alpha_conjugated(&m, &b, &a0).unwrap();
                assert_eq!(via_types, via_j, "basis {idx:?}");
            }
        }
    }

    #[test]
    fn kahler_flat_dc_vanishes() {
        let m = abelian4();
        let f = e(&[0, 1]) + e(&[2, 3]);
        assert!(ce_dc_alpha(&m, &f, &FrameForm::zero(4, 1)).unwrap().is_zero());
    }

    #[test]
    fn ddc_is_2i_del_delbar() {
        let m = sol41();
        let a0 = m.alpha0().clone();
        for idx in multi_indices(4, 2) {
            let b = e(&idx);
            let lhs = ce_d_alpha(&m, &ce_dc_alpha(&m, &b, &a0).unwrap(), &a0).unwrap();
            let (_, delbar) = ce_partials(&m, &b.complexify(), &a0).unwrap();
            let (del_of_delbar, _) = ce_partials(&m, &delbar, &a0).unwrap();
            let two_i = ComplexRational::new(rat(0, 1), rat(2, 1));
            assert_eq!(lhs.complexify(), del_of_delbar.scale(&two_i));
        }
    }

    proptest! {
        #[test]
        fn betti_ranks_do_not_depend_on_basis_order(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
            let m = sol41();
            let p = m.permuted(&perm).unwrap();
            for k in 0..=4 {
                let a = twisted_cohomology_rank(&m, k, m.alpha0()).unwrap();
                let b = twisted_cohomology_rank(&p, k, p.alpha0()).unwrap();
                prop_assert_eq!(a.betti, b.betti);
                prop_assert_eq!(a.dim_kernel, b.dim_kernel);
            }
        }
    }
}
