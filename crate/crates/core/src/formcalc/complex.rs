//! Type decomposition of complexified forms.
//!
//! A complex coframe `(ζ¹…ζᵐ, ζ̄¹…ζ̄ᵐ)` adapted to `J` is chosen from the
//! columns of the `(1,0)` projector `½(1 − iJᵀ)`, which keeps everything
//! rational when `J` is. A form is rewritten in that coframe, its terms are
//! sorted by the number of holomorphic factors, and each group is rewritten
//! back in the real frame.

use super::form::{multi_indices, FrameForm};
use super::linalg::Mat;
use super::metric::ComplexStructureJ;
use super::scalar::{ComplexScalar, RealScalar, Scalar};
use crate::error::{Error, Result};

/// Change of coframe between the real frame and a `J`-adapted complex one.
#[derive(Clone, Debug)]
pub struct ComplexFrame<C> {
    m: usize,
    /// Pulling back by `to_adapted` yields coefficients in the adapted coframe.
    to_adapted: Mat<C>,
    to_real: Mat<C>,
}

impl<C: ComplexScalar> ComplexFrame<C> {
    pub fn new(j: &ComplexStructureJ<C::Real>) -> Result<Self> {
        let n = j.dim();
        let m = n / 2;
        let jt = j.matrix().transpose();
        let half = C::half();
        let i = C::i();
        let p10 = Mat::from_fn(n, n, |r, c| {
            let id = if r == c { C::one() } else { C::zero() };
            half.clone() * (id - i.clone() * C::from_real(jt[(r, c)].clone()))
        });
        let (_, pivots) = p10.rref();
        if pivots.len() != m {
            return Err(Error::NotComplexStructure);
        }
        // Rows of `b` are the coframe vectors ζ^a (components on e^i), then ζ̄^a.
        let mut rows: Vec<Vec<C>> = pivots.iter().map(|&c| p10.column(c)).collect();
        let conj: Vec<Vec<C>> = rows
            .iter()
            .map(|r| r.iter().map(ComplexScalar::conj).collect())
            .collect();
        rows.extend(conj);
        let b = Mat::from_rows(rows);
        let v = b.inverse().ok_or(Error::NotComplexStructure)?;
        // A form with real-frame coefficients a_I equals Σ c_R θ^R where
        // c_R = a(v_R); pulling back by V computes exactly that.
        Ok(Self {
            m,
            to_adapted: v,
            to_real: b,
        })
    }

    pub fn half_dim(&self) -> usize {
        self.m
    }

    /// Components `p = 0..=k` of a complex `k`-form, indexed by the holomorphic
    /// degree `p`; their sum is the input.
    pub fn split(&self, a: &FrameForm<C>) -> Vec<FrameForm<C>> {
        let n = a.dim();
        let k = a.degree();
        let adapted = a.pullback(&self.to_adapted);
        let idx = multi_indices(n, k);
        (0..=k)
            .map(|p| {
                let mut part = adapted.clone();
                for (r, multi) in idx.iter().enumerate() {
                    let holo = multi.iter().filter(|&&i| i < self.m).count();
                    if holo != p {
                        part.coeffs_mut()[r] = C::zero();
                    }
                }
                part.pullback(&self.to_real)
            })
            .collect()
    }

    /// The `(p, k−p)` part of `a`.
    pub fn part(&self, a: &FrameForm<C>, p: usize) -> FrameForm<C> {
        if p > a.degree() {
            return FrameForm::zero(a.dim(), a.degree());
        }
        self.split(a).swap_remove(p)
    }
}

/// `(2,0) + (1,1) + (0,2)` decomposition of a 2-form.
#[derive(Clone, Debug, PartialEq)]
pub struct BidegreeSplit<C> {
    pub p20: FrameForm<C>,
    pub p11: FrameForm<C>,
    pub p02: FrameForm<C>,
}

impl<C: Scalar> BidegreeSplit<C> {
    pub fn recombine(&self) -> FrameForm<C> {
        &(&self.p20 + &self.p11) + &self.p02
    }
}

pub fn bidegree_project<R>(a: &FrameForm<R>, j: &ComplexStructureJ<R>) -> Result<BidegreeSplit<R::Complex>>
where
    R: RealScalar,
{
    bidegree_project_complex(&a.complexify(), j)
}

pub fn bidegree_project_complex<C: ComplexScalar>(
    a: &FrameForm<C>,
    j: &ComplexStructureJ<C::Real>,
) -> Result<BidegreeSplit<C>> {
    if a.degree() != 2 {
        return Err(Error::InvalidParameter(format!(
            "bidegree split of a {}-form; use ComplexFrame::split",
            a.degree()
        )));
    }
    if a.dim() != j.dim() {
        return Err(Error::DimensionMismatch(a.dim(), j.dim()));
    }
    let frame = ComplexFrame::new(j)?;
    let mut parts = frame.split(a);
    let p02 = parts.remove(0);
    let p11 = parts.remove(0);
    let p20 = parts.remove(0);
    Ok(BidegreeSplit { p20, p11, p02 })
}

/// `a(J·, J·)` for a 2-form.
pub fn j_conjugate<S: Scalar>(a: &FrameForm<S>, j: &ComplexStructureJ<S>) -> FrameForm<S> {
    a.pullback(j.matrix())
}
