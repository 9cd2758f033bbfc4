use std::ops::{Add, Mul, Neg, Sub};



use super::linalg::Mat;
use super::scalar::{ComplexScalar, RealScalar, Scalar};
use crate::error::{Error, Result};

/// Increasing multi-indices of length `k` in `0..n`, lexicographic order.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Position of an increasing multi-index in [`multi_indices`] order.
pub fn multi_index_rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &c) in idx.iter().enumerate() {
        for j in prev..c {
            rank += binomial(n - 1 - j, k - 1 - i);
        }
        prev = c + 1;
    }
    rank
}

/// Sorts an index list, returning the sorted list and the permutation sign,
/// or `None` when an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// A degree-`k` form over a frame of an `n`-dimensional space, stored by its
/// components on increasing multi-indices: `a = Σ_I a_I e^I`, with
/// `e^{i1}∧…∧e^{ik}(e_{i1},…,e_{ik}) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameForm<S> {
    dim: usize,
    degree: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> FrameForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(degree <= dim, "degree {degree} exceeds dimension {dim}");
        Self {
            dim,
            degree,
            coeffs: vec![S::zero(); binomial(dim, degree)],
        }
    }

    pub fn scalar(dim: usize, value: S) -> Self {
        Self {
            dim,
            degree: 0,
            coeffs: vec![value],
        }
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), binomial(dim, degree), "coefficient count");
        Self { dim, degree, coeffs }
    }

    /// `e^{i1} ∧ … ∧ e^{ik}` for an arbitrary (not necessarily sorted) index
    /// list; zero when an index repeats.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut f = Self::zero(dim, idx.len());
        if let Some((sorted, sign)) = sort_with_sign(idx) {
            f.coeffs[multi_index_rank(dim, &sorted)] = S::from_i64(sign as i64);
        }
        f
    }

    pub fn one_form(coeffs: Vec<S>) -> Self {
        let dim = coeffs.len();
        Self::from_coeffs(dim, 1, coeffs)
    }

    /// Builds a 2-form from an antisymmetric matrix `A_ij = a(e_i, e_j)`.
    pub fn from_antisymmetric(m: &Mat<S>) -> Self {
        let n = m.rows();
        let mut f = Self::zero(n, 2);
        for (r, idx) in multi_indices(n, 2).iter().enumerate() {
            f.coeffs[r] = m[(idx[0], idx[1])].clone();
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Component on an arbitrary index list, with the antisymmetry sign.
    pub fn component(&self, idx: &[usize]) -> S {
        assert_eq!(idx.len(), self.degree);
        match sort_with_sign(idx) {
            Some((sorted, sign)) => {
                let c = self.coeffs[multi_index_rank(self.dim, &sorted)].clone();
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
            None => S::zero(),
        }
    }

    /// Sets the component on a sorted index list.
    pub fn set_component(&mut self, idx: &[usize], value: S) {
        let (sorted, sign) = sort_with_sign(idx).expect("repeated index");
        let r = multi_index_rank(self.dim, &sorted);
        self.coeffs[r] = if sign < 0 { -value } else { value };
    }

    /// Antisymmetric matrix `a(e_i, e_j)` of a 2-form.
    pub fn to_antisymmetric(&self) -> Mat<S> {
        assert_eq!(self.degree, 2, "matrix form requires a 2-form");
        Mat::from_fn(self.dim, self.dim, |i, j| self.component(&[i, j]))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_negligible)
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FrameForm<T> {
        FrameForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }

    /// Orthonormal-frame norm: `sqrt(Σ_I |a_I|²)`.
    pub fn frame_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Graded exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let k = self.degree + other.degree;
        if k > self.dim {
            return Err(Error::DegreeOverflow {
                left: self.degree,
                right: other.degree,
                dim: self.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zero(n, k);
        let left = multi_indices(n, self.degree);
        let right = multi_indices(n, other.degree);
        for (i, a) in left.iter().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for (j, b) in right.iter().enumerate() {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let joined: Vec<usize> = a.iter().chain(b).copied().collect();
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    let r = multi_index_rank(n, &sorted);
                    let term = self.coeffs[i].clone() * other.coeffs[j].clone();
                    out.coeffs[r] = if sign < 0 {
                        out.coeffs[r].clone() - term
                    } else {
                        out.coeffs[r].clone() + term
                    };
                }
            }
        }
        Ok(out)
    }

    /// Evaluates the form on `k` vectors given by frame components.
    pub fn eval(&self, vectors: &[Vec<S>]) -> S {
        assert_eq!(vectors.len(), self.degree, "wrong number of arguments");
        if self.degree == 0 {
            return self.coeffs[0].clone();
        }
        let v = Mat::from_fn(self.dim, self.degree, |i, j| vectors[j][i].clone());
        multi_indices(self.dim, self.degree)
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .fold(S::zero(), |acc, (idx, c)| {
                let rows: Vec<usize> = (0..self.degree).collect();
                acc + c.clone() * v.minor_matrix(idx, &rows).det()
            })
    }

    /// Pullback by a linear map of the frame: `(A^*a)(X,…) = a(AX,…)`, where
    /// `A e_j = Σ_i A_ij e_i`.
    pub fn pullback(&self, a: &Mat<S>) -> Self {
        assert_eq!(a.rows(), self.dim);
        assert_eq!(a.cols(), self.dim);
        let idx = multi_indices(self.dim, self.degree);
        let mut out = Self::zero(self.dim, self.degree);
        if self.degree == 0 {
            out.coeffs[0] = self.coeffs[0].clone();
            return out;
        }
        for (r, target) in idx.iter().enumerate() {
            let mut acc = S::zero();
            for (j, source) in idx.iter().enumerate() {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc + self.coeffs[j].clone() * a.minor_matrix(source, target).det();
            }
            out.coeffs[r] = acc;
        }
        out
    }

    /// Interior product `ι_X a`.
    pub fn interior(&self, x: &[S]) -> Self {
        assert!(self.degree > 0, "interior product of a function");
        let n = self.dim;
        let mut out = Self::zero(n, self.degree - 1);
        for (r, idx) in multi_indices(n, self.degree - 1).iter().enumerate() {
            let mut acc = S::zero();
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                let mut full = vec![i];
                full.extend_from_slice(idx);
                acc = acc + xi.clone() * self.component(&full);
            }
            out.coeffs[r] = acc;
        }
        out
    }
}

impl<S: RealScalar> FrameForm<S> {
    pub fn complexify(&self) -> FrameForm<S::Complex> {
        self.map(RealScalar::complexify)
    }

    pub fn to_f64(&self) -> FrameForm<f64> {
        self.map(RealScalar::to_f64)
    }
}

impl<C: ComplexScalar> FrameForm<C> {
    pub fn conj(&self) -> Self {
        self.map(ComplexScalar::conj)
    }

    pub fn re(&self) -> FrameForm<C::Real> {
        self.map(ComplexScalar::re)
    }

    pub fn im(&self) -> FrameForm<C::Real> {
        self.map(ComplexScalar::im)
    }

    /// Real part, failing when the imaginary part is not negligible.
    pub fn into_real(&self) -> Result<FrameForm<C::Real>> {
        if !self.im().is_zero() {
            return Err(Error::NotReal(self.im().max_abs()));
        }
        Ok(self.re())
    }
}

/// `da = Σ_l e^l ∧ ∂_l a` from the partial derivatives of the components.
pub fn exterior_derivative_from_partials<S: Scalar>(partials: &[FrameForm<S>]) -> FrameForm<S> {
    let n = partials.len();
    let k = partials[0].degree();
    let mut out = FrameForm::zero(n, k + 1);
    for (l, p) in partials.iter().enumerate() {
        let el = FrameForm::basis(n, &[l]);
        out = out + el.wedge(p).expect("degree within bounds");
    }
    out
}

impl<S: Scalar> Add for FrameForm<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<S: Scalar> Add for &FrameForm<S> {
    type Output = FrameForm<S>;

    fn add(self, rhs: Self) -> FrameForm<S> {
        assert_eq!((self.dim, self.degree), (rhs.dim, rhs.degree), "form shape");
        FrameForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for FrameForm<S> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<S: Scalar> Sub for &FrameForm<S> {
    type Output = FrameForm<S>;

    fn sub(self, rhs: Self) -> FrameForm<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Neg for FrameForm<S> {
    type Output = Self;

    fn neg(self) -> Self {
        -&self
    }
}

impl<S: Scalar> Neg for &FrameForm<S> {
    type Output = FrameForm<S>;

    fn neg(self) -> FrameForm<S> {
        self.map(|c| -c.clone())
    }
}

impl<S: Scalar> Mul<S> for FrameForm<S> {
    type Output = Self;

    fn mul(self, rhs: S) -> Self {
        self.scale(&rhs)
    }
}

/// Constant function `1` in dimension `n`.
pub fn unit<S: Scalar>(n: usize) -> FrameForm<S> {
    FrameForm::scalar(n, S::one())
}

/// Volume form `e^1 ∧ … ∧ e^n`.
pub fn top_basis<S: Scalar>(n: usize) -> FrameForm<S> {
    let idx: Vec<usize> = (0..n).collect();
    FrameForm::basis(n, &idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::formcalc::scalar::{rat, Rational};
    use proptest::prelude::*;

    fn e(n: usize, idx: &[usize]) -> FrameForm<Rational> {
        FrameForm::basis(n, idx)
    }

    #[test]
    fn ranks_follow_lexicographic_order() {
        for n in 1..=6 {
            for k in 0..=n {
                for (r, idx) in multi_indices(n, k).iter().enumerate() {
                    assert_eq!(multi_index_rank(n, idx), r);
                }
            }
        }
    }

    #[test]
    fn wedge_of_a_covector_with_itself_vanishes() {
        assert!(e(4, &[0]).wedge(&e(4, &[0])).unwrap().is_zero());
    }

    #[test]
    fn wedge_of_two_basis_covectors() {
        let w = e(4, &[0]).wedge(&e(4, &[1])).unwrap();
        assert_eq!(w.component(&[0, 1]), rat(1, 1));
        assert_eq!(w.component(&[1, 0]), rat(-1, 1));
        assert_eq!(w.coeffs().iter().filter(|c| !c.is_zero()).count(), 1);
    }

    #[test]
    fn wedge_expands_bilinearly() {
        // (e1+e2) ∧ (e3∧e4) = e1∧e3∧e4 + e2∧e3∧e4, expanded by hand.
        let a = e(4, &[0]) + e(4, &[1]);
        let b = e(4, &[2, 3]);
        let expected = e(4, &[0, 2, 3]) + e(4, &[1, 2, 3]);
        assert_eq!(a.wedge(&b).unwrap(), expected);
    }

    #[test]
    fn wedge_degree_overflow_is_an_error() {
        let r = e(4, &[0, 1, 2]).wedge(&e(4, &[0, 3]));
        assert!(matches!(r, Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn evaluation_matches_components() {
        let f = e(4, &[0, 2]) * rat(3, 1);
        let x = vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        let y = vec![rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1)];
        assert_eq!(f.eval(&[x.clone(), y.clone()]), rat(3, 1));
        assert_eq!(f.eval(&[y, x]), rat(-3, 1));
    }

    #[test]
    fn pullback_agrees_with_evaluation() {
        let a = Mat::from_rows(vec![
            vec![rat(1, 1), rat(2, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(-1, 1)],
            vec![rat(3, 1), rat(0, 1), rat(1, 2)],
        ]);
        let f = e(3, &[0, 1]) + e(3, &[1, 2]) * rat(5, 1);
        let pulled = f.pullback(&a);
        for i in 0..3 {
            for j in 0..3 {
                let ai = a.column(i);
                let aj = a.column(j);
                assert_eq!(pulled.component(&[i, j]), f.eval(&[ai, aj]));
            }
        }
    }

    #[test]
    fn interior_product_of_basis() {
        let f = e(4, &[0, 1]);
        let x = vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        assert_eq!(f.interior(&x), e(4, &[1]));
    }

    fn arb_form(n: usize, k: usize) -> impl Strategy<Value = FrameForm<Rational>> {
        prop::collection::vec(-5i64..=5, binomial(n, k))
            .prop_map(move |v| FrameForm::from_coeffs(n, k, v.into_iter().map(|x| rat(x, 1)).collect()))
    }

    proptest! {
        #[test]
        fn wedge_is_associative_and_graded_commutative(
            (a, b, c) in (0usize..=2, 0usize..=1, 0usize..=1).prop_flat_map(|(ka, kb, kc)| {
                (arb_form(5, ka), arb_form(5, kb), arb_form(5, kc))
            })
        ) {
            let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let sign = if (a.degree() * b.degree()) % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
            prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap() * sign);
        }

        #[test]
        fn float_wedge_is_associative(
            a in prop::collection::vec(-1.0f64..1.0, 4),
            b in prop::collection::vec(-1.0f64..1.0, 6),
            c in prop::collection::vec(-1.0f64..1.0, 4),
        ) {
            let a = FrameForm::from_coeffs(4, 1, a);
            let b = FrameForm::from_coeffs(4, 2, b);
            let c = FrameForm::from_coeffs(4, 1, c);
            let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            let scale = l.max_abs().max(1.0);
            prop_assert!((l - r).max_abs() <= 1e-13 * scale);
        }
    }
}
