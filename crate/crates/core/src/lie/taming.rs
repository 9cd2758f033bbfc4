//! Invariant taming forms, LCS completion and the twisted-Gauduchon identity
//! on the Lie backend.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ce_d, ce_d_alpha, ce_dc_alpha, ce_partials, closed_forms, LieAlgebraModel};
use crate::error::{Error, Result};
use crate::formcalc::form::multi_indices;
use crate::formcalc::linalg::Mat;
use crate::formcalc::scalar::{rationalize, ComplexRational, Rational, RealScalar, Scalar};
use crate::formcalc::taming::{taming_pairing, to_dmatrix};
use crate::formcalc::{metric_of_form, taming_check, ComplexFrame, FrameForm, MetricTensor};

/// Random directions sampled on the unit sphere of the closed subspace.
pub const TAMING_SAMPLES: usize = 10_000;
const SEARCH_SEED: u64 = 0x7a31_4e55;

#[derive(Clone, Debug, PartialEq)]
pub struct TamingSolve {
    pub k: f64,
    pub feasible: bool,
    /// Exact witness with `d_{kα₀} F₀ = 0` and positive taming pairing.
    pub witness: Option<FrameForm<Rational>>,
    /// Best minimum eigenvalue of the taming pairing found on the unit sphere
    /// of the closed subspace (or of the witness when feasible).
    pub min_eig: f64,
    pub kernel_dim: usize,
    /// Exact linear obstruction, when one was found.
    pub obstruction: Option<String>,
    /// True when the verdict rests on exact arithmetic (an exact positivity
    /// check of the witness, or an exact obstruction).
    pub certified: bool,
}

fn pairing_f64(model: &LieAlgebraModel, f: &FrameForm<f64>) -> DMatrix<f64> {
    let j = model.j().matrix().map(RealScalar::to_f64);
    let j = crate::formcalc::ComplexStructureJ::new(j).expect("J is valid");
    to_dmatrix(&taming_pairing(f, &j))
}

fn min_eig(model: &LieAlgebraModel, f: &FrameForm<f64>, g: &DMatrix<f64>) -> f64 {
    crate::formcalc::taming::min_relative_eigenvalue(&pairing_f64(model, f), g)
}

/// Exact positive-definiteness test (Sylvester's criterion).
pub(crate) fn is_positive_definite(m: &Mat<Rational>) -> bool {
    let n = m.rows();
    (1..=n).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        m.minor_matrix(&idx, &idx).det() > Rational::from_i64(0)
    })
}

fn combine<S: Scalar>(basis: &[FrameForm<S>], c: &[S]) -> FrameForm<S> {
    let mut out = FrameForm::zero(basis[0].dim(), basis[0].degree());
    for (b, x) in basis.iter().zip(c) {
        out = out + b.scale(x);
    }
    out
}

/// Searches `ker d_{kα₀}` on invariant 2-forms for a form taming `J`.
pub fn invariant_taming_solve(model: &LieAlgebraModel, k: f64) -> Result<TamingSolve> {
    let alpha = model.alpha0().scale(&Rational::from_f64(k));
    let kernel = closed_forms(model, 2, &alpha)?;
    Ok(search_positive(model, k, kernel))
}

/// Same search restricted to `J`-invariant (type `(1,1)`) closed forms, i.e.
/// invariant lcK forms with Lee form `kα₀`. For such forms the taming pairing
/// is the Hermitian metric itself.
pub fn invariant_lck_solve(model: &LieAlgebraModel, k: f64) -> Result<TamingSolve> {
    let alpha = model.alpha0().scale(&Rational::from_f64(k));
    let kernel = closed_forms(model, 2, &alpha)?;
    let basis = if kernel.is_empty() {
        kernel
    } else {
        let defects: Vec<FrameForm<Rational>> = kernel.iter().map(|f| &f.pullback(model.j().matrix()) - f).collect();
        let m = Mat::from_fn(defects[0].coeffs().len(), defects.len(), |r, c| defects[c].coeffs()[r].clone());
        m.nullspace().into_iter().map(|c| combine(&kernel, &c)).collect()
    };
    Ok(search_positive(model, k, basis))
}

fn search_positive(model: &LieAlgebraModel, k: f64, kernel: Vec<FrameForm<Rational>>) -> TamingSolve {
    let n = model.dim();
    let mut out = TamingSolve {
        k,
        feasible: false,
        witness: None,
        min_eig: f64::NEG_INFINITY,
        kernel_dim: kernel.len(),
        obstruction: None,
        certified: false,
    };
    if kernel.is_empty() {
        out.obstruction = Some("no nonzero candidate invariant 2-form in the closed subspace".into());
        out.certified = true;
        return out;
    }
    // Exact obstruction: a frame vector X with h_F(X, X) = 0 for every closed F.
    let pairings: Vec<Mat<Rational>> = kernel.iter().map(|f| taming_pairing(f, model.j())).collect();
    for x in 0..n {
        if pairings.iter().all(|h| h[(x, x)] == Rational::from_i64(0)) {
            out.obstruction = Some(format!(
                "h_F({0}, {0}) = F({0}, J{0}) vanishes on every d_α-closed invariant 2-form",
                model.basis_names()[x]
            ));
            out.certified = true;
        }
    }

    let g = to_dmatrix(model.metric().gram());
    let basis_f: Vec<FrameForm<f64>> = kernel.iter().map(FrameForm::to_f64).collect();
    let eval = |c: &[f64]| min_eig(model, &combine(&basis_f, c), &g);
    let d = kernel.len();
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let mut best_c = vec![0.0; d];
    let mut best = f64::NEG_INFINITY;
    for _ in 0..TAMING_SAMPLES {
        let mut c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalize(&mut c);
        let v = eval(&c);
        if v > best {
            best = v;
            best_c = c;
        }
    }
    // Coordinate ascent on the sphere with a shrinking step.
    let mut step = 0.1;
    while step > 1e-7 {
        let mut improved = false;
        for i in 0..d {
            for s in [step, -step] {
                let mut c = best_c.clone();
                c[i] += s;
                normalize(&mut c);
                let v = eval(&c);
                if v > best {
                    best = v;
                    best_c = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    out.min_eig = best;
    if out.obstruction.is_some() {
        return out;
    }
    if best > 0.0 {
        // Round to a rational witness and certify it exactly.
        let scale = best_c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for max_den in [16, 256, 4096, 1 << 20] {
            let c: Vec<Rational> = best_c.iter().map(|x| rationalize(x / scale, max_den)).collect();
            let f = combine(&kernel, &c);
            if is_positive_definite(&taming_pairing(&f, model.j())) {
                out.min_eig = taming_check(&f, model.j(), model.metric()).min_eigenvalue;
                out.witness = Some(f);
                out.feasible = true;
                out.certified = true;
                return out;
            }
        }
    }
    if best < -1e-6 {
        out.certified = false;
    }
    out
}

fn normalize(c: &mut [f64]) {
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        c.iter_mut().for_each(|x| *x /= n);
    }
}

/// `ω = F + β + β̄` with `d_α ω = 0` and `ω^{1,1} = F`.
#[derive(Clone, Debug, PartialEq)]
pub struct LcsCompletion {
    pub omega: FrameForm<Rational>,
    pub beta: FrameForm<ComplexRational>,
    /// `d_α ω`, exactly zero on success.
    pub d_alpha_omega: FrameForm<Rational>,
}

/// Basis of the invariant `(p, k−p)` forms.
fn type_basis(frame: &ComplexFrame<ComplexRational>, n: usize, k: usize, p: usize) -> Vec<FrameForm<ComplexRational>> {
    let candidates: Vec<FrameForm<ComplexRational>> = multi_indices(n, k)
        .iter()
        .map(|idx| frame.part(&FrameForm::<Rational>::basis(n, idx).complexify(), p))
        .collect();
    let m = Mat::from_fn(candidates[0].coeffs().len(), candidates.len(), |r, c| {
        candidates[c].coeffs()[r].clone()
    });
    let (_, pivots) = m.rref();
    pivots.into_iter().map(|c| candidates[c].clone()).collect()
}

/// Solves `∂_α F + ∂̄_α β = 0` for `β ∈ Λ^{2,0}` and returns the completed
/// LCS form.
pub fn complete_to_lcs(
    model: &LieAlgebraModel,
    f: &FrameForm<Rational>,
    alpha: &FrameForm<Rational>,
) -> Result<LcsCompletion> {
    let n = model.dim();
    let frame = ComplexFrame::<ComplexRational>::new(model.j())?;
    let fc = f.complexify();
    let parts = frame.split(&fc);
    if !parts[0].is_zero() || !parts[2].is_zero() {
        return Err(Error::InvalidParameter("input form is not of type (1,1)".into()));
    }
    let (del_f, _) = ce_partials(model, &fc, alpha)?;
    let basis = type_basis(&frame, n, 2, 2);
    let images: Vec<FrameForm<ComplexRational>> = basis
        .iter()
        .map(|b| ce_partials(model, b, alpha).map(|(_, db)| db))
        .collect::<Result<_>>()?;
    let rows = del_f.coeffs().len();
    let m = Mat::from_fn(rows, basis.len(), |r, c| images[c].coeffs()[r].clone());
    let rhs: Vec<ComplexRational> = del_f.coeffs().iter().map(|x| -x.clone()).collect();
    let x = m.solve(&rhs).ok_or_else(|| {
        Error::Unsolvable(format!(
            "∂_α F = {:?} is not ∂̄_α-exact on invariant (2,0)-forms: nonzero invariant H^{{2,1}} class",
            del_f.coeffs()
        ))
    })?;
    let beta = combine(&basis, &x);
    let omega = (&fc + &beta + beta.conj()).into_real()?;
    let d_alpha_omega = ce_d_alpha(model, &omega, alpha)?;
    Ok(LcsCompletion {
        omega,
        beta,
        d_alpha_omega,
    })
}

/// Lee form `θ` with `dF = θ∧F`; exact.
pub fn lee_form(model: &LieAlgebraModel, f: &FrameForm<Rational>) -> Result<FrameForm<Rational>> {
    let n = model.dim();
    let df = ce_d(model, f);
    let cols: Vec<FrameForm<Rational>> = (0..n)
        .map(|i| FrameForm::<Rational>::basis(n, &[i]).wedge(f))
        .collect::<Result<_>>()?;
    let m = Mat::from_fn(df.coeffs().len(), n, |r, c| cols[c].coeffs()[r].clone());
    let theta = m.solve(df.coeffs()).ok_or(Error::NoLeeForm)?;
    Ok(FrameForm::one_form(theta))
}

/// Codifferential of an invariant 1-form: `δβ = −div β^♯`, with the
/// divergence computed from `d ι_X vol`.
pub fn codifferential(model: &LieAlgebraModel, metric: &MetricTensor<Rational>, beta: &FrameForm<Rational>) -> Rational {
    let n = model.dim();
    let x = metric.sharp(beta);
    let vol: FrameForm<Rational> = crate::formcalc::form::top_basis(n);
    let div = ce_d(model, &vol.interior(&x));
    -div.coeffs()[0].clone()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GauduchonCheck {
    /// Coefficient of `d_α d^c_α F` on `e^{1234}`.
    pub lhs: String,
    /// `−(δ(θ−α) + g(θ−α, α))`.
    pub rhs_scalar: String,
    /// Coefficient of `v_g = F²/2` on `e^{1234}`.
    pub volume: String,
    pub lhs_f64: f64,
    pub rhs_f64: f64,
    pub residual: f64,
    pub exact_zero: bool,
}

/// Evaluates `d_α d^c_α F + (δ(θ−α) + g(θ−α, α)) v_g` exactly, with `g` the
/// Hermitian metric of `F` and `v_g = F²/2`.
pub fn twisted_gauduchon_check(
    model: &LieAlgebraModel,
    f: &FrameForm<Rational>,
    alpha: &FrameForm<Rational>,
) -> Result<GauduchonCheck> {
    if model.dim() != 4 {
        return Err(Error::InvalidParameter("the identity is checked on surfaces (dim 4)".into()));
    }
    let g = metric_of_form(f, model.j())?;
    let theta = lee_form(model, f)?;
    let lhs = ce_d_alpha(model, &ce_dc_alpha(model, f, alpha)?, alpha)?;
    let diff = &theta - alpha;
    let inner = g.inner(&diff, alpha);
    let rhs = -(codifferential(model, &g, &diff) + inner);
    let vol = f.wedge(f)?.scale(&Rational::half());
    let residual_form = &lhs - &vol.scale(&rhs);
    let lhs_c = lhs.coeffs()[0].clone();
    let vol_c = vol.coeffs()[0].clone();
    Ok(GauduchonCheck {
        lhs_f64: lhs_c.to_f64(),
        rhs_f64: (rhs.clone() * vol_c.clone()).to_f64(),
        lhs: lhs_c.to_string(),
        rhs_scalar: rhs.to_string(),
        volume: vol_c.to_string(),
        residual: residual_form.max_abs(),
        exact_zero: residual_form.is_zero(),
    })
}

/// Random change of the reference invariant metric, seeded.
pub fn sample_metric_perturbation(model: &LieAlgebraModel, seed: u64) -> Result<LieAlgebraModel> {
    // g_s = Pᵀ g P; P commutes with J, so a Hermitian g stays Hermitian.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = model.dim();
    let j = model.j().matrix();
    let a = Mat::from_fn(n, n, |_, _| rationalize(rng.gen_range(-0.3..0.3), 20));
    // P = I + ½(A − J A J) commutes with J.
    let ja = j.mul(&a).mul(j);
    let p = Mat::from_fn(n, n, |r, c| {
        let id = if r == c { Rational::from_i64(1) } else { Rational::from_i64(0) };
        id + (a[(r, c)].clone() - ja[(r, c)].clone()) * Rational::half()
    });
    let gram = p.transpose().mul(model.metric().gram()).mul(&p);
    model.with_metric(gram)
}
