//! Principal eigenpairs, spectra, bounds and analytic families.

use nalgebra::linalg::Schur;
use serde::Serialize;

use super::sparse::{dot, norm, SparseOperator};
use super::EllipticSpec;
use crate::error::{Error, Result};
use crate::mesh::{GridForm, ScalarField};

/// Cap on outer power iterations.
pub const MAX_POWER_ITER: usize = 5000;
/// Largest grid for which the dense spectrum is computed.
pub const DENSE_LIMIT: usize = 4096;
const SOLVE_TOL: f64 = 1e-14;
const SOLVE_MAX_ITER: usize = 10_000;
const SCHUR_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalEigenpair {
    pub lambda0: f64,
    /// Positive, normalized by `∫u₀² v_g = 1`.
    pub u0: ScalarField,
    /// `‖L_h u₀ − λ₀u₀‖ / ‖u₀‖`.
    pub residual: f64,
    pub iterations: usize,
}

struct PowerResult {
    lambda: f64,
    vector: Vec<f64>,
    residual: f64,
    iterations: usize,
}

/// Power iteration on `(op + sI)^{-1}`, each step a Krylov solve. Inner
/// solves are warm-started at `u/(λ + s)` and their tolerance tracks the
/// current eigen-residual (never looser than `1e-6`, never below
/// `SOLVE_TOL`), which keeps the outer iteration exact at convergence.
fn power_iterate(op: &SparseOperator, s: f64, tol: f64, start: Option<&[f64]>) -> Result<PowerResult> {
    let n = op.dim();
    let shifted = op.shifted(s);
    let mut u: Vec<f64> = match start {
        Some(v) if v.len() == n && norm(v) > 0.0 => {
            let nv = norm(v);
            v.iter().map(|x| x / nv).collect()
        }
        _ => vec![1.0 / (n as f64).sqrt(); n],
    };
    let mut lambda = dot(&u, &op.matvec(&u));
    let mut last = f64::INFINITY;
    for it in 1..=MAX_POWER_ITER {
        let inner_tol = (1e-3 * last).clamp(SOLVE_TOL, 1e-6);
        let guess: Vec<f64> = u.iter().map(|x| x / (lambda + s)).collect();
        let y = shifted.solve(&u, Some(&guess), inner_tol, SOLVE_MAX_ITER)?;
        let ny = norm(&y);
        if !ny.is_finite() || ny == 0.0 {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: f64::NAN,
            });
        }
        let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        u = y.iter().map(|v| sign * v / ny).collect();
        let lu = op.matvec(&u);
        lambda = dot(&u, &lu);
        let r: Vec<f64> = lu.iter().zip(&u).map(|(a, b)| a - lambda * b).collect();
        last = norm(&r);
        if last < tol && inner_tol <= 1e-3 * tol.max(SOLVE_TOL * 1e3) {
            return Ok(PowerResult {
                lambda,
                vector: u,
                residual: last,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_POWER_ITER,
        residual: last,
    })
}

/// Principal eigenpair of `L_h` by power iteration on `(L_h + sI)^{-1}`.
pub fn principal_eigenpair(spec: &EllipticSpec, tol: f64) -> Result<PrincipalEigenpair> {
    let op = spec.assemble();
    let pr = power_iterate(&op, spec.shift(), tol, None)?;
    let min = pr.vector.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        // Cannot happen for the upwind M-matrix; the centered variant may lose it.
        return Err(Error::NotPositive(min));
    }
    let grid = spec.metric.grid();
    let u = GridForm::from_components(grid, 0, vec![pr.vector])?;
    let scale = spec.metric.integrate(&u.zip_with(&u, |a, b| a * b)).sqrt();
    Ok(PrincipalEigenpair {
        lambda0: pr.lambda,
        u0: u.scale(1.0 / scale),
        residual: pr.residual,
        iterations: pr.iterations,
    })
}

/// Principal eigenpair of the transposed matrix (the discrete adjoint),
/// eigenvector positive and of unit Euclidean norm.
pub fn left_eigenpair(spec: &EllipticSpec, tol: f64) -> Result<(f64, Vec<f64>)> {
    let pr = power_iterate(&spec.assemble().transpose(), spec.shift(), tol, None)?;
    Ok((pr.lambda, pr.vector))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// `(re, im)` sorted by real part, then imaginary part.
    pub eigenvalues: Vec<(f64, f64)>,
    pub lambda0: f64,
    /// Imaginary part of the principal eigenvalue.
    pub lambda0_imag: f64,
    /// `min Re(λ) − λ₀` over the non-principal eigenvalues.
    pub gap: f64,
}

pub fn spectrum_dense(spec: &EllipticSpec) -> Result<SpectrumReport> {
    let n = spec.len();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let dense = spec.assemble().to_dense();
    // `Matrix::complex_eigenvalues` runs an uncapped QR sweep that can cycle
    // on these operators; the capped Schur decomposition does not.
    // Deflation at exactly machine epsilon can stall; relax it a little.
    let schur = [4.0, 64.0]
        .iter()
        .find_map(|k| Schur::try_new(dense.clone(), k * f64::EPSILON, SCHUR_MAX_ITER))
        .ok_or(Error::NoConvergence {
            iterations: SCHUR_MAX_ITER,
            residual: f64::NAN,
        })?;
    let mut eig: Vec<(f64, f64)> = schur.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
    eig.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // The principal eigenvalue is the one of least real part; among
    // near-ties prefer the one closest to the real axis.
    let min_re = eig[0].0;
    let p = (0..eig.len())
        .filter(|&i| eig[i].0 - min_re <= 1e-12 * (1.0 + min_re.abs()))
        .min_by(|&a, &b| eig[a].1.abs().total_cmp(&eig[b].1.abs()))
        .expect("nonempty spectrum");
    let (lambda0, lambda0_imag) = eig[p];
    let gap = eig
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != p)
        .map(|(_, e)| e.0 - lambda0)
        .fold(f64::INFINITY, f64::min);
    Ok(SpectrumReport {
        eigenvalues: eig,
        lambda0,
        lambda0_imag,
        gap,
    })
}

/// Ratio of the second to the first eigenvalue modulus of `(L_h + sI)^{-1}`,
/// measured by power iteration deflated against the principal eigenpair.
pub fn inverse_iteration_ratio(spec: &EllipticSpec, steps: usize) -> Result<f64> {
    let op = spec.assemble();
    let s = spec.shift();
    let shifted = op.shifted(s);
    let right = power_iterate(&op, s, 1e-11, None)?;
    let (_, left) = left_eigenpair(spec, 1e-11)?;
    let lu = dot(&left, &right.vector);
    let deflate = |w: &mut Vec<f64>| {
        let c = dot(&left, w) / lu;
        w.iter_mut().zip(&right.vector).for_each(|(a, b)| *a -= c * b);
    };
    let n = op.dim();
    let mut w: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64 / 101.0 - 0.5).collect();
    deflate(&mut w);
    let mut log_growth = 0.0;
    let burn_in = steps / 2;
    for k in 0..steps {
        let mut y = shifted.solve(&w, None, SOLVE_TOL, SOLVE_MAX_ITER)?;
        deflate(&mut y);
        let ny = norm(&y) / norm(&w);
        if k >= burn_in {
            log_growth += ny.ln();
        }
        let nn = norm(&y);
        w = y.iter().map(|v| v / nn).collect();
    }
    let second = (log_growth / (steps - burn_in) as f64).exp();
    let first = 1.0 / (right.lambda + s);
    Ok(second / first)
}

/// `(min L_h u / u, max L_h u / u)`; brackets `λ₀` for every positive `u`.
pub fn variational_bounds(spec: &EllipticSpec, u: &ScalarField) -> Result<(f64, f64)> {
    let min = u.min_value();
    if min <= 0.0 {
        return Err(Error::NotPositive(min));
    }
    let q = spec.apply(u).zip_with(u, |a, b| a / b);
    Ok((q.min_value(), q.max_value()))
}

/// Independent discretization of the formal adjoint
/// `L*(u) = Δu − g(α, du) + (δα + c)u`.
pub fn adjoint_spec(spec: &EllipticSpec) -> EllipticSpec {
    let div = spec.metric.codifferential(&spec.drift);
    EllipticSpec {
        metric: spec.metric.clone(),
        drift: -&spec.drift,
        potential: &spec.potential + &div,
        scheme: spec.scheme,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenDerivative {
    pub t0: f64,
    pub lambda0: f64,
    /// `⟨(∂_t L)u₀, u₀*⟩ / ⟨u₀, u₀*⟩` with the discrete adjoint eigenvector.
    pub value: f64,
    /// Central difference of `λ₀(t)`.
    pub finite_difference: f64,
    pub step: f64,
}

/// `λ₀'(t₀)` by first-order perturbation, cross-checked by a central
/// finite difference with step `1e-3`.
pub fn eigen_derivative<F>(family: F, t0: f64, tol: f64) -> Result<EigenDerivative>
where
    F: Fn(f64) -> Result<EllipticSpec>,
{
    let spec = family(t0)?;
    let pair = principal_eigenpair(&spec, tol)?;
    let (_, left) = left_eigenpair(&spec, tol)?;
    let u = pair.u0.values();
    let pairing = dot(&left, u);
    if pairing <= 0.0 {
        return Err(Error::NotPositive(pairing));
    }
    // ∂_t L_h applied to u₀; exact for families affine in t.
    let eps = 1e-4;
    let up = family(t0 + eps)?.assemble().matvec(u);
    let dn = family(t0 - eps)?.assemble().matvec(u);
    let dlu: Vec<f64> = up.iter().zip(&dn).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
    let value = dot(&left, &dlu) / pairing;
    let step = 1e-3;
    let lp = principal_eigenpair(&family(t0 + step)?, tol)?.lambda0;
    let lm = principal_eigenpair(&family(t0 - step)?, tol)?.lambda0;
    Ok(EigenDerivative {
        t0,
        lambda0: pair.lambda0,
        value,
        finite_difference: (lp - lm) / (2.0 * step),
        step,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRoot {
    pub t_star: f64,
    pub eigenpair: PrincipalEigenpair,
    /// `(t, λ₀(t))` at the bracket ends, the sampling grid when it was
    /// needed, and every bisection midpoint.
    pub samples: Vec<(f64, f64)>,
    /// Intervals of the sampling grid on which `λ₀` changes sign.
    pub sign_changes: Vec<(f64, f64)>,
}

/// Intervals `(t_i, t_{i+1})` of consecutive samples with a sign change
/// (a sample at exactly zero counts as its own interval).
pub fn find_sign_changes(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.1 == 0.0 {
            out.push((a.0, a.0));
        } else if a.1 * b.1 < 0.0 {
            out.push((a.0, b.0));
        }
    }
    if let Some(last) = samples.last().filter(|l| l.1 == 0.0) {
        out.push((last.0, last.0));
    }
    out
}

const ROOT_SAMPLES: usize = 16;

/// Zero of `t ↦ λ₀(family(t))` in `[t_lo, t_hi]` by bisection. When the
/// end values share a sign the interval is sampled and the smallest sign
/// change is used.
pub fn family_root<F>(family: F, t_lo: f64, t_hi: f64, tol: f64) -> Result<FamilyRoot>
where
    F: Fn(f64) -> Result<EllipticSpec>,
{
    if !(t_lo < t_hi) {
        return Err(Error::InvalidParameter(format!("empty bracket [{t_lo}, {t_hi}]")));
    }
    let eig_tol = (tol * 1e-2).max(1e-12);
    let eval = |t: f64| -> Result<PrincipalEigenpair> { principal_eigenpair(&family(t)?, eig_tol) };
    let lo_pair = eval(t_lo)?;
    let hi_pair = eval(t_hi)?;
    let mut samples = vec![(t_lo, lo_pair.lambda0), (t_hi, hi_pair.lambda0)];
    let (mut a, mut fa, mut b, mut fb);
    let sign_changes;
    if lo_pair.lambda0 * hi_pair.lambda0 <= 0.0 {
        (a, fa, b, fb) = (t_lo, lo_pair.lambda0, t_hi, hi_pair.lambda0);
        sign_changes = vec![(t_lo, t_hi)];
        if fa.abs() < tol {
            return Ok(FamilyRoot {
                t_star: t_lo,
                eigenpair: lo_pair,
                samples,
                sign_changes,
            });
        }
        if fb.abs() < tol {
            return Ok(FamilyRoot {
                t_star: t_hi,
                eigenpair: hi_pair,
                samples,
                sign_changes,
            });
        }
    } else {
        let mut grid_samples = Vec::with_capacity(ROOT_SAMPLES + 1);
        for i in 0..=ROOT_SAMPLES {
            let t = t_lo + (t_hi - t_lo) * i as f64 / ROOT_SAMPLES as f64;
            grid_samples.push((t, eval(t)?.lambda0));
        }
        sign_changes = find_sign_changes(&grid_samples);
        samples = grid_samples.clone();
        let Some(&(l, r)) = sign_changes.first() else {
            return Err(Error::NoSignChange(grid_samples));
        };
        let at = |t: f64| grid_samples.iter().find(|s| s.0 == t).expect("sampled").1;
        (a, fa, b, fb) = (l, at(l), r, at(r));
        if a == b || fa.abs() < tol {
            let pair = eval(a)?;
            return Ok(FamilyRoot {
                t_star: a,
                eigenpair: pair,
                samples,
                sign_changes,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let pair = eval(mid)?;
        samples.push((mid, pair.lambda0));
        if pair.lambda0.abs() < tol || b - a <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            if pair.lambda0.abs() >= tol {
                return Err(Error::NoConvergence {
                    iterations: samples.len(),
                    residual: pair.lambda0.abs(),
                });
            }
            return Ok(FamilyRoot {
                t_star: mid,
                eigenpair: pair,
                samples,
                sign_changes,
            });
        }
        if (pair.lambda0 < 0.0) == (fa < 0.0) {
            a = mid;
            fa = pair.lambda0;
        } else {
            b = mid;
            fb = pair.lambda0;
        }
    }
    Err(Error::NoConvergence {
        iterations: 200,
        residual: fa.abs().min(fb.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{random_smooth_field, random_smooth_form, ConformalMetric, PeriodicGrid};
    use crate::perron::DriftScheme;

    fn flat(dim: usize, n: usize) -> ConformalMetric {
        ConformalMetric::flat(&PeriodicGrid::new(dim, n).unwrap())
    }

    fn drift_spec(b: f64, n: usize) -> EllipticSpec {
        let g = flat(1, n);
        let grid = g.grid().clone();
        EllipticSpec::new(g, GridForm::constant_one_form(&grid, &[b]), GridForm::zero(&grid, 0)).unwrap()
    }

    fn random_spec(seed: u64, n: usize) -> EllipticSpec {
        let grid = PeriodicGrid::new(2, n).unwrap();
        let phi = random_smooth_field(&grid, seed, 0.3, 3, 1);
        EllipticSpec::new(
            ConformalMetric::new(phi).unwrap(),
            random_smooth_form(&grid, 1, seed + 1000, 1.5, 3, 2),
            random_smooth_field(&grid, seed + 2000, 2.0, 4, 2),
        )
        .unwrap()
    }

    #[test]
    fn laplacian_has_zero_principal_eigenvalue() {
        let spec = EllipticSpec::laplacian(flat(2, 8), 0.0);
        let p = principal_eigenpair(&spec, 1e-10).unwrap();
        assert!(p.lambda0.abs() < 1e-10);
        assert!(p.u0.max_value() - p.u0.min_value() < 1e-9);
        // ∫u₀² = 1 on a flat torus of area (2π)².
        let expect = 1.0 / (2.0 * std::f64::consts::PI);
        assert!((p.u0.values()[0] - expect).abs() < 1e-9);
    }

    #[test]
    fn constant_potential_is_the_eigenvalue() {
        let spec = EllipticSpec::laplacian(flat(2, 8), 0.8);
        assert!((principal_eigenpair(&spec, 1e-10).unwrap().lambda0 - 0.8).abs() < 1e-10);
    }

    #[test]
    fn upwind_drift_spectrum_matches_fourier_symbol() {
        let (b, n) = (1.5, 16);
        let spec = drift_spec(b, n);
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let rep = spectrum_dense(&spec).unwrap();
        assert!(rep.lambda0.abs() < 1e-10 && rep.gap > 0.0);
        for m in 0..n {
            let kh = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            let re = 4.0 * (kh / 2.0).sin().powi(2) / (h * h) + b * (1.0 - kh.cos()) / h;
            let im = b * kh.sin() / h;
            let hit = rep.eigenvalues.iter().any(|e| (e.0 - re).abs() < 1e-9 && (e.1 - im).abs() < 1e-9);
            assert!(hit, "missing {re} + {im}i");
        }
    }

    #[test]
    fn centered_drift_spectrum_approximates_k2_plus_ibk() {
        let (b, n) = (1.0, 32);
        let spec = drift_spec(b, n).with_scheme(DriftScheme::Centered);
        let rep = spectrum_dense(&spec).unwrap();
        for k in 1..4 {
            let kk = k as f64;
            let hit = rep
                .eigenvalues
                .iter()
                .any(|e| (e.0 - kk * kk).abs() < 0.05 * kk * kk && (e.1 - b * kk).abs() < 0.1 * kk);
            assert!(hit, "wavenumber {k}");
        }
    }

    #[test]
    fn dense_laplacian_spectrum_is_real_and_nonnegative() {
        let rep = spectrum_dense(&EllipticSpec::laplacian(flat(1, 16), 0.0)).unwrap();
        assert!(rep.eigenvalues.iter().all(|e| e.1.abs() < 1e-10 && e.0 > -1e-10));
        assert!(rep.lambda0.abs() < 1e-10 && rep.gap > 0.5);
    }

    #[test]
    fn dense_size_cap() {
        let spec = EllipticSpec::laplacian(flat(2, 66), 0.0);
        assert!(matches!(spectrum_dense(&spec), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn random_specs_have_positive_simple_principal_pairs() {
        for seed in 0..3 {
            let spec = random_spec(seed, 12);
            let p = principal_eigenpair(&spec, 1e-10).unwrap();
            assert!(p.u0.min_value() > 0.0 && p.residual < 1e-10);
            let rep = spectrum_dense(&spec).unwrap();
            assert!((rep.lambda0 - p.lambda0).abs() < 1e-8);
            assert!(rep.lambda0_imag.abs() < 1e-10 && rep.gap > 0.0);
            let ratio = inverse_iteration_ratio(&spec, 60).unwrap();
            assert!(ratio < 1.0, "{ratio}");
        }
    }

    #[test]
    fn variational_bounds_bracket_and_saturate() {
        let spec = random_spec(3, 12);
        let p = principal_eigenpair(&spec, 1e-11).unwrap();
        let (lo, hi) = variational_bounds(&spec, &p.u0).unwrap();
        assert!((hi - lo).abs() < 1e-8);
        let grid = spec.metric.grid().clone();
        let (lo, hi) = variational_bounds(&spec, &GridForm::constant(&grid, 1.0)).unwrap();
        assert!((lo - spec.potential.min_value()).abs() < 1e-12);
        assert!((hi - spec.potential.max_value()).abs() < 1e-12);
        for s in 0..10 {
            let u = random_smooth_field(&grid, 50 + s, 0.9, 5, 3).map_values(f64::exp);
            let (lo, hi) = variational_bounds(&spec, &u).unwrap();
            assert!(lo <= p.lambda0 + 1e-10 && p.lambda0 <= hi + 1e-10);
        }
        let bad = GridForm::scalar_fn(&grid, |x| x[0].sin());
        assert!(matches!(variational_bounds(&spec, &bad), Err(Error::NotPositive(_))));
    }

    #[test]
    fn adjoint_of_simple_specs() {
        let lap = EllipticSpec::laplacian(flat(2, 8), 0.3);
        assert_eq!(adjoint_spec(&lap).assemble(), lap.assemble());
        let spec = drift_spec(0.7, 8);
        let adj = adjoint_spec(&spec);
        assert_eq!(adj.drift, -&spec.drift);
        assert!(adj.potential.max_abs() < 1e-15);
    }

    #[test]
    fn adjoint_eigenvalue_converges_with_the_centered_scheme() {
        let err = |n: usize| {
            let grid = PeriodicGrid::new(2, n).unwrap();
            let spec = EllipticSpec::new(
                ConformalMetric::new(GridForm::scalar_fn(&grid, |x| 0.2 * x[1].cos())).unwrap(),
                GridForm::one_form_fn(&grid, |i, x| if i == 0 { x[0].sin() } else { 0.5 * x[1].cos() + 0.3 }),
                GridForm::scalar_fn(&grid, |x| 0.5 * x[0].sin()),
            )
            .unwrap()
            .with_scheme(DriftScheme::Centered);
            let a = principal_eigenpair(&spec, 1e-11).unwrap().lambda0;
            let b = principal_eigenpair(&adjoint_spec(&spec), 1e-11).unwrap().lambda0;
            (a - b).abs()
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 > 1e-6 && e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn derivative_of_identity_shift_is_one() {
        let base = random_spec(4, 10);
        let one = GridForm::constant(base.metric.grid(), 1.0);
        let d = eigen_derivative(|t| Ok(base.add_potential(&one, t)), 0.3, 1e-11).unwrap();
        assert!((d.value - 1.0).abs() < 1e-9);
        assert!((d.finite_difference - 1.0).abs() < 1e-6);
    }

    #[test]
    fn self_adjoint_derivative_is_the_weighted_mean() {
        let grid = PeriodicGrid::new(2, 10).unwrap();
        let base = EllipticSpec::laplacian(ConformalMetric::flat(&grid), 0.0);
        let base = base.add_potential(&random_smooth_field(&grid, 9, 1.0, 3, 2), 1.0);
        let c1 = random_smooth_field(&grid, 10, 1.0, 3, 2);
        let d = eigen_derivative(|t| Ok(base.add_potential(&c1, t)), 0.0, 1e-11).unwrap();
        let u0 = principal_eigenpair(&base, 1e-11).unwrap().u0;
        let u2 = u0.zip_with(&u0, |a, b| a * b);
        let expect = dot(c1.values(), u2.values()) / u2.values().iter().sum::<f64>();
        assert!((d.value - expect).abs() < 1e-9);
        assert!((d.finite_difference - expect).abs() < 1e-5);
    }

    #[test]
    fn affine_family_root() {
        let base = EllipticSpec::laplacian(flat(2, 8), -1.0);
        let one = GridForm::constant(base.metric.grid(), 1.0);
        let r = family_root(|t| Ok(base.add_potential(&one, t)), 0.0, 1.7, 1e-10).unwrap();
        assert!((r.t_star - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vaisman_type_family_root_at_two() {
        // |θ|² = 4: drift −(1−t)θ, potential t(2−t), so λ₀(t) = t(2−t).
        let g = flat(2, 8);
        let grid = g.grid().clone();
        let theta = GridForm::constant_one_form(&grid, &[2.0, 0.0]);
        let family = |t: f64| {
            EllipticSpec::new(g.clone(), theta.scale(-(1.0 - t)), GridForm::constant(&grid, t * (2.0 - t)))
        };
        let r = family_root(family, 1.5, 2.5, 1e-10).unwrap();
        assert!((r.t_star - 2.0).abs() < 1e-8);
        assert_eq!(r.sign_changes, vec![(1.5, 2.5)]);
    }

    #[test]
    fn no_sign_change_lists_samples() {
        let base = EllipticSpec::laplacian(flat(1, 8), 1.0);
        let one = GridForm::constant(base.metric.grid(), 1.0);
        match family_root(|t| Ok(base.add_potential(&one, t)), 0.0, 1.0, 1e-10) {
            Err(Error::NoSignChange(s)) => assert_eq!(s.len(), ROOT_SAMPLES + 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_changes_are_all_reported() {
        let s = [(0.0, 1.0), (1.0, -1.0), (2.0, 0.0), (3.0, 2.0), (4.0, -2.0)];
        assert_eq!(find_sign_changes(&s), vec![(0.0, 1.0), (2.0, 2.0), (3.0, 4.0)]);
    }

    #[test]
    fn adding_a_nonnegative_potential_never_lowers_lambda() {
        for seed in 0..5 {
            let spec = random_spec(seed + 20, 8);
            let bump = random_smooth_field(spec.metric.grid(), seed + 99, 1.0, 3, 2).map_values(|v| v * v);
            let a = principal_eigenpair(&spec, 1e-10).unwrap().lambda0;
            let b = principal_eigenpair(&spec.add_potential(&bump, 1.0), 1e-10).unwrap().lambda0;
            assert!(b >= a - 1e-10);
        }
    }
}
