//! From Gauduchon data `(g, θ)` and a de Rham class `a` to the operator
//! `𝕃_{g,a}ψ = Δψ − g(θ − 2a_h, dψ) + g(θ − a_h, a_h)ψ`, its principal
//! eigenvalue along `a_t = (t/2)[θ_h]`, the zero crossing, and the
//! recovered twisted Lee form `α = a_h − d log ψ`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{
    harmonic_representative, mesh_d, random_smooth_field, random_smooth_form, ConformalMetric, GridForm,
    OneFormField, PeriodicGrid, ScalarField, TwoFormField,
};
use crate::perron::{eigen_derivative, family_root, find_sign_changes, principal_eigenpair, DriftScheme, EllipticSpec, PrincipalEigenpair};

/// Tolerance on `δ_gθ` and on closedness/co-closedness of harmonic parts.
pub const HARMONIC_TOL: f64 = 1e-9;

/// A metric with co-closed Lee form `θ = θ_h + δγ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GauduchonData {
    pub metric: ConformalMetric,
    pub lee: OneFormField,
    pub lee_harmonic: OneFormField,
}

impl GauduchonData {
    /// `θ = θ_h + δ_gγ` with `θ_h` the `g`-harmonic representative of the
    /// closed form `class_rep`.
    pub fn synthetic(metric: ConformalMetric, class_rep: &OneFormField, gamma: &TwoFormField) -> Result<Self> {
        let lee_harmonic = harmonic_representative(class_rep, &metric)?;
        let lee = &lee_harmonic + &metric.codifferential(gamma);
        Self::new(metric, lee, lee_harmonic)
    }

    pub fn new(metric: ConformalMetric, lee: OneFormField, lee_harmonic: OneFormField) -> Result<Self> {
        let scale = 1.0 + lee.max_abs();
        let div = metric.codifferential(&lee).max_abs();
        if div > HARMONIC_TOL * scale {
            return Err(Error::InvalidParameter(format!("Lee form is not co-closed (|δθ| = {div:e})")));
        }
        check_harmonic(&metric, &lee_harmonic)?;
        let exact_part = &lee - &lee_harmonic;
        // θ − θ_h is co-exact, hence L²-orthogonal to every harmonic form.
        let overlap = metric.l2_inner(&exact_part, &lee_harmonic).abs();
        if overlap > 1e-8 * scale * scale * metric.volume() {
            return Err(Error::InvalidParameter("θ − θ_h is not orthogonal to θ_h".into()));
        }
        Ok(Self {
            metric,
            lee,
            lee_harmonic,
        })
    }

    /// Flat metric and constant Lee form (Vaisman-type data).
    pub fn constant(grid: &PeriodicGrid, theta: &[f64]) -> Result<Self> {
        let th = GridForm::constant_one_form(grid, theta);
        Self::new(ConformalMetric::flat(grid), th.clone(), th)
    }

    /// Seeded non-constant data: random conformal factor of sup-norm
    /// `phi_amp`, harmonic class `c₀dx₁`, and `γ` of sup-norm `gamma_amp`.
    pub fn perturbed(grid: &PeriodicGrid, c0: f64, seed: u64, phi_amp: f64, gamma_amp: f64) -> Result<Self> {
        let phi = random_smooth_field(grid, seed, phi_amp, 3, 1);
        let gamma = random_smooth_form(grid, 2, seed.wrapping_add(1), gamma_amp, 3, 1);
        let mut c = vec![0.0; grid.dim()];
        c[0] = c0;
        Self::synthetic(ConformalMetric::new(phi)?, &GridForm::constant_one_form(grid, &c), &gamma)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.metric.grid()
    }

    /// True when the harmonic part vanishes (the Kähler-type case).
    pub fn is_exact(&self) -> bool {
        self.lee_harmonic.max_abs() < 1e-12 * (1.0 + self.lee.max_abs())
    }
}

fn check_harmonic(metric: &ConformalMetric, a: &OneFormField) -> Result<()> {
    let scale = 1.0 + a.max_abs();
    let d = mesh_d(a).max_abs();
    if d > HARMONIC_TOL * scale {
        return Err(Error::NotClosed(d));
    }
    let div = metric.codifferential(a).max_abs();
    if div > HARMONIC_TOL * scale {
        return Err(Error::InvalidParameter(format!("form is not co-closed (|δa| = {div:e})")));
    }
    Ok(())
}

/// A de Rham class through its harmonic representative.
#[derive(Clone, Debug, PartialEq)]
pub enum TwistClass {
    /// `a_t = (t/2)[θ_h]`.
    Scale(f64),
    /// A general `g`-harmonic 1-form.
    Harmonic(OneFormField),
}

impl TwistClass {
    pub fn harmonic(&self, data: &GauduchonData) -> Result<OneFormField> {
        match self {
            TwistClass::Scale(t) => Ok(data.lee_harmonic.scale(0.5 * t)),
            TwistClass::Harmonic(a) => {
                if a.grid() != data.grid() || a.degree() != 1 {
                    return Err(Error::InvalidParameter("twist class on a different grid".into()));
                }
                check_harmonic(&data.metric, a)?;
                Ok(a.clone())
            }
        }
    }
}

/// Orders classes by degree: `a > b` iff `deg(a) − deg(b) > 0`.
pub fn compare_classes(data: &GauduchonData, a: &TwistClass, b: &TwistClass) -> Result<Ordering> {
    let da = degree_of_class(data, a)?;
    let db = degree_of_class(data, b)?;
    let tol = 1e-12 * (1.0 + da.abs().max(db.abs()));
    Ok(if (da - db).abs() <= tol {
        Ordering::Equal
    } else if da > db {
        Ordering::Greater
    } else {
        Ordering::Less
    })
}

/// Numerical settings of the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Eigenvector residual for every principal eigenpair.
    pub eigen_tol: f64,
    /// Bisection stops once `|λ(t*)|` is below this.
    pub lambda_tol: f64,
    /// Multiplier of `(‖θ‖_∞ + ‖α‖_∞)²` in the twisted-Gauduchon threshold.
    pub tg_tol: f64,
    /// Number of intervals when sampling `λ(t)` on `[0, t_max]`.
    pub samples: usize,
    pub t_max: f64,
    pub scheme: DriftScheme,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            eigen_tol: 1e-10,
            lambda_tol: 1e-8,
            tg_tol: 1e-6,
            samples: 16,
            t_max: 2.0,
            scheme: DriftScheme::Upwind,
        }
    }
}

/// `𝕃_{g,a}` as an elliptic spec: drift `−(θ − 2a_h)`, potential
/// `g(θ − a_h, a_h)`.
pub fn assemble_ll(data: &GauduchonData, a: &TwistClass) -> Result<EllipticSpec> {
    let ah = a.harmonic(data)?;
    assemble_ll_harmonic(data, &ah)
}

fn assemble_ll_harmonic(data: &GauduchonData, ah: &OneFormField) -> Result<EllipticSpec> {
    let diff = &data.lee - ah;
    let drift = -&(&data.lee - &ah.scale(2.0));
    let potential = data.metric.inner(&diff, ah);
    EllipticSpec::new(data.metric.clone(), drift, potential)
}

/// Principal eigenpair of `𝕃_{g,a}`; its eigenvalue is `λ_a(g)`.
pub fn lambda_a(data: &GauduchonData, a: &TwistClass, cfg: &PipelineConfig) -> Result<PrincipalEigenpair> {
    principal_eigenpair(&assemble_ll(data, a)?.with_scheme(cfg.scheme), cfg.eigen_tol)
}

/// `(t, λ(t))` along `a_t = (t/2)[θ_h]`.
pub fn lambda_curve(data: &GauduchonData, ts: &[f64], cfg: &PipelineConfig) -> Result<Vec<(f64, f64)>> {
    ts.iter()
        .map(|&t| Ok((t, lambda_a(data, &TwistClass::Scale(t), cfg)?.lambda0)))
        .collect()
}

/// `λ'(0)` along `a_t = (t/2)[θ_h]` next to its closed form
/// `½∫‖θ_h‖² v_g / vol_g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub grid_n: usize,
    pub value: f64,
    pub finite_difference: f64,
    pub closed_form: f64,
    pub relative_error: f64,
}

pub fn derivative_at_zero(data: &GauduchonData, cfg: &PipelineConfig) -> Result<DerivativeCheck> {
    let d = eigen_derivative(
        |t| Ok(assemble_ll(data, &TwistClass::Scale(t))?.with_scheme(cfg.scheme)),
        0.0,
        cfg.eigen_tol,
    )?;
    let g = &data.metric;
    let closed_form = 0.5 * g.l2_inner(&data.lee_harmonic, &data.lee_harmonic) / g.volume();
    Ok(DerivativeCheck {
        grid_n: data.grid().points(0),
        value: d.value,
        finite_difference: d.finite_difference,
        closed_form,
        relative_error: (d.value - closed_form).abs() / closed_form.abs(),
    })
}

/// Pointwise `δ(θ − α) + g(θ − α, α)`.
pub fn twisted_gauduchon_field(metric: &ConformalMetric, theta: &OneFormField, alpha: &OneFormField) -> ScalarField {
    let diff = theta - alpha;
    &metric.codifferential(&diff) + &metric.inner(&diff, alpha)
}

/// Sup norm of [`twisted_gauduchon_field`].
pub fn twisted_gauduchon_residual(metric: &ConformalMetric, theta: &OneFormField, alpha: &OneFormField) -> f64 {
    twisted_gauduchon_field(metric, theta, alpha).max_abs()
}

/// `deg_g(ℒ_a) = −(1/2π) ∫ g(θ_h, a_h) v_g`.
pub fn degree_of_class(data: &GauduchonData, a: &TwistClass) -> Result<f64> {
    let ah = a.harmonic(data)?;
    Ok(-data.metric.l2_inner(&data.lee_harmonic, &ah) / (2.0 * PI))
}

/// `−(1/2π) ∫ (‖a_h‖² + ‖dψ‖²/ψ²) v_g`, the degree expressed through a
/// positive solution.
pub fn degree_from_solution(data: &GauduchonData, ah: &OneFormField, psi: &ScalarField) -> f64 {
    let g = &data.metric;
    let dlog = mesh_d(psi).mul_scalar_field(&psi.map_values(|p| 1.0 / p));
    -(g.l2_inner(ah, ah) + g.l2_inner(&dlog, &dlog)) / (2.0 * PI)
}

/// `|∫𝕃ψ/ψ v_g − ∫g(θ, a_h)v_g + ∫(‖a_h‖² + ‖dψ‖²/ψ²)v_g|`, with `𝕃`
/// discretized by the centered scheme.
pub fn ibp_residual(data: &GauduchonData, a: &TwistClass, psi: &ScalarField) -> Result<f64> {
    if psi.min_value() <= 0.0 {
        return Err(Error::NotPositive(psi.min_value()));
    }
    let ah = a.harmonic(data)?;
    let spec = assemble_ll_harmonic(data, &ah)?.with_scheme(DriftScheme::Centered);
    let g = &data.metric;
    let lhs = g.integrate(&spec.apply(psi).zip_with(psi, |l, p| l / p));
    let dlog = mesh_d(psi).mul_scalar_field(&psi.map_values(|p| 1.0 / p));
    let rhs = g.l2_inner(&data.lee, &ah) - g.l2_inner(&ah, &ah) - g.l2_inner(&dlog, &dlog);
    Ok((lhs - rhs).abs())
}

/// Output of [`find_taming_class`].
#[derive(Clone, Debug, PartialEq)]
pub struct TamingCertificate {
    pub t_star: f64,
    /// Principal eigenvalue at `t*` (below the bisection tolerance).
    pub lambda: f64,
    pub lambda_residual: f64,
    /// Positive eigenfunction, `∫ψ² v_g = 1`.
    pub psi: ScalarField,
    pub a_h: OneFormField,
    /// `α = a_h − d log ψ`.
    pub alpha: OneFormField,
    /// `sup |𝕃_h ψ / ψ|`: the discrete twisted-Gauduchon residual.
    pub tg_residual: f64,
    /// `sup |δ(θ − α) + g(θ − α, α)|` with mesh operators (truncation-limited).
    pub tg_residual_direct: f64,
    /// Threshold `tg_tol·(‖θ‖_∞ + ‖α‖_∞)²`.
    pub tg_threshold: f64,
    pub degree: f64,
    pub degree_from_solution: f64,
    pub samples: Vec<(f64, f64)>,
    pub sign_changes: Vec<(f64, f64)>,
}

/// JSON-facing summary of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub t_star: f64,
    pub lambda: f64,
    pub lambda_residual: f64,
    pub tg_residual: f64,
    pub tg_residual_direct: f64,
    pub tg_threshold: f64,
    pub degree: f64,
    pub degree_from_solution: f64,
    pub psi_min: f64,
    pub psi_max: f64,
    pub grid: Vec<usize>,
    pub seed: Option<u64>,
    pub sign_changes: Vec<(f64, f64)>,
}

impl TamingCertificate {
    pub fn summary(&self, seed: Option<u64>) -> CertificateSummary {
        CertificateSummary {
            t_star: self.t_star,
            lambda: self.lambda,
            lambda_residual: self.lambda_residual,
            tg_residual: self.tg_residual,
            tg_residual_direct: self.tg_residual_direct,
            tg_threshold: self.tg_threshold,
            degree: self.degree,
            degree_from_solution: self.degree_from_solution,
            psi_min: self.psi.min_value(),
            psi_max: self.psi.max_value(),
            grid: self.psi.grid().axes().to_vec(),
            seed,
            sign_changes: self.sign_changes.clone(),
        }
    }
}

/// Samples `λ(t)` on `[0, t_max]`, bisects the smallest sign change in
/// `(0, t_max]`, and recovers `ψ`, `α`, the residuals and the degree.
pub fn find_taming_class(data: &GauduchonData, cfg: &PipelineConfig) -> Result<TamingCertificate> {
    if data.is_exact() {
        return Err(Error::KahlerObstruction);
    }
    if cfg.samples < 2 || cfg.t_max <= 0.0 {
        return Err(Error::InvalidParameter("need at least two samples on a positive range".into()));
    }
    let ts: Vec<f64> = (0..=cfg.samples)
        .map(|i| cfg.t_max * i as f64 / cfg.samples as f64)
        .collect();
    let samples = lambda_curve(data, &ts, cfg)?;
    // λ(0) = 0 is structural; crossings are looked for in (0, t_max].
    let positive_part: Vec<(f64, f64)> = samples[1..]
        .iter()
        .map(|&(t, l)| (t, if l.abs() < cfg.lambda_tol { 0.0 } else { l }))
        .collect();
    let sign_changes = find_sign_changes(&positive_part);
    let Some(&(lo, hi)) = sign_changes.first() else {
        return Err(Error::NoSignChange(samples));
    };
    let family = |t: f64| Ok(assemble_ll(data, &TwistClass::Scale(t))?.with_scheme(cfg.scheme));
    let (t_star, pair) = if lo == hi {
        (lo, principal_eigenpair(&family(lo)?, cfg.eigen_tol)?)
    } else {
        let root = family_root(family, lo, hi, cfg.lambda_tol)?;
        (root.t_star, root.eigenpair)
    };
    let spec = family(t_star)?;
    let a_h = data.lee_harmonic.scale(0.5 * t_star);
    let psi = pair.u0.clone();
    let dlog = mesh_d(&psi).mul_scalar_field(&psi.map_values(|p| 1.0 / p));
    let alpha = &a_h - &dlog;
    let tg_residual = spec.apply(&psi).zip_with(&psi, |l, p| l / p).max_abs();
    let tg_residual_direct = twisted_gauduchon_residual(&data.metric, &data.lee, &alpha);
    let scale = data.lee.max_abs() + alpha.max_abs();
    Ok(TamingCertificate {
        t_star,
        lambda: pair.lambda0,
        lambda_residual: pair.residual,
        degree: degree_of_class(data, &TwistClass::Scale(t_star))?,
        degree_from_solution: degree_from_solution(data, &a_h, &psi),
        psi,
        a_h,
        alpha,
        tg_residual,
        tg_residual_direct,
        tg_threshold: cfg.tg_tol * scale * scale,
        samples,
        sign_changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perron::variational_bounds;

    fn t2(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(2, n).unwrap()
    }

    fn cfg() -> PipelineConfig {
        PipelineConfig::default()
    }

    #[test]
    fn zero_twist_has_no_potential_and_zero_eigenvalue() {
        let data = GauduchonData::perturbed(&t2(12), 1.5, 3, 0.2, 0.3).unwrap();
        let spec = assemble_ll(&data, &TwistClass::Scale(0.0)).unwrap();
        assert_eq!(spec.drift, -&data.lee);
        assert_eq!(spec.potential.max_abs(), 0.0);
        let p = lambda_a(&data, &TwistClass::Scale(0.0), &cfg()).unwrap();
        assert!(p.lambda0.abs() < 1e-10);
        assert!(p.u0.max_value() - p.u0.min_value() < 1e-8);
    }

    #[test]
    fn constant_coefficients_give_the_closed_form_curve() {
        let c0 = 2.0;
        let data = GauduchonData::constant(&t2(8), &[c0, 0.0]).unwrap();
        for k in 1..=8 {
            let t = 0.25 * k as f64;
            let spec = assemble_ll(&data, &TwistClass::Scale(t)).unwrap();
            let expect = t * (2.0 - t) * c0 * c0 / 4.0;
            assert!((spec.potential.max_value() - expect).abs() < 1e-14);
            assert!((spec.potential.min_value() - expect).abs() < 1e-14);
            let l = lambda_a(&data, &TwistClass::Scale(t), &cfg()).unwrap().lambda0;
            assert!((l - expect).abs() < 1e-10, "t = {t}: {l}");
        }
        let l = lambda_a(&data, &TwistClass::Scale(1.0), &cfg()).unwrap().lambda0;
        assert!((l - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_coefficient_certificate() {
        let data = GauduchonData::constant(&t2(8), &[2.0, 0.0]).unwrap();
        let c = find_taming_class(&data, &cfg()).unwrap();
        assert!((c.t_star - 2.0).abs() < 1e-6);
        assert!(c.psi.max_value() - c.psi.min_value() < 1e-8);
        assert!((&c.alpha - &data.lee_harmonic).max_abs() < 1e-8);
        assert!(c.tg_residual < c.tg_threshold && c.tg_residual_direct < 1e-8);
    }

    #[test]
    fn lck_style_twist_matches_the_reduced_operator() {
        // θ harmonic (γ = 0) for a non-flat metric, a = μ[θ].
        let grid = t2(10);
        let g = ConformalMetric::new(random_smooth_field(&grid, 5, 0.3, 3, 1)).unwrap();
        let data = GauduchonData::synthetic(g, &GridForm::constant_one_form(&grid, &[1.0, 0.5]), &GridForm::zero(&grid, 2))
            .unwrap();
        let b = &data.lee_harmonic;
        for mu in [0.25, 0.5, 0.8] {
            let spec = assemble_ll(&data, &TwistClass::Harmonic(b.scale(mu))).unwrap();
            assert!((&spec.drift - &b.scale(2.0 * mu - 1.0)).max_abs() < 1e-14);
            let pot = data.metric.norm2(b).scale((1.0 - mu) * mu);
            assert!((&spec.potential - &pot).max_abs() < 1e-14);
            let l = principal_eigenpair(&spec, 1e-10).unwrap().lambda0;
            assert!(l >= spec.potential.min_value() - 1e-10);
        }
    }

    #[test]
    fn exact_lee_form_forces_negative_eigenvalues() {
        let grid = t2(10);
        let data = GauduchonData::synthetic(
            ConformalMetric::new(random_smooth_field(&grid, 1, 0.2, 3, 1)).unwrap(),
            &GridForm::zero(&grid, 1),
            &random_smooth_form(&grid, 2, 2, 0.5, 3, 1),
        )
        .unwrap();
        assert!(data.is_exact());
        assert_eq!(find_taming_class(&data, &cfg()).unwrap_err(), Error::KahlerObstruction);
        let a = harmonic_representative(&GridForm::constant_one_form(&grid, &[0.7, 0.0]), &data.metric).unwrap();
        let l = lambda_a(&data, &TwistClass::Harmonic(a), &cfg()).unwrap().lambda0;
        assert!(l < -1e-6, "{l}");
    }

    #[test]
    fn perturbed_certificate_is_consistent() {
        let data = GauduchonData::perturbed(&t2(16), 2.0, 11, 0.2, 0.3).unwrap();
        let c = find_taming_class(&data, &cfg()).unwrap();
        assert!(c.t_star > 0.0 && c.t_star <= 2.0);
        assert!(c.lambda.abs() < 1e-8 && c.lambda_residual < 1e-8);
        assert!(c.psi.min_value() > 0.0);
        assert!(c.tg_residual < c.tg_threshold);
        assert!(c.samples.last().unwrap().1 <= 0.0);
        assert!(c.degree < 0.0);
        assert!((c.degree - c.degree_from_solution).abs() < 0.01 * c.degree.abs());
        let (lo, hi) = variational_bounds(&assemble_ll(&data, &TwistClass::Scale(c.t_star)).unwrap(), &c.psi).unwrap();
        assert!(lo <= 1e-8 && hi >= -1e-8);
    }

    #[test]
    fn lck_pair_has_zero_twisted_residual() {
        let data = GauduchonData::constant(&t2(8), &[1.0, -2.0]).unwrap();
        assert_eq!(twisted_gauduchon_residual(&data.metric, &data.lee, &data.lee), 0.0);
    }

    #[test]
    fn twisted_residual_is_conformally_covariant() {
        // (g, θ, α) → (e^f g, θ + df, α + df) multiplies the residual by e^{-f}
        // (dimension four); the mesh operators preserve this exactly.
        let defect = |n: usize| {
            let grid = PeriodicGrid::new(4, n).unwrap();
            let phi = GridForm::scalar_fn(&grid, |x| 0.2 * x[0].sin());
            let f = GridForm::scalar_fn(&grid, |x| 0.3 * x[1].cos());
            let g = ConformalMetric::new(phi.clone()).unwrap();
            let gt = ConformalMetric::new(&phi + &f.scale(0.5)).unwrap();
            let theta = GridForm::one_form_fn(&grid, |i, x| if i == 0 { 1.0 + 0.2 * x[1].sin() } else { 0.0 });
            let alpha = GridForm::constant_one_form(&grid, &[0.5, 0.0, 0.0, 0.0]);
            let df = GridForm::one_form_fn(&grid, |i, x| if i == 1 { -0.3 * x[1].sin() } else { 0.0 });
            let r = twisted_gauduchon_field(&g, &theta, &alpha);
            let rt = twisted_gauduchon_field(&gt, &(&theta + &df), &(&alpha + &df));
            (
                (&rt.mul_scalar_field(&f.map_values(f64::exp)) - &r).max_abs(),
                r.max_abs(),
            )
        };
        for n in [8, 16] {
            let (e, r) = defect(n);
            assert!(r > 1e-3 && e < 1e-12 * r, "{n}: {e} {r}");
        }
    }

    #[test]
    fn degree_examples() {
        let grid = PeriodicGrid::new(4, 4).unwrap();
        let data = GauduchonData::constant(&grid, &[2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(degree_of_class(&data, &TwistClass::Scale(0.0)).unwrap(), 0.0);
        let d = degree_of_class(&data, &TwistClass::Scale(2.0)).unwrap();
        let expect = -4.0 * (2.0 * PI).powi(3);
        assert!((d - expect).abs() < 1e-9 * expect.abs());
        assert_eq!(
            compare_classes(&data, &TwistClass::Scale(1.0), &TwistClass::Scale(2.0)).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn ibp_identity() {
        let data = |n| GauduchonData::perturbed(&t2(n), 1.5, 7, 0.2, 0.3).unwrap();
        let d = data(8);
        let one = GridForm::constant(d.grid(), 1.0);
        assert!(ibp_residual(&d, &TwistClass::Scale(1.3), &one).unwrap() < 1e-10);
        let err = |n| {
            let d = data(n);
            let psi = GridForm::scalar_fn(d.grid(), |x| (0.2 * x[0].sin()).exp());
            ibp_residual(&d, &TwistClass::Scale(1.3), &psi).unwrap()
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 > 1e-8 && (3.4..4.6).contains(&(e1 / e2)), "{e1} {e2}");
        assert!(ibp_residual(&d, &TwistClass::Scale(1.0), &one.scale(-1.0)).is_err());
    }

    #[test]
    fn derivative_at_zero_matches_closed_form() {
        let c = derivative_at_zero(&GauduchonData::constant(&t2(8), &[2.0, 0.0]).unwrap(), &cfg()).unwrap();
        assert!((c.value - 2.0).abs() < 1e-9 && (c.closed_form - 2.0).abs() < 1e-12);
        let err = |n| {
            let d = GauduchonData::perturbed(&t2(n), 2.0, 4, 0.2, 0.3).unwrap();
            let c = derivative_at_zero(&d, &cfg()).unwrap();
            assert!((c.value - c.finite_difference).abs() < 1e-5 * c.value.abs());
            c.relative_error
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 < 0.02 && e2 < e1, "{e1} {e2}");
    }

    #[test]
    fn non_coclosed_lee_form_is_rejected() {
        let grid = t2(8);
        let theta = GridForm::one_form_fn(&grid, |i, x| if i == 0 { x[0].sin() } else { 0.0 });
        let r = GauduchonData::new(ConformalMetric::flat(&grid), theta, GridForm::zero(&grid, 1));
        assert!(r.is_err());
    }
}
