//! Property tests over seeded random data: mesh operators, Perron pairs,
//! the λ(t) curve and the Hopf potential family.

use lcslab::mesh::{
    harmonic_representative, mesh_d, mesh_integrate, random_smooth_field, random_smooth_form, ConformalMetric,
    GridForm, PeriodicGrid,
};
use lcslab::perron::{inverse_iteration_ratio, principal_eigenpair, variational_bounds, EllipticSpec};
use lcslab::pipeline::{degree_of_class, lambda_a, GauduchonData, PipelineConfig, TwistClass};
use lcslab::surfaces::{self, Complex64, HopfModel, PointSample};
use proptest::prelude::*;

fn shifted(f: &GridForm, axis: usize, s: isize) -> GridForm {
    let g = f.grid();
    let comps = f
        .components()
        .iter()
        .map(|c| (0..g.len()).map(|i| c[g.neighbor(i, axis, s)]).collect())
        .collect();
    GridForm::from_components(g, f.degree(), comps).unwrap()
}

fn cfg() -> PipelineConfig {
    PipelineConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn operators_commute_with_grid_translations(seed in 0u64..1000, axis in 0usize..3, s in -5isize..6) {
        let grid = PeriodicGrid::new(3, 8).unwrap();
        let a = random_smooth_form(&grid, 1, seed, 1.0, 3, 2);
        let phi = random_smooth_field(&grid, seed + 1, 0.3, 3, 1);
        let lhs = mesh_d(&shifted(&a, axis, s));
        let rhs = shifted(&mesh_d(&a), axis, s);
        prop_assert_eq!(lhs.components(), rhs.components());
        let g = ConformalMetric::new(phi.clone()).unwrap();
        let gs = ConformalMetric::new(shifted(&phi, axis, s)).unwrap();
        let lhs = gs.codifferential(&shifted(&a, axis, s));
        let rhs = shifted(&g.codifferential(&a), axis, s);
        prop_assert_eq!(lhs.components(), rhs.components());
    }

    #[test]
    fn exact_top_forms_integrate_to_zero(seed in 0u64..1000, dim in 1usize..4) {
        let grid = PeriodicGrid::new(dim, 8).unwrap();
        let b = random_smooth_form(&grid, dim - 1, seed, 2.0, 4, 3);
        let total = mesh_integrate(&mesh_d(&b), &ConformalMetric::flat(&grid));
        prop_assert!(total.abs() < 1e-12, "∫d = {total:e}");
    }

    #[test]
    fn harmonic_projection_is_idempotent(seed in 0u64..1000) {
        let grid = PeriodicGrid::new(2, 16).unwrap();
        let g = ConformalMetric::new(random_smooth_field(&grid, seed, 0.3, 3, 1)).unwrap();
        let closed = &GridForm::constant_one_form(&grid, &[1.0, -0.5])
            + &mesh_d(&random_smooth_field(&grid, seed + 7, 1.0, 3, 2));
        let h = harmonic_representative(&closed, &g).unwrap();
        let hh = harmonic_representative(&h, &g).unwrap();
        prop_assert!((&h - &hh).max_abs() < 1e-9 * (1.0 + h.max_abs()));
    }

    #[test]
    fn principal_pairs_are_positive_and_bracketed(seed in 0u64..1000) {
        let grid = PeriodicGrid::new(2, 8).unwrap();
        let spec = EllipticSpec::new(
            ConformalMetric::new(random_smooth_field(&grid, seed, 0.3, 3, 1)).unwrap(),
            random_smooth_form(&grid, 1, seed + 1, 1.5, 3, 2),
            random_smooth_field(&grid, seed + 2, 2.0, 4, 2),
        )
        .unwrap();
        let p = principal_eigenpair(&spec, 1e-10).unwrap();
        prop_assert!(p.u0.min_value() > 0.0);
        let ratio = inverse_iteration_ratio(&spec, 40).unwrap();
        prop_assert!(ratio < 1.0, "second/first modulus {ratio}");
        let u = random_smooth_field(&grid, seed + 3, 0.8, 4, 3).map_values(f64::exp);
        let (lo, hi) = variational_bounds(&spec, &u).unwrap();
        prop_assert!(lo <= p.lambda0 + 1e-9 && p.lambda0 <= hi + 1e-9);
    }

    #[test]
    fn lambda_vanishes_at_zero_and_is_nonpositive_at_two(seed in 0u64..1000) {
        let grid = PeriodicGrid::new(2, 8).unwrap();
        let d = GauduchonData::perturbed(&grid, 1.5, seed, 0.2, 0.3).unwrap();
        let l0 = lambda_a(&d, &TwistClass::Scale(0.0), &cfg()).unwrap().lambda0;
        let l2 = lambda_a(&d, &TwistClass::Scale(2.0), &cfg()).unwrap().lambda0;
        prop_assert!(l0.abs() < 1e-8, "λ(0) = {l0:e}");
        prop_assert!(l2 <= 1e-8, "λ(2) = {l2:e}");
    }

    /// With a harmonic Lee form and `a = μθ_h`, `𝕃(1) = μ(1−μ)‖θ_h‖²`, so
    /// the sup–inf formula gives `λ ≥ μ(1−μ) min ‖θ_h‖²`.
    #[test]
    fn lck_family_is_bounded_below(seed in 0u64..1000, mu in 0.0f64..1.0) {
        let grid = PeriodicGrid::new(2, 8).unwrap();
        let metric = ConformalMetric::new(random_smooth_field(&grid, seed, 0.3, 3, 1)).unwrap();
        let rep = GridForm::constant_one_form(&grid, &[1.2, 0.4]);
        let d = GauduchonData::synthetic(metric, &rep, &GridForm::zero(&grid, 2)).unwrap();
        let min_norm = d.metric.norm2(&d.lee_harmonic).min_value();
        let l = lambda_a(&d, &TwistClass::Scale(2.0 * mu), &cfg()).unwrap().lambda0;
        prop_assert!(l >= mu * (1.0 - mu) * min_norm - 1e-8, "λ = {l}, bound {}", mu * (1.0 - mu) * min_norm);
    }

    #[test]
    fn degree_sign_survives_conformal_changes(seed in 0u64..1000, amp in 0.0f64..0.4) {
        let grid = PeriodicGrid::new(2, 8).unwrap();
        let d = GauduchonData::perturbed(&grid, 2.0, seed, amp, 0.3).unwrap();
        for t in [0.5, 1.0, 2.0] {
            prop_assert!(degree_of_class(&d, &TwistClass::Scale(t)).unwrap() < 0.0);
        }
    }

    #[test]
    fn hopf_identities_hold_at_random_points(
        x in prop::array::uniform4(-1.5f64..1.5),
        t in 1.0f64..3.0,
        s in -0.5f64..2.0,
    ) {
        let z = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
        let r = surfaces::hopf_potential(z).sqrt();
        prop_assume!(r > 0.5);
        let p = PointSample::new(z, 2.5e-4).unwrap();
        let model = HopfModel::diagonal(0.5).unwrap();
        prop_assert!(surfaces::hopf_lck_residual(t, &p) < 1e-8 * (1.0 + 1.0 / (r * r)));
        prop_assert!((surfaces::hopf_lee_norm2(t, &p) - 1.0).abs() < 1e-10);
        let f = surfaces::hopf_potential_form(&model, t, &p).unwrap();
        prop_assert!(f.taming_min_eig > 0.0 && f.type_defect < 1e-10);
        prop_assert!(surfaces::pluricanonical_family_residual(&model, s, &p).unwrap() < 1e-8);
        prop_assert!((surfaces::automorphy_ratio(&model, z) - 0.25).abs() < 1e-12);
    }
}
