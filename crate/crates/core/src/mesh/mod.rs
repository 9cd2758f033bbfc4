//! Periodic-grid discretization of differential forms on tori.
//!
//! Forms are stored component-wise over a uniform periodic grid; `d` uses
//! centered differences so that `d∘d` vanishes identically, and metrics are
//! conformally flat, which keeps the Hodge star diagonal.

pub mod gauduchon;
pub mod grid;
pub mod io;
pub mod ops;
pub mod poisson;
pub mod random;

pub use gauduchon::{discrete_lee_form, gauduchon_factor, lemma_residual, lemma_test_data, GauduchonFactor, LemmaResidual};
pub use grid::{GridForm, OneFormField, PeriodicGrid, ScalarField, TwoFormField};
pub use io::{read_field, read_field_csv, write_field, write_field_csv};
pub use ops::{
    j_act, j_act_inverse, mesh_codifferential, mesh_d, mesh_d_alpha, mesh_dc_alpha, mesh_integrate,
    ConformalMetric,
};
pub use random::{random_smooth_field, random_smooth_form};
pub use poisson::{harmonic_representative, solve_poisson, PoissonSolution};
