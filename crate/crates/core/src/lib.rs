//! Computational laboratory for locally conformally symplectic structures on
//! complex surfaces.
//!
//! - [`formcalc`]: pointwise forms, metrics, complex structures.
//! - [`lie`]: exact Chevalley–Eilenberg calculus on left-invariant forms.
//! - [`mesh`]: discrete exterior calculus on periodic grids.
//! - [`perron`]: principal eigenpairs of non-self-adjoint elliptic operators.
//! - [`pipeline`]: the eigenvalue-crossing search for taming classes.
//! - [`surfaces`]: Hopf and Inoue model checks.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod formcalc;
pub mod lie;
pub mod mesh;
pub mod perron;
pub mod pipeline;
pub mod surfaces;

pub use error::{Error, Result};
