//! Pointwise multilinear algebra of forms, metrics and complex structures.

pub mod complex;
pub mod form;
pub mod linalg;
pub mod metric;
pub mod scalar;
pub mod taming;

pub use complex::{bidegree_project, bidegree_project_complex, BidegreeSplit, ComplexFrame};
pub use form::FrameForm;
pub use linalg::Mat;
pub use metric::{metric_of_form, ComplexStructureJ, MetricTensor};
pub use scalar::{rat, ComplexRational, ComplexScalar, Rational, RealScalar, Scalar};
pub use taming::{taming_check, taming_pairing, TamingVerdict};
