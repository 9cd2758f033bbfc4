use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree overflow: {left} + {right} exceeds dimension {dim}")]
    DegreeOverflow { left: usize, right: usize, dim: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("volume factor sqrt(det g) is not in the coefficient field")]
    IrrationalVolume,
    #[error("matrix does not square to minus the identity")]
    NotComplexStructure,
    #[error("1-form is not closed (|dα| = {0})")]
    NotClosed(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("linear system has no solution: {0}")]
    Unsolvable(String),
    #[error("dF is not of the form θ∧F")]
    NoLeeForm,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("problem too large: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("field is not strictly positive (min {0:e})")]
    NotPositive(f64),
    #[error("no sign change of λ(t) among {} samples", .0.len())]
    NoSignChange(Vec<(f64, f64)>),
    #[error("Kähler-type obstruction: harmonic part of the Lee form vanishes")]
    KahlerObstruction,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("form has a non-negligible imaginary part ({0:e})")]
    NotReal(f64),
    #[error("data is not conformally flat")]
    NotConformallyFlat,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
