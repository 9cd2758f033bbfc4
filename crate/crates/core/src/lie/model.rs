//! Catalogued Lie algebras with invariant Hermitian data.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::formcalc::linalg::Mat;
use crate::formcalc::scalar::{rat, Rational, RealScalar};
use crate::formcalc::{ComplexStructureJ, FrameForm, MetricTensor};

/// A real Lie algebra on a fixed basis `e_0…e_{n−1}` with a left-invariant
/// metric, complex structure and distinguished closed 1-form.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraModel {
    name: String,
    dim: usize,
    /// `c[i][j][k]`: `[e_i, e_j] = Σ_k c^k_{ij} e_k`.
    c: Vec<Vec<Vec<Rational>>>,
    metric: MetricTensor<Rational>,
    j: ComplexStructureJ<Rational>,
    alpha0: FrameForm<Rational>,
    basis_names: Vec<String>,
}

impl LieAlgebraModel {
    /// Builds a model from nonzero brackets `(i, j, k, value)` meaning
    /// `[e_i, e_j] ∋ value·e_k` (antisymmetry is filled in). Checks the
    /// Jacobi identity, integrability of `J` and closedness of `α₀`.
    pub fn new(
        name: impl Into<String>,
        basis_names: Vec<String>,
        brackets: &[(usize, usize, usize, Rational)],
        j: Mat<Rational>,
        alpha0: Vec<Rational>,
        metric: Option<Mat<Rational>>,
    ) -> Result<Self> {
        let dim = basis_names.len();
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, j_, k, v) in brackets {
            let (i, j_, k) = (*i, *j_, *k);
            if i >= dim || j_ >= dim || k >= dim {
                return Err(Error::InvalidModel(format!("bracket index out of range: ({i},{j_},{k})")));
            }
            if i == j_ {
                return Err(Error::InvalidModel(format!("[e{i}, e{i}] must vanish")));
            }
            c[i][j_][k] = v.clone();
            c[j_][i][k] = -v.clone();
        }
        if alpha0.len() != dim {
            return Err(Error::DimensionMismatch(alpha0.len(), dim));
        }
        if j.rows() != dim {
            return Err(Error::DimensionMismatch(j.rows(), dim));
        }
        let metric = match metric {
            Some(m) => MetricTensor::new(m)?,
            None => MetricTensor::identity(dim),
        };
        let model = Self {
            name: name.into(),
            dim,
            c,
            metric,
            j: ComplexStructureJ::new(j)?,
            alpha0: FrameForm::one_form(alpha0),
            basis_names,
        };
        if !model.jacobi_residual().is_zero() {
            return Err(Error::InvalidModel("Jacobi identity fails".into()));
        }
        if !model.nijenhuis_residual().is_zero() {
            return Err(Error::InvalidModel("complex structure is not integrable".into()));
        }
        let da = super::ce_d(&model, &model.alpha0);
        if !da.is_zero() {
            return Err(Error::NotClosed(da.max_abs()));
        }
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    pub fn metric(&self) -> &MetricTensor<Rational> {
        &self.metric
    }

    pub fn j(&self) -> &ComplexStructureJ<Rational> {
        &self.j
    }

    pub fn alpha0(&self) -> &FrameForm<Rational> {
        &self.alpha0
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    /// Same algebra with a different invariant metric. The metric is a
    /// reference inner product for eigenvalue normalization; it need not be
    /// `J`-Hermitian (the orthonormal `Sol'⁴₁` frame is not).
    pub fn with_metric(&self, gram: Mat<Rational>) -> Result<Self> {
        let metric = MetricTensor::new(gram)?;
        Ok(Self { metric, ..self.clone() })
    }

    /// Bracket of two vectors given by frame components.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() {
                    continue;
                }
                let w = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    if !self.c[i][j][k].is_zero() {
                        *o += &w * &self.c[i][j][k];
                    }
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Rational> {
        (0..self.dim).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect()
    }

    /// Largest |component| of `[x,[y,z]] + cyclic` over basis triples.
    pub fn jacobi_residual(&self) -> Rational {
        let mut worst = Rational::zero();
        for a in 0..self.dim {
            for b in 0..self.dim {
                for c in 0..self.dim {
                    let (x, y, z) = (self.unit(a), self.unit(b), self.unit(c));
                    let t1 = self.bracket(&x, &self.bracket(&y, &z));
                    let t2 = self.bracket(&y, &self.bracket(&z, &x));
                    let t3 = self.bracket(&z, &self.bracket(&x, &y));
                    for k in 0..self.dim {
                        let s = (&t1[k] + &t2[k] + &t3[k]).abs();
                        if s > worst {
                            worst = s;
                        }
                    }
                }
            }
        }
        worst
    }

    /// Largest |component| of `N(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]`.
    pub fn nijenhuis_residual(&self) -> Rational {
        let mut worst = Rational::zero();
        for a in 0..self.dim {
            for b in 0..self.dim {
                let (x, y) = (self.unit(a), self.unit(b));
                let jx = self.j.apply(&x);
                let jy = self.j.apply(&y);
                let t1 = self.bracket(&jx, &jy);
                let t2 = self.j.apply(&self.bracket(&jx, &y));
                let t3 = self.j.apply(&self.bracket(&x, &jy));
                let t4 = self.bracket(&x, &y);
                for k in 0..self.dim {
                    let s = (&t1[k] - &t2[k] - &t3[k] - &t4[k]).abs();
                    if s > worst {
                        worst = s;
                    }
                }
            }
        }
        worst
    }

    /// Relabels the basis: new basis vector `i` is old vector `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim;
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = &self.c[perm[i]][perm[j]][perm[k]];
                    if !v.is_zero() {
                        brackets.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        let jm = Mat::from_fn(n, n, |r, c| self.j.matrix()[(perm[r], perm[c])].clone());
        let gm = Mat::from_fn(n, n, |r, c| self.metric.gram()[(perm[r], perm[c])].clone());
        let alpha = perm.iter().map(|&p| self.alpha0.coeffs()[p].clone()).collect();
        let names = perm.iter().map(|&p| self.basis_names[p].clone()).collect();
        Self::new(format!("{}-permuted", self.name), names, &brackets, jm, alpha, Some(gm))
    }

    /// Serializes to the catalog text format (see [`parse_model`]).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name {}", self.name);
        let _ = writeln!(s, "dim {}", self.dim);
        let _ = writeln!(s, "basis {}", self.basis_names.join(" "));
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    if !self.c[i][j][k].is_zero() {
                        let _ = writeln!(s, "bracket {i} {j} {k} {}", self.c[i][j][k]);
                    }
                }
            }
        }
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.j.matrix()[(r, c)].to_string()).collect();
            let _ = writeln!(s, "j {}", row.join(" "));
        }
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.metric.gram()[(r, c)].to_string()).collect();
            let _ = writeln!(s, "metric {}", row.join(" "));
        }
        let a: Vec<String> = self.alpha0.coeffs().iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "alpha0 {}", a.join(" "));
        s
    }
}

fn parse_rational(tok: &str, line: usize) -> Result<Rational> {
    let err = || Error::Parse {
        line,
        msg: format!("not a rational number: {tok:?}"),
    };
    if let Some((n, d)) = tok.split_once('/') {
        let n: i64 = n.parse().map_err(|_| err())?;
        let d: i64 = d.parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        Ok(rat(n, d))
    } else if let Ok(v) = tok.parse::<i64>() {
        Ok(rat(v, 1))
    } else {
        let v: f64 = tok.parse().map_err(|_| err())?;
        if !v.is_finite() {
            return Err(err());
        }
        Ok(<Rational as RealScalar>::from_f64(v))
    }
}

/// Parses the catalog text format: one directive per line, `#` comments.
///
/// ```text
/// name sol41
/// dim 4
/// basis Y Z T U
/// bracket i j k value     # [e_i, e_j] has value·e_k
/// j r0 r1 r2 r3           # one line per row of J
/// metric r0 r1 r2 r3      # optional, one line per row (identity if absent)
/// alpha0 a0 a1 a2 a3
/// ```
pub fn parse_model(text: &str) -> Result<LieAlgebraModel> {
    let mut name = String::from("unnamed");
    let mut dim: Option<usize> = None;
    let mut basis: Option<Vec<String>> = None;
    let mut brackets = Vec::new();
    let mut jrows: Vec<Vec<Rational>> = Vec::new();
    let mut grows: Vec<Vec<Rational>> = Vec::new();
    let mut alpha: Option<Vec<Rational>> = None;
    let mut last_line = 0;
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let key = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        let need_dim = || {
            dim.ok_or(Error::Parse {
                line,
                msg: "`dim` must come first".into(),
            })
        };
        let row = |n: usize| -> Result<Vec<Rational>> {
            if rest.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", rest.len()),
                });
            }
            rest.iter().map(|t| parse_rational(t, line)).collect()
        };
        match key {
            "name" => name = rest.join(" "),
            "dim" => {
                let d: usize = rest.first().and_then(|t| t.parse().ok()).ok_or(Error::Parse {
                    line,
                    msg: "dim expects a positive even integer".into(),
                })?;
                if d == 0 || !d.is_multiple_of(2) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("dim must be even and positive, got {d}"),
                    });
                }
                dim = Some(d);
            }
            "basis" => {
                let n = need_dim()?;
                if rest.len() != n {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected {n} basis names"),
                    });
                }
                basis = Some(rest.iter().map(|s| s.to_string()).collect());
            }
            "bracket" => {
                let n = need_dim()?;
                if rest.len() != 4 {
                    return Err(Error::Parse {
                        line,
                        msg: "bracket expects `i j k value`".into(),
                    });
                }
                let idx: Vec<usize> = rest[..3]
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse {
                        line,
                        msg: "bracket indices must be non-negative integers".into(),
                    })?;
                if idx.iter().any(|&i| i >= n) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("bracket index out of range 0..{n}"),
                    });
                }
                brackets.push((idx[0], idx[1], idx[2], parse_rational(rest[3], line)?));
            }
            "j" => jrows.push(row(need_dim()?)?),
            "metric" => grows.push(row(need_dim()?)?),
            "alpha0" => alpha = Some(row(need_dim()?)?),
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown directive {other:?}"),
                })
            }
        }
    }
    let missing = |what: &str| Error::Parse {
        line: last_line,
        msg: format!("missing `{what}`"),
    };
    let n = dim.ok_or_else(|| missing("dim"))?;
    let basis = basis.unwrap_or_else(|| (0..n).map(|i| format!("e{i}")).collect());
    if jrows.len() != n {
        return Err(missing("j rows"));
    }
    if !grows.is_empty() && grows.len() != n {
        return Err(missing("metric rows"));
    }
    let alpha = alpha.ok_or_else(|| missing("alpha0"))?;
    let metric = (!grows.is_empty()).then(|| Mat::from_rows(grows));
    LieAlgebraModel::new(name, basis, &brackets, Mat::from_rows(jrows), alpha, metric)
}

/// `Sol'⁴₁` on the frame `(Y, Z, T, U)`: `[Y,T] = Y`, `[T,U] = U`, `[Y,U] = Z`,
/// `JY = −Z, JZ = Y, JT = −U − Z, JU = T − Y`, `α₀ = t`, orthonormal frame.
pub const SOL41_TEXT: &str = "\
name sol41
dim 4
basis Y Z T U
bracket 0 2 0 1
bracket 2 3 3 1
bracket 0 3 1 1
j 0 1 0 -1
j -1 0 -1 0
j 0 0 0 1
j 0 0 -1 0
alpha0 0 0 1 0
";

/// Abelian `ℝ⁴ = ℂ²` with the standard structure and `α₀ = dx₂`.
pub const ABELIAN4_TEXT: &str = "\
name abelian4
dim 4
basis X1 Y1 X2 Y2
j 0 -1 0 0
j 1 0 0 0
j 0 0 0 -1
j 0 0 1 0
alpha0 0 0 1 0
";

pub fn sol41() -> LieAlgebraModel {
    parse_model(SOL41_TEXT).expect("catalogued model is valid")
}

pub fn abelian4() -> LieAlgebraModel {
    parse_model(ABELIAN4_TEXT).expect("catalogued model is valid")
}

/// Looks up a catalogued model by name.
pub fn catalog(name: &str) -> Option<LieAlgebraModel> {
    match name {
        "sol41" => Some(sol41()),
        "abelian4" => Some(abelian4()),
        _ => None,
    }
}

pub const CATALOG_NAMES: [&str; 2] = ["sol41", "abelian4"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_models_are_valid() {
        for name in CATALOG_NAMES {
            let m = catalog(name).unwrap();
            assert!(m.jacobi_residual().is_zero());
            assert!(m.nijenhuis_residual().is_zero());
        }
    }

    #[test]
    fn sol41_brackets_and_complex_structure() {
        let m = sol41();
        let e = |i: usize| m.unit(i);
        assert_eq!(m.bracket(&e(0), &e(2)), e(0));
        assert_eq!(m.bracket(&e(2), &e(3)), e(3));
        assert_eq!(m.bracket(&e(0), &e(3)), e(1));
        assert!(m.bracket(&e(1), &e(2)).iter().all(Zero::is_zero));
        let neg = |v: Vec<Rational>| v.into_iter().map(|x| -x).collect::<Vec<_>>();
        assert_eq!(m.j().apply(&e(0)), neg(e(1)));
        assert_eq!(m.j().apply(&e(1)), e(0));
        let jt: Vec<Rational> = neg(e(3)).into_iter().zip(e(1)).map(|(a, b)| a - b).collect();
        assert_eq!(m.j().apply(&e(2)), jt);
    }

    #[test]
    fn text_format_round_trips() {
        let m = sol41();
        assert_eq!(parse_model(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "dim 4\nbasis a b c d\nbracket 0 1 9 1\n";
        match parse_model(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "dim 4\nfoo 1\n";
        assert!(matches!(parse_model(bad), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn non_jacobi_brackets_are_rejected() {
        // [e0,e1] = e2, [e1,e2] = e0, [e0,e2] = e0 is not a Lie algebra.
        let brackets = vec![(0, 1, 2, rat(1, 1)), (1, 2, 0, rat(1, 1)), (0, 2, 0, rat(1, 1))];
        let r = LieAlgebraModel::new(
            "bad",
            (0..4).map(|i| format!("e{i}")).collect(),
            &brackets,
            ComplexStructureJ::<Rational>::standard(4).matrix().clone(),
            vec![rat(0, 1); 4],
            None,
        );
        assert!(matches!(r, Err(Error::InvalidModel(_))));
    }
}
