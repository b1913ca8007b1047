//! Problem documents: polynomial part, nonlinear or rational terms, the
//! sampling set, or a pencil to verify. Scalars are `"num/den"` strings,
//! `["re", "im"]` string pairs, numbers, or `[re, im]` number pairs.

use num_complex::Complex64;
use ratlin::aaa::{BarycentricApprox, ScalarFunction};
use ratlin::blockfullrank::{BfrParts, Layout};
use ratlin::cork::{BasisRelation, CorkModel};
use ratlin::exactalg::serial::{matrix_to_exact, MatrixValue, ScalarValue};
use ratlin::exactalg::{ExactField, Mat, Poly, PolyMatrix, RatFun, RatMatrix, Rational, Scalar};
use ratlin::sysmat::RegionSpec;
use serde::{Deserialize, Serialize};

use crate::config::{BasisName, Sampling};
use crate::error::{CliError, CliResult, Context};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Monomial coefficients `Q_0, Q_1, …` of the polynomial part.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<MatrixValue>>,
    /// `(A_i, B_i)` pairs for a custom basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_pairs: Option<Vec<[MatrixValue; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_basis: Option<CustomBasis>,
    #[serde(default)]
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<PencilProblem>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomBasis {
    pub x: MatrixValue,
    pub y: MatrixValue,
    /// Coefficients (ascending) of each basis polynomial.
    pub f: Vec<Vec<ScalarValue>>,
}

/// `(C - λD) g(λ)`. `g` is a registry function or explicit samples on `Σ`
/// (nonlinear problems), or a known rational function (rational problems).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub c: MatrixValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<MatrixValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<Quotient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barycentric: Option<Barycentric>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quotient {
    pub num: Vec<ScalarValue>,
    pub den: Vec<ScalarValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Barycentric {
    pub supports: Vec<ScalarValue>,
    pub weights: Vec<ScalarValue>,
    pub values: Vec<ScalarValue>,
}

/// Entry of a rational matrix: a scalar or `{"num": [...], "den": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatEntry {
    Scalar(ScalarValue),
    Fraction {
        num: Vec<ScalarValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        den: Option<Vec<ScalarValue>>,
    },
}

pub type RatMatrixValue = Vec<Vec<RatEntry>>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutName {
    #[default]
    Canonical,
    Corner,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionValue {
    /// Everything except the listed points.
    Cofinite { exclude: Vec<ScalarValue> },
    FiniteSet { points: Vec<ScalarValue> },
}

/// A block full rank pencil `L_0 + λL_1` with its block sizes and dual
/// bases, the matrix it should linearize, and the region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilProblem {
    pub coefficients: Vec<MatrixValue>,
    #[serde(default)]
    pub layout: LayoutName,
    pub state_size: usize,
    /// Rows and columns of `M`.
    pub m_shape: [usize; 2],
    pub n1: RatMatrixValue,
    pub n2: RatMatrixValue,
    /// Defaults to the matrix the pencil represents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<RatMatrixValue>,
    pub region: RegionValue,
    /// Also check the condition and linearization at infinity.
    #[serde(default)]
    pub infinity: bool,
}

fn problem_err(m: impl Into<String>) -> CliError {
    CliError::Problem(m.into())
}

pub fn mat_c64(m: &MatrixValue) -> CliResult<Mat<Complex64>> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(problem_err("ragged matrix rows"));
    }
    let rows = m
        .iter()
        .map(|r| r.iter().map(|v| v.to_c64()).collect::<ratlin::Result<Vec<_>>>())
        .collect::<ratlin::Result<Vec<_>>>()
        .context("matrix entry")?;
    Ok(Mat::from_rows(rows))
}

pub fn mat_exact<F: ExactField>(m: &MatrixValue) -> CliResult<Mat<F>> {
    matrix_to_exact(m).context("matrix entry")
}

fn poly_exact<F: ExactField>(c: &[ScalarValue]) -> CliResult<Poly<F>> {
    let coeffs = c.iter().map(|v| v.to_exact()).collect::<ratlin::Result<Vec<F>>>().context("polynomial coefficient")?;
    Ok(Poly::new(coeffs))
}

fn scalars_exact<F: ExactField>(v: &[ScalarValue]) -> CliResult<Vec<F>> {
    v.iter().map(|s| s.to_exact()).collect::<ratlin::Result<Vec<F>>>().context("scalar")
}

pub fn ratmat_exact<F: ExactField>(m: &RatMatrixValue) -> CliResult<RatMatrix<F>> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(problem_err("ragged matrix rows"));
    }
    let mut rows = Vec::with_capacity(m.len());
    for r in m {
        let mut row = Vec::with_capacity(cols);
        for e in r {
            row.push(match e {
                RatEntry::Scalar(s) => RatFun::constant(s.to_exact().context("matrix entry")?),
                RatEntry::Fraction { num, den } => {
                    let d = match den {
                        Some(d) => poly_exact(d)?,
                        None => Poly::constant(F::one()),
                    };
                    RatFun::new(poly_exact(num)?, d).context("rational entry")?
                }
            });
        }
        rows.push(row);
    }
    Ok(Mat::from_rows(rows))
}

impl Problem {
    fn all_scalars<'a>(&'a self) -> Vec<&'a ScalarValue> {
        let mut out: Vec<&ScalarValue> = Vec::new();
        let push_m = |m: &'a MatrixValue| m.iter().flatten();
        for m in self.coefficients.iter().flatten() {
            out.extend(push_m(m));
        }
        for [a, b] in self.basis_pairs.iter().flatten() {
            out.extend(push_m(a));
            out.extend(push_m(b));
        }
        for t in &self.terms {
            out.extend(push_m(&t.c));
            if let Some(d) = &t.d {
                out.extend(push_m(d));
            }
            if let Some(q) = &t.quotient {
                out.extend(q.num.iter().chain(&q.den));
            }
            if let Some(b) = &t.barycentric {
                out.extend(b.supports.iter().chain(&b.weights).chain(&b.values));
            }
        }
        if let Some(p) = &self.pencil {
            for m in &p.coefficients {
                out.extend(push_m(m));
            }
            for rm in [Some(&p.n1), Some(&p.n2), p.target.as_ref()].into_iter().flatten() {
                for e in rm.iter().flatten() {
                    match e {
                        RatEntry::Scalar(s) => out.push(s),
                        RatEntry::Fraction { num, den } => out.extend(num.iter().chain(den.iter().flatten())),
                    }
                }
            }
            match &p.region {
                RegionValue::Cofinite { exclude: v } | RegionValue::FiniteSet { points: v } => out.extend(v),
            }
        }
        out
    }

    /// Whether every scalar has zero imaginary part, so the exact oracle can
    /// work over Q instead of Q(i).
    pub fn is_real(&self) -> CliResult<bool> {
        for s in self.all_scalars() {
            let g = s.to_gauss().context("scalar")?;
            if !g.is_real() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn relation(&self, basis: BasisName) -> CliResult<BasisRelation> {
        match basis {
            BasisName::Custom => {
                let cb = self.custom_basis.as_ref().ok_or_else(|| problem_err("custom basis requested but no custom_basis given"))?;
                let f = cb.f.iter().map(|c| poly_exact::<Rational>(c)).collect::<CliResult<Vec<_>>>()?;
                BasisRelation::custom(mat_exact(&cb.x)?, mat_exact(&cb.y)?, f).context("custom basis")
            }
            BasisName::Monomial | BasisName::Chebyshev => {
                let coeffs = self.coefficients.as_ref().ok_or_else(|| problem_err("no polynomial coefficients"))?;
                let k = coeffs.len().saturating_sub(1).max(1);
                Ok(if basis == BasisName::Monomial { BasisRelation::monomial(k) } else { BasisRelation::chebyshev(k) })
            }
        }
    }

    /// The model `Σ (A_i - λB_i) f_i + Σ (C_i - λD_i) g_i` with matrices
    /// converted by `conv`.
    pub fn cork_model<T: Scalar>(
        &self,
        rel: &BasisRelation,
        conv: impl Fn(&MatrixValue) -> CliResult<Mat<T>>,
    ) -> CliResult<CorkModel<T>> {
        let q: Vec<(Mat<T>, Mat<T>)> = match (&self.basis_pairs, &self.coefficients) {
            (Some(pairs), _) if rel.kind() == ratlin::cork::BasisKind::Custom => {
                pairs.iter().map(|[a, b]| Ok((conv(a)?, conv(b)?))).collect::<CliResult<_>>()?
            }
            (_, Some(coeffs)) if rel.kind() != ratlin::cork::BasisKind::Custom => {
                let mats = coeffs.iter().map(&conv).collect::<CliResult<Vec<_>>>()?;
                if mats.is_empty() {
                    return Err(problem_err("empty coefficient list"));
                }
                rel.coefficients(&mats).context("basis coefficients")?
            }
            _ => return Err(problem_err("polynomial part does not match the basis (coefficients or basis_pairs)")),
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c = conv(&t.c)?;
            let d = match &t.d {
                Some(d) => conv(d)?,
                None => Mat::zeros(c.rows(), c.cols()),
            };
            terms.push((c, d));
        }
        CorkModel::new(q, terms).context("model")
    }

    /// Registry functions for every term, or `None` if some term is given
    /// only by samples.
    pub fn functions(&self) -> CliResult<Option<Vec<ScalarFunction>>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match &t.function {
                Some(name) => out.push(ScalarFunction::parse(name).context("term function")?),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// Exact approximants of the rational terms. A quotient `p/q` uses
    /// `max(deg p, deg q) + 1` integer supports `0, 1, -1, 2, …` avoiding
    /// the roots of `q`.
    pub fn rational_terms<F: ExactField>(&self) -> CliResult<Vec<BarycentricApprox<F>>> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| match (&t.quotient, &t.barycentric) {
                (Some(qt), None) => {
                    let p: Poly<F> = poly_exact(&qt.num)?;
                    let q: Poly<F> = poly_exact(&qt.den)?;
                    if q.degree().is_none() {
                        return Err(problem_err(format!("term {i}: zero denominator")));
                    }
                    let m = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0)) + 1;
                    let supports: Vec<F> = (0i64..)
                        .map(|j| F::from_i64(if j % 2 == 1 { (j + 1) / 2 } else { -j / 2 }))
                        .filter(|z| !q.eval(z).is_zero())
                        .take(m)
                        .collect();
                    BarycentricApprox::from_quotient(supports, &p, &q).context(format!("term {i}"))
                }
                (None, Some(b)) => {
                    BarycentricApprox::new(scalars_exact(&b.supports)?, scalars_exact(&b.weights)?, scalars_exact(&b.values)?)
                        .context(format!("term {i}"))
                }
                _ => Err(problem_err(format!("term {i}: give exactly one of quotient or barycentric"))),
            })
            .collect()
    }

    pub fn pencil_problem(&self) -> CliResult<&PencilProblem> {
        self.pencil.as_ref().ok_or_else(|| problem_err("no pencil to verify"))
    }
}

pub fn approx_to_c64<F: ExactField>(r: &BarycentricApprox<F>) -> CliResult<BarycentricApprox<Complex64>> {
    let f = |v: &[F]| v.iter().map(|x| x.to_c64()).collect::<Vec<_>>();
    BarycentricApprox::new(f(r.supports()), f(r.weights()), f(r.values())).context("approximant")
}

/// The exact data of a pencil problem.
pub struct ExactPencil<F: ExactField> {
    pub parts: BfrParts<F>,
    pub pencil: PolyMatrix<F>,
    pub target: RatMatrix<F>,
    pub region: RegionSpec<F>,
}

impl PencilProblem {
    pub fn exact<F: ExactField>(&self) -> CliResult<ExactPencil<F>> {
        let coeffs = self.coefficients.iter().map(mat_exact::<F>).collect::<CliResult<Vec<_>>>()?;
        let first = coeffs.first().ok_or_else(|| problem_err("pencil has no coefficients"))?;
        let (r, c) = first.shape();
        if coeffs.iter().any(|m| m.shape() != (r, c)) {
            return Err(problem_err("pencil coefficients differ in shape"));
        }
        let pencil: PolyMatrix<F> = Mat::from_fn(r, c, |i, j| Poly::new(coeffs.iter().map(|m| m[(i, j)].clone()).collect()));
        let layout = match self.layout {
            LayoutName::Canonical => Layout::Canonical,
            LayoutName::Corner => Layout::Corner,
        };
        let [mr, mc] = self.m_shape;
        let parts = BfrParts::from_pencil(&pencil, layout, self.state_size, (mr, mc), ratmat_exact(&self.n1)?, ratmat_exact(&self.n2)?)
            .context("pencil blocks")?;
        let target = match &self.target {
            Some(t) => ratmat_exact(t)?,
            None => parts.recover_r().context("represented matrix")?,
        };
        let region = match &self.region {
            RegionValue::Cofinite { exclude } => RegionSpec::Cofinite(scalars_exact(exclude)?),
            RegionValue::FiniteSet { points } => RegionSpec::FiniteSet(scalars_exact(points)?),
        };
        Ok(ExactPencil { parts, pencil, target, region })
    }
}
