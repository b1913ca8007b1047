//! Text forms of scalars: exact rationals as `"num/den"` strings (or a pair
//! of them for Gaussian rationals) and complex doubles as `[re, im]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Mat;
use super::scalar::{format_rational, parse_rational, rational_to_f64, ExactField, GaussRational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarValue {
    Exact(String),
    ExactPair([String; 2]),
    Real(f64),
    Complex([f64; 2]),
}

impl ScalarValue {
    pub fn from_exact<F: ExactField>(x: &F) -> Self {
        let (re, im) = x.parts();
        if x.is_real() {
            ScalarValue::Exact(format_rational(&re))
        } else {
            ScalarValue::ExactPair([format_rational(&re), format_rational(&im)])
        }
    }

    pub fn from_c64(z: Complex64) -> Self {
        ScalarValue::Complex([z.re, z.im])
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarValue::Exact(_) | ScalarValue::ExactPair(_))
    }

    /// Exact value. Floats convert exactly (they are dyadic rationals).
    pub fn to_gauss(&self) -> Result<GaussRational> {
        let bad = || Error::NotRepresentable(format!("{self:?}"));
        let parse = |s: &str| parse_rational(s).ok_or_else(bad);
        match self {
            ScalarValue::Exact(s) => Ok(GaussRational::new(parse(s)?, Rational::from_i64(0))),
            ScalarValue::ExactPair([a, b]) => Ok(GaussRational::new(parse(a)?, parse(b)?)),
            ScalarValue::Real(x) => GaussRational::from_c64(Complex64::new(*x, 0.0)).ok_or_else(bad),
            ScalarValue::Complex([a, b]) => GaussRational::from_c64(Complex64::new(*a, *b)).ok_or_else(bad),
        }
    }

    pub fn to_exact<F: ExactField>(&self) -> Result<F> {
        let g = self.to_gauss()?;
        F::from_parts(g.re, g.im).ok_or_else(|| Error::NotRepresentable(format!("{self:?}")))
    }

    pub fn to_c64(&self) -> Result<Complex64> {
        match self {
            ScalarValue::Real(x) => Ok(Complex64::new(*x, 0.0)),
            ScalarValue::Complex([a, b]) => Ok(Complex64::new(*a, *b)),
            _ => {
                let g = self.to_gauss()?;
                Ok(Complex64::new(rational_to_f64(&g.re), rational_to_f64(&g.im)))
            }
        }
    }
}

pub type MatrixValue = Vec<Vec<ScalarValue>>;

pub fn matrix_to_exact<F: ExactField>(m: &MatrixValue) -> Result<Mat<F>> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    let rows = m
        .iter()
        .map(|r| r.iter().map(|v| v.to_exact()).collect::<Result<Vec<F>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_rows(rows))
}

pub fn matrix_from_exact<F: ExactField>(m: &Mat<F>) -> MatrixValue {
    (0..m.rows()).map(|i| m.row(i).iter().map(ScalarValue::from_exact).collect()).collect()
}
