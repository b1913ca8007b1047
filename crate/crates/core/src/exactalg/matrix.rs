use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Degree, Poly};
use super::ratfun::RatFun;
use super::scalar::{ExactField, Rational};
use crate::error::{Error, Result};

/// Element type of a [`Mat`].
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

pub type PolyMatrix<F = Rational> = Mat<Poly<F>>;
pub type RatMatrix<F = Rational> = Mat<RatFun<F>>;

impl<E: Ring> Mat<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from nested rows. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_diag(d: Vec<E>) -> Self {
        let n = d.len();
        let mut m = Mat::zeros(n, n);
        for (i, e) in d.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &E> {
        self.data.iter()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&E) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Ring>(&self, f: impl Fn(&E) -> Result<U>) -> Result<Mat<U>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn scale(&self, c: &E) -> Self {
        self.map(|e| e.clone() * c.clone())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self[(rows.start + i, cols.start + j)].clone())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn hstack(parts: &[&Self]) -> Result<Self> {
        let rows = parts.iter().map(|p| p.rows).max().unwrap_or(0);
        if parts.iter().any(|p| p.rows != rows) {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut m = Mat::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            m.set_block(0, off, p);
            off += p.cols;
        }
        Ok(m)
    }

    pub fn vstack(parts: &[&Self]) -> Result<Self> {
        let cols = parts.iter().map(|p| p.cols).max().unwrap_or(0);
        if parts.iter().any(|p| p.cols != cols) {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let rows: usize = parts.iter().map(|p| p.rows).sum();
        let mut m = Mat::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            m.set_block(off, 0, p);
            off += p.rows;
        }
        Ok(m)
    }

    /// Assemble a block matrix. Row heights and column widths are taken from
    /// `row_sizes` / `col_sizes`; `None` blocks are zero.
    pub fn blocks(row_sizes: &[usize], col_sizes: &[usize], grid: &[Vec<Option<&Self>>]) -> Result<Self> {
        let rows: usize = row_sizes.iter().sum();
        let cols: usize = col_sizes.iter().sum();
        let mut m = Mat::zeros(rows, cols);
        let mut r0 = 0;
        for (bi, line) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (bj, block) in line.iter().enumerate() {
                if let Some(b) = block {
                    if b.shape() != (row_sizes[bi], col_sizes[bj]) {
                        return Err(Error::DimensionMismatch(format!(
                            "block ({bi},{bj}) is {}x{}, expected {}x{}",
                            b.rows, b.cols, row_sizes[bi], col_sizes[bj]
                        )));
                    }
                    m.set_block(r0, c0, b);
                }
                c0 += col_sizes[bj];
            }
            r0 += row_sizes[bi];
        }
        Ok(m)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = other.shape();
        Mat::from_fn(self.rows * p, self.cols * q, |i, j| {
            self[(i / p, j / q)].clone() * other[(i % p, j % q)].clone()
        })
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out: Mat<E> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch("sum of differently shaped matrices".into()));
        }
        Ok(Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + rhs[(i, j)].clone()))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&-rhs.clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<E> Index<(usize, usize)> for Mat<E> {
    type Output = E;

    fn index(&self, (i, j): (usize, usize)) -> &E {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Mat<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Ring> Neg for Mat<E> {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|e| -e.clone())
    }
}

/// Panicking operator forms; use the `try_` methods for fallible shapes.
impl<E: Ring> Mul for &Mat<E> {
    type Output = Mat<E>;

    fn mul(self, rhs: Self) -> Mat<E> {
        self.try_mul(rhs).expect("matrix product shape")
    }
}

impl<E: Ring> Add for &Mat<E> {
    type Output = Mat<E>;

    fn add(self, rhs: Self) -> Mat<E> {
        self.try_add(rhs).expect("matrix sum shape")
    }
}

impl<E: Ring> Sub for &Mat<E> {
    type Output = Mat<E>;

    fn sub(self, rhs: Self) -> Mat<E> {
        self.try_sub(rhs).expect("matrix difference shape")
    }
}

impl<F: ExactField> Mat<F> {
    pub fn to_poly(&self) -> PolyMatrix<F> {
        self.map(|e| Poly::constant(e.clone()))
    }
}

impl<F: ExactField> PolyMatrix<F> {
    /// `a0 + λ·a1`.
    pub fn pencil(a0: &Mat<F>, a1: &Mat<F>) -> Self {
        Mat::from_fn(a0.rows, a0.cols, |i, j| Poly::new(vec![a0[(i, j)].clone(), a1[(i, j)].clone()]))
    }

    pub fn degree(&self) -> Degree {
        self.entries().map(|p| p.deg()).max().unwrap_or(Degree::NegInfinity)
    }

    /// Coefficient matrix of `λ^k`.
    pub fn coeff(&self, k: usize) -> Mat<F> {
        self.map(|p| p.coeff(k))
    }

    pub fn eval(&self, x: &F) -> Mat<F> {
        self.map(|p| p.eval(x))
    }

    pub fn to_rat(&self) -> RatMatrix<F> {
        self.map(|p| RatFun::from_poly(p.clone()))
    }

    pub fn reverse(&self, g: i64) -> RatMatrix<F> {
        self.map(|p| p.reverse(g))
    }

    /// Degree of each row (maximum entry degree).
    pub fn row_degrees(&self) -> Vec<Degree> {
        (0..self.rows()).map(|i| self.row(i).iter().map(|p| p.deg()).max().unwrap_or(Degree::NegInfinity)).collect()
    }
}

impl<F: ExactField> RatMatrix<F> {
    /// Maximum entry degree; error if every entry is zero.
    pub fn degree(&self) -> Result<i64> {
        self.entries()
            .filter_map(|r| r.degree().finite())
            .max()
            .ok_or(Error::AllZeroMatrix)
    }

    pub fn eval(&self, x: &F) -> Result<Mat<F>> {
        self.try_map(|r| r.eval(x))
    }

    pub fn is_defined_at(&self, x: &F) -> bool {
        self.entries().all(|r| r.is_defined_at(x))
    }

    pub fn reverse(&self, g: i64) -> Self {
        self.map(|r| r.reverse(g))
    }

    /// Monic lcm of all entry denominators.
    pub fn common_denominator(&self) -> Poly<F> {
        self.entries().fold(Poly::one(), |acc, r| acc.lcm(r.den()))
    }

    /// `(N, d)` with `self = N / d`, `d` the monic lcm of denominators.
    pub fn split_denominator(&self) -> (PolyMatrix<F>, Poly<F>) {
        let d = self.common_denominator();
        let n = self.map(|r| r.num().clone() * d.exact_div(r.den()).unwrap());
        (n, d)
    }

    /// `Some` if every entry is a polynomial.
    pub fn to_poly(&self) -> Option<PolyMatrix<F>> {
        self.entries().all(|r| r.is_poly()).then(|| {
            self.map(|r| {
                let c = r.den().coeff(0);
                r.num().scale(&(F::one() / c))
            })
        })
    }

    pub fn row_degrees(&self) -> Vec<Degree> {
        (0..self.rows())
            .map(|i| self.row(i).iter().map(|r| r.degree()).max().unwrap_or(Degree::NegInfinity))
            .collect()
    }
}

impl<E: Ring + fmt::Display> fmt::Display for Mat<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}
