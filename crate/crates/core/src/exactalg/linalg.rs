//! Exact linear algebra over a field (constants or rational functions) and
//! fraction-free elimination over polynomial rings.

use std::ops::Div;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{Mat, PolyMatrix, RatMatrix, Ring};
use super::poly::Poly;
use super::scalar::{ExactField, Rational};
use crate::error::{Error, Result};

/// Ring element with exact division by nonzero elements.
pub trait FieldElem: Ring + Div<Output = Self> {}

impl<T: Ring + Div<Output = T>> FieldElem for T {}

/// Reduced row echelon form and the pivot columns.
pub fn rref<E: FieldElem>(m: &Mat<E>) -> (Mat<E>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = E::one() / a[(r, c)].clone();
        for j in c..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[(i, c)].is_zero() {
                let f = a[(i, c)].clone();
                for j in c..cols {
                    let v = a[(r, j)].clone();
                    if !v.is_zero() {
                        a[(i, j)] = a[(i, j)].clone() - f.clone() * v;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<E: FieldElem>(m: &Mat<E>) -> usize {
    rref(m).1.len()
}

/// Basis of the right nullspace `{x : m x = 0}`, one basis vector per row.
pub fn nullspace<E: FieldElem>(m: &Mat<E>) -> Mat<E> {
    let (r, pivots) = rref(m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    Mat::from_fn(free.len(), cols, |k, j| {
        let f = free[k];
        if j == f {
            E::one()
        } else if let Some(pi) = pivots.iter().position(|&p| p == j) {
            -r[(pi, f)].clone()
        } else {
            E::zero()
        }
    })
}

/// One solution of `m x = b` (free variables set to zero).
pub fn solve<E: FieldElem>(m: &Mat<E>, b: &Mat<E>) -> Result<Mat<E>> {
    if m.rows() != b.rows() {
        return Err(Error::DimensionMismatch("right-hand side rows".into()));
    }
    let aug = Mat::hstack(&[m, b])?;
    let (r, pivots) = rref(&aug);
    if pivots.iter().any(|&p| p >= m.cols()) {
        return Err(Error::SingularMatrix);
    }
    let mut x = Mat::zeros(m.cols(), b.cols());
    for (i, &p) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x[(p, j)] = r[(i, m.cols() + j)].clone();
        }
    }
    Ok(x)
}

pub fn inverse<E: FieldElem>(m: &Mat<E>) -> Result<Mat<E>> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::NonSquare { rows: n, cols: m.cols() });
    }
    let aug = Mat::hstack(&[m, &Mat::identity(n)])?;
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::SingularMatrix);
    }
    Ok(r.submatrix(0..n, n..2 * n))
}

/// Determinant by elimination over a field.
pub fn det<E: FieldElem>(m: &Mat<E>) -> Result<E> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::NonSquare { rows: n, cols: m.cols() });
    }
    let mut a = m.clone();
    let mut d = E::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Ok(E::zero());
        };
        if p != c {
            a.swap_rows(p, c);
            d = -d;
        }
        let piv = a[(c, c)].clone();
        d = d * piv.clone();
        for i in c + 1..n {
            if !a[(i, c)].is_zero() {
                let f = a[(i, c)].clone() / piv.clone();
                for j in c..n {
                    a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
                }
            }
        }
    }
    Ok(d)
}

/// Fraction-free (Bareiss) elimination over `F[λ]`. Returns the rank and,
/// for square full-rank input, the determinant (zero otherwise).
pub fn bareiss<F: ExactField>(m: &PolyMatrix<F>) -> (usize, Poly<F>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut prev = Poly::one();
    let mut sign = true;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // lowest-degree pivot keeps intermediate degrees small
        let Some(p) = (r..rows)
            .filter(|&i| !a[(i, c)].is_zero())
            .min_by_key(|&i| a[(i, c)].degree())
        else {
            continue;
        };
        if p != r {
            a.swap_rows(p, r);
            sign = !sign;
        }
        let piv = a[(r, c)].clone();
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = piv.clone() * a[(i, j)].clone() - a[(i, c)].clone() * a[(r, j)].clone();
                a[(i, j)] = v.exact_div(&prev).expect("Bareiss division is exact");
            }
            a[(i, c)] = Poly::zero();
        }
        prev = piv;
        r += 1;
    }
    let det = if rows == cols && r == rows {
        let d = a[(rows - 1, cols - 1)].clone();
        if sign {
            d
        } else {
            -d
        }
    } else {
        Poly::zero()
    };
    (r, det)
}

/// Fraction-free solve of `A X = B` over `F[λ]` for square nonsingular `A`.
/// Returns `(Y, d)` with `X = Y / d` and `d = ±det A`.
pub fn poly_solve<F: ExactField>(a: &PolyMatrix<F>, b: &PolyMatrix<F>) -> Result<(PolyMatrix<F>, Poly<F>)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::NonSquare { rows: n, cols: a.cols() });
    }
    if b.rows() != n {
        return Err(Error::DimensionMismatch("right-hand side rows".into()));
    }
    let k = b.cols();
    if n == 0 {
        return Ok((Mat::zeros(0, k), Poly::one()));
    }
    let mut u = Mat::hstack(&[a, b])?;
    let cols = n + k;
    let mut prev = Poly::one();
    for c in 0..n {
        let Some(p) = (c..n)
            .filter(|&i| !u[(i, c)].is_zero())
            .min_by_key(|&i| u[(i, c)].degree())
        else {
            return Err(Error::SingularMatrix);
        };
        u.swap_rows(p, c);
        let piv = u[(c, c)].clone();
        for i in c + 1..n {
            for j in c + 1..cols {
                let v = piv.clone() * u[(i, j)].clone() - u[(i, c)].clone() * u[(c, j)].clone();
                u[(i, j)] = v.exact_div(&prev).expect("Bareiss division is exact");
            }
            u[(i, c)] = Poly::zero();
        }
        prev = piv;
    }
    let d = u[(n - 1, n - 1)].clone();
    let mut y: PolyMatrix<F> = Mat::zeros(n, k);
    for i in (0..n).rev() {
        for j in 0..k {
            let mut acc = d.clone() * u[(i, n + j)].clone();
            for l in i + 1..n {
                if !u[(i, l)].is_zero() {
                    acc = acc - u[(i, l)].clone() * y[(l, j)].clone();
                }
            }
            y[(i, j)] = acc.exact_div(&u[(i, i)]).expect("back substitution is exact");
        }
    }
    Ok((y, d))
}

pub fn poly_det<F: ExactField>(m: &PolyMatrix<F>) -> Result<Poly<F>> {
    if m.rows() != m.cols() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() == 0 {
        return Ok(Poly::one());
    }
    Ok(bareiss(m).1)
}

/// Deterministic pseudo-random rational points used by the evaluation fast
/// path of [`normal_rank`].
pub(crate) fn probe_points(seed: u64, count: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n: i64 = rng.gen_range(-997..=997);
            let d: i64 = rng.gen_range(1..=101);
            Rational::new(n.into(), d.into())
        })
        .collect()
}

/// Rank over `F(λ)` of a polynomial matrix.
pub fn poly_normal_rank<F: ExactField>(m: &PolyMatrix<F>) -> usize {
    let full = m.rows().min(m.cols());
    if full == 0 {
        return 0;
    }
    for x in probe_points(0x5eed, 2) {
        let x = F::from_rational(x);
        if rank(&m.eval(&x)) == full {
            return full;
        }
    }
    bareiss(m).0
}

/// Rank over `F(λ)`: denominators are cleared row by row, then the
/// polynomial matrix goes through fraction-free elimination. A seeded
/// rational evaluation short-circuits the generic full-rank case.
pub fn normal_rank<F: ExactField>(r: &RatMatrix<F>) -> usize {
    let full = r.rows().min(r.cols());
    if full == 0 {
        return 0;
    }
    for x in probe_points(0x5eed, 2) {
        let x = F::from_rational(x);
        if let Ok(v) = r.eval(&x) {
            if rank(&v) == full {
                return full;
            }
        }
    }
    bareiss(&clear_row_denominators(r)).0
}

/// Multiply each row by the lcm of its denominators.
pub fn clear_row_denominators<F: ExactField>(r: &RatMatrix<F>) -> PolyMatrix<F> {
    let mut out = Mat::zeros(r.rows(), r.cols());
    for i in 0..r.rows() {
        let d = r.row(i).iter().fold(Poly::one(), |acc, e| acc.lcm(e.den()));
        for j in 0..r.cols() {
            let e = &r[(i, j)];
            out[(i, j)] = e.num().clone() * d.exact_div(e.den()).unwrap();
        }
    }
    out
}

/// Rational nullspace basis with polynomial, primitive rows: each basis row
/// is scaled by the lcm of its denominators and divided by the gcd of its
/// entries.
pub fn polynomial_nullspace<F: ExactField>(m: &RatMatrix<F>) -> PolyMatrix<F> {
    let ns = nullspace(m);
    let rows = clear_row_denominators(&ns);
    let mut out = rows.clone();
    for i in 0..rows.rows() {
        let g = rows.row(i).iter().fold(Poly::zero(), |acc, e| acc.gcd(e));
        for j in 0..rows.cols() {
            out[(i, j)] = rows[(i, j)].exact_div(&g).unwrap();
        }
    }
    out
}
