//! Complex QZ iteration for the generalized eigenvalues of `A - λB`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

type M = DMatrix<Complex64>;

/// `(c, s)` with `[c s; -s̄ c] [x; y] = [r; 0]`, `c` real.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y.is_zero() {
        return (1.0, Complex64::zero());
    }
    if x.is_zero() {
        return (0.0, y.conj() / y.norm());
    }
    let norm = x.norm().hypot(y.norm());
    (x.norm() / norm, (x / x.norm()) * y.conj() / norm)
}

/// Rows `i`, `j` ← `[c s; -s̄ c]` applied from the left, columns `cols`.
fn rotate_rows(m: &mut M, i: usize, j: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for k in cols {
        let (u, v) = (m[(i, k)], m[(j, k)]);
        m[(i, k)] = u * c + s * v;
        m[(j, k)] = -s.conj() * u + v * c;
    }
}

/// Columns: `q ← c·q + s·p`, `p ← -s̄·q + c·p` on rows `rows`. With `(c, s)`
/// from `givens(m[r][q], m[r][p])` this zeroes `m[r][p]`.
fn rotate_cols(m: &mut M, p: usize, q: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for k in rows {
        let (vp, vq) = (m[(k, p)], m[(k, q)]);
        m[(k, q)] = vq * c + s * vp;
        m[(k, p)] = -s.conj() * vq + vp * c;
    }
}

fn zero_left(a: &mut M, b: &mut M, i: usize, j: usize, col: usize) {
    let n = a.nrows();
    let (c, s) = givens(a[(i, col)], a[(j, col)]);
    rotate_rows(a, i, j, c, s, 0..n);
    rotate_rows(b, i, j, c, s, 0..n);
    a[(j, col)] = Complex64::zero();
}

/// Zero `b[row][p]` against `b[row][q]` by a column rotation.
fn zero_right_b(a: &mut M, b: &mut M, row: usize, p: usize, q: usize) {
    let n = a.nrows();
    let (c, s) = givens(b[(row, q)], b[(row, p)]);
    rotate_cols(a, p, q, c, s, 0..n);
    rotate_cols(b, p, q, c, s, 0..n);
    b[(row, p)] = Complex64::zero();
}

fn fro(m: &M) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Generalized Schur pairs `(α_k, β_k)`, eigenvalues `α_k/β_k`.
pub(crate) fn qz_pairs(a: &M, b: &M) -> Vec<(Complex64, Complex64)> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let qr = b.clone().qr();
    let mut a = qr.q().adjoint() * a;
    let mut b = qr.r();
    for i in 0..n {
        for j in 0..i {
            b[(i, j)] = Complex64::zero();
        }
    }

    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            zero_left(&mut a, &mut b, i - 1, i, j);
            zero_right_b(&mut a, &mut b, i, i - 1, i);
        }
    }

    let eps = f64::EPSILON;
    let anorm = fro(&a).max(f64::MIN_POSITIVE);
    let bnorm = fro(&b).max(f64::MIN_POSITIVE);
    let mut ihi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while ihi > 0 && total < 100 * n.max(10) {
        let mut l = ihi;
        while l > 0 {
            let sub = a[(l, l - 1)].norm();
            if sub <= eps * (a[(l - 1, l - 1)].norm() + a[(l, l)].norm()) || sub <= eps * anorm {
                a[(l, l - 1)] = Complex64::zero();
                break;
            }
            l -= 1;
        }
        if l == ihi {
            ihi -= 1;
            iter = 0;
            continue;
        }
        if let Some(k) = (l..=ihi).find(|&k| b[(k, k)].norm() <= eps * bnorm) {
            b[(k, k)] = Complex64::zero();
            for j in (l + 1..=k).rev() {
                zero_right_b(&mut a, &mut b, j - 1, j - 1, j);
                if j < ihi {
                    zero_left(&mut a, &mut b, j, j + 1, j - 1);
                }
            }
            zero_left(&mut a, &mut b, l, l + 1, l);
            total += 1;
            continue;
        }

        iter += 1;
        total += 1;
        let shift = if iter % 11 == 10 {
            a[(ihi, ihi)] / b[(ihi, ihi)] + Complex64::new(0.7, 0.3) * a[(ihi, ihi - 1)].norm() / b[(ihi - 1, ihi - 1)].norm()
        } else {
            wilkinson_shift(&a, &b, ihi)
        };
        let x = a[(l, l)] - shift * b[(l, l)];
        let y = a[(l + 1, l)];
        let (c, s) = givens(x, y);
        rotate_rows(&mut a, l, l + 1, c, s, 0..n);
        rotate_rows(&mut b, l, l + 1, c, s, 0..n);
        for j in l..ihi {
            zero_right_b(&mut a, &mut b, j + 1, j, j + 1);
            if j + 2 <= ihi {
                zero_left(&mut a, &mut b, j + 1, j + 2, j);
            }
        }
    }
    (0..n).map(|k| (a[(k, k)], b[(k, k)])).collect()
}

/// Eigenvalue of the trailing 2×2 pencil closest to `a_kk/b_kk`.
fn wilkinson_shift(a: &M, b: &M, k: usize) -> Complex64 {
    let (a11, a12, a21, a22) = (a[(k - 1, k - 1)], a[(k - 1, k)], a[(k, k - 1)], a[(k, k)]);
    let (b11, b12, b22) = (b[(k - 1, k - 1)], b[(k - 1, k)], b[(k, k)]);
    let qa = b11 * b22;
    let qb = -(a11 * b22 + a22 * b11 - a21 * b12);
    let qc = a11 * a22 - a12 * a21;
    let rayleigh = a22 / b22;
    let disc = (qb * qb - qa * qc * 4.0).sqrt();
    let candidates = [(-qb + disc) / (qa * 2.0), (-qb - disc) / (qa * 2.0)];
    candidates
        .into_iter()
        .filter(|z| z.is_finite())
        .min_by(|x, y| (x - rayleigh).norm().total_cmp(&(y - rayleigh).norm()))
        .unwrap_or(rayleigh)
}
