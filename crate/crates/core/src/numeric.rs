//! Bridges between [`Mat<Complex64>`] and nalgebra for the floating-point
//! side: norms, singular values and null vectors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::exactalg::Mat;

pub(crate) fn to_dmatrix(m: &Mat<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn frobenius_norm(m: &Mat<Complex64>) -> f64 {
    m.entries().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn mat_vec(m: &Mat<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.rows()).map(|i| m.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Mat<Complex64>) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = to_dmatrix(m).singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Unit vector spanning the direction of least gain, `argmin ‖m v‖`.
pub fn null_vector(m: &Mat<Complex64>) -> Vec<Complex64> {
    let cols = m.cols();
    let rows = m.rows().max(cols);
    let a = DMatrix::from_fn(rows, cols, |i, j| if i < m.rows() { m[(i, j)] } else { Complex64::new(0.0, 0.0) });
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;
    let i = (0..sv.len()).min_by(|&a, &b| sv[a].total_cmp(&sv[b])).expect("nonempty matrix");
    let mut v: Vec<Complex64> = (0..cols).map(|j| vt[(i, j)].conj()).collect();
    if let Some(big) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        let phase = big.conj() / big.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    v
}

/// Orthonormal basis of the row space of `m` (as columns, `cols × k`) with
/// the rank `k` decided by `σ > tol·σ_max`.
pub fn row_space_basis(m: &Mat<Complex64>, tol: f64) -> Mat<Complex64> {
    let cols = m.cols();
    if m.rows() == 0 || cols == 0 {
        return Mat::zeros(cols, 0);
    }
    let svd = to_dmatrix(m).svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..sv.len()).filter(|&i| smax > 0.0 && sv[i] > tol * smax).collect();
    idx.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));
    Mat::from_fn(cols, idx.len(), |r, c| vt[(idx[c], r)].conj())
}
