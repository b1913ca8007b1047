//! Dense generalized eigenvalues of assembled pencils, eigenvector recovery
//! from CORK pencils, residuals and region filtering.

mod qz;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aaa::{BarycentricApprox, ScalarFunction};
use crate::cork::{BasisRelation, CorkModel, CorkPencil};
use crate::error::{Error, Result};
use crate::exactalg::roots::numeric_roots;
use crate::exactalg::{ExactField, Mat, PolyMatrix};
use crate::numeric::{frobenius_norm, mat_vec, null_vector, to_dmatrix, vector_norm};

/// `|β| ≤ INFINITE_TOL·|α|` marks an infinite eigenvalue.
const INFINITE_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EigenValue {
    Finite(Complex64),
    Infinite,
}

impl EigenValue {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            EigenValue::Finite(z) => Some(*z),
            EigenValue::Infinite => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Not yet checked against a rational matrix.
    Unclassified,
    /// A zero of `R`: `R(λ0) v = 0` with `λ0` not a pole.
    Eigenvalue,
    /// Coincides with an eigenvalue of the state block.
    Pole,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Unclassified => "unclassified",
            Classification::Eigenvalue => "eigenvalue",
            Classification::Pole => "pole",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub value: EigenValue,
    /// Unit right eigenvector of the pencil.
    pub right_vector: Vec<Complex64>,
    pub recovered_vector: Option<Vec<Complex64>>,
    /// After [`qz_solve`] the pencil backward error
    /// `‖(A0 + λA1) v‖ / ((‖A0‖_F + |λ| ‖A1‖_F) ‖v‖)`; after
    /// [`recover_and_filter`] the residual against `R`; absent at poles.
    pub residual: Option<f64>,
    pub classification: Classification,
}

/// Relative residual `‖M v‖ / (‖M‖_F ‖v‖)`.
pub fn relative_residual(m: &Mat<Complex64>, v: &[Complex64]) -> f64 {
    let scale = frobenius_norm(m) * vector_norm(v);
    if scale == 0.0 {
        return 0.0;
    }
    vector_norm(&mat_vec(m, v)) / scale
}

/// All generalized eigenvalues of `A0 + λA1` (QZ on `(A0, -A1)`), infinite
/// ones included, with right eigenvectors.
pub fn qz_solve(a0: &Mat<Complex64>, a1: &Mat<Complex64>) -> Result<Vec<Eigenpair>> {
    let (r, c) = a0.shape();
    if r != c {
        return Err(Error::NonSquare { rows: r, cols: c });
    }
    if a1.shape() != (r, c) {
        return Err(Error::DimensionMismatch(format!("{r}×{c} and {}×{} coefficients", a1.rows(), a1.cols())));
    }
    let minus_a1 = -a1.clone();
    let pairs = qz::qz_pairs(&to_dmatrix(a0), &to_dmatrix(&minus_a1));
    Ok(pairs
        .into_iter()
        .map(|(alpha, beta)| {
            if beta.norm() <= INFINITE_TOL * alpha.norm() {
                let v = null_vector(a1);
                let residual = relative_residual(a1, &v);
                Eigenpair { value: EigenValue::Infinite, right_vector: v, recovered_vector: None, residual: Some(residual), classification: Classification::Unclassified }
            } else {
                let lambda = alpha / beta;
                let m = a0 + &a1.scale(&lambda);
                let v = null_vector(&m);
                let scale = (frobenius_norm(a0) + lambda.norm() * frobenius_norm(a1)) * vector_norm(&v);
                let residual = if scale == 0.0 { 0.0 } else { vector_norm(&mat_vec(&m, &v)) / scale };
                Eigenpair { value: EigenValue::Finite(lambda), right_vector: v, recovered_vector: None, residual: Some(residual), classification: Classification::Unclassified }
            }
        })
        .collect())
}

/// [`qz_solve`] for an exact or floating pencil given as a polynomial matrix.
pub fn qz_solve_pencil<F: ExactField>(l: &PolyMatrix<F>) -> Result<Vec<Eigenpair>> {
    let (r, c) = l.shape();
    if r != c {
        return Err(Error::NonSquare { rows: r, cols: c });
    }
    if l.degree().finite().is_some_and(|d| d > 1) {
        return Err(Error::DimensionMismatch("not a pencil".into()));
    }
    qz_solve(&l.coeff(0).map(|v| v.to_c64()), &l.coeff(1).map(|v| v.to_c64()))
}

/// [`qz_solve`] for a CORK pencil `A - λB`.
pub fn solve_cork(pencil: &CorkPencil) -> Result<Vec<Eigenpair>> {
    qz_solve(&pencil.a, &-pencil.b.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TargetRegion {
    All,
    Disc { center: Complex64, radius: f64 },
    Rectangle { re_min: f64, re_max: f64, im_min: f64, im_max: f64 },
}

impl TargetRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            TargetRegion::All => true,
            TargetRegion::Disc { center, radius } => (z - center).norm() <= radius,
            TargetRegion::Rectangle { re_min, re_max, im_min, im_max } => {
                (re_min..=re_max).contains(&z.re) && (im_min..=im_max).contains(&z.im)
            }
        }
    }
}

/// Eigenvalues of the state blocks: the roots of every `q_i`.
pub fn state_eigenvalues(approxs: &[BarycentricApprox]) -> Vec<Complex64> {
    approxs.iter().flat_map(|r| numeric_roots(&r.quotient().1)).collect()
}

fn is_pole(lambda: Complex64, poles: &[Complex64]) -> bool {
    poles.iter().any(|p| (lambda - p).norm() <= 1e-8 * p.norm().max(1.0))
}

/// Keep finite pairs inside `region`, recover `x` as the leading `n` block of
/// the pencil eigenvector, flag state-block eigenvalues as poles and compute
/// the residual of the rest against `R`. Sorted by real, then imaginary part.
pub fn recover_and_filter(
    pairs: &[Eigenpair],
    pencil: &CorkPencil,
    model: &CorkModel,
    rel: &BasisRelation,
    approxs: &[BarycentricApprox],
    region: &TargetRegion,
) -> Vec<Eigenpair> {
    let n = pencil.n;
    let poles = state_eigenvalues(approxs);
    let mut out: Vec<Eigenpair> = pairs
        .iter()
        .filter_map(|pair| {
            let lambda = pair.value.finite()?;
            if !region.contains(lambda) {
                return None;
            }
            let head = &pair.right_vector[..n];
            let norm = vector_norm(head);
            let x: Vec<Complex64> = if norm > 0.0 { head.iter().map(|z| z / norm).collect() } else { head.to_vec() };
            let mut pair = pair.clone();
            let r = (!is_pole(lambda, &poles)).then(|| model.eval_approx(rel, approxs, lambda)).flatten();
            match r {
                Some(r) => {
                    pair.residual = Some(relative_residual(&r, &x));
                    pair.classification = Classification::Eigenvalue;
                }
                None => {
                    pair.residual = None;
                    pair.classification = Classification::Pole;
                }
            }
            pair.recovered_vector = Some(x);
            Some(pair)
        })
        .collect();
    out.sort_by(|a, b| {
        let (x, y) = (a.value.finite().unwrap_or_default(), b.value.finite().unwrap_or_default());
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    out
}

/// `F(λ) = Σ (A_i - λB_i) f_i(λ) + Σ (C_i - λD_i) g_i(λ)` with registry
/// functions `g_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct NlepModel {
    pub model: CorkModel,
    pub relation: BasisRelation,
    pub functions: Vec<ScalarFunction>,
}

impl NlepModel {
    pub fn new(model: CorkModel, relation: BasisRelation, functions: Vec<ScalarFunction>) -> Result<Self> {
        if functions.len() != model.terms().len() {
            return Err(Error::DimensionMismatch(format!("{} terms but {} functions", model.terms().len(), functions.len())));
        }
        if model.q().len() != relation.k() {
            return Err(Error::DimensionMismatch(format!("{} polynomial terms for a basis of size {}", model.q().len(), relation.k())));
        }
        Ok(NlepModel { model, relation, functions })
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Mat<Complex64>> {
        let g = self.functions.iter().map(|f| f.eval(lambda)).collect::<Result<Vec<_>>>()?;
        Ok(self.model.eval_with(&self.relation, &g, lambda))
    }
}

/// `‖F(λ0) v‖ / (‖F(λ0)‖_F ‖v‖)`.
pub fn residual_against_nonlinear(model: &NlepModel, lambda: Complex64, v: &[Complex64]) -> Result<f64> {
    Ok(relative_residual(&model.eval(lambda)?, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cork::{build_cork, build_cork_aaa};
    use crate::exactalg::{Poly, Rational};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cm(rows: &[&[f64]]) -> Mat<Complex64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
    }

    fn finite_sorted(pairs: &[Eigenpair]) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = pairs.iter().filter_map(|p| p.value.finite()).collect();
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v
    }

    #[test]
    fn diagonal_pencil() {
        let pairs = qz_solve(&cm(&[&[-1.0, 0.0], &[0.0, -2.0]]), &cm(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        let ev = finite_sorted(&pairs);
        assert!((ev[0] - 1.0).norm() < 1e-14 && (ev[1] - 2.0).norm() < 1e-14);
        assert!(pairs.iter().all(|p| p.residual.unwrap() < 1e-14));
    }

    #[test]
    fn singular_leading_coefficient_gives_infinity() {
        let pairs = qz_solve(&cm(&[&[0.0, 0.0], &[0.0, 1.0]]), &cm(&[&[1.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(pairs.iter().filter(|p| p.value == EigenValue::Infinite).count(), 1);
        assert!(finite_sorted(&pairs)[0].norm() < 1e-14);
    }

    #[test]
    fn non_square_rejected() {
        let a = Mat::<Complex64>::zeros(2, 3);
        assert!(matches!(qz_solve(&a, &a), Err(Error::NonSquare { rows: 2, cols: 3 })));
    }

    #[test]
    fn companion_roots() {
        // λ^4 - 10λ^3 + 35λ^2 - 50λ + 24 = (λ-1)(λ-2)(λ-3)(λ-4)
        let coeffs = [24.0, -50.0, 35.0, -10.0];
        let a = Mat::from_fn(4, 4, |i, j| if i == j + 1 { c(1.0) } else if j == 3 { c(-coeffs[i]) } else { c(0.0) });
        let pairs = qz_solve(&-a, &Mat::identity(4)).unwrap();
        let ev = finite_sorted(&pairs);
        for (k, z) in ev.iter().enumerate() {
            assert!((z - (k as f64 + 1.0)).norm() < 1e-10, "{z}");
        }
    }

    #[test]
    fn complex_eigenvalues_and_several_infinite() {
        // rotation block with ±i, plus two infinite eigenvalues (B singular)
        let a = cm(&[&[0.0, -1.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 2.0], &[0.0, 0.0, 0.0, 1.0]]);
        let b = cm(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.0]]);
        let pairs = qz_solve(&a, &-b).unwrap();
        assert_eq!(pairs.iter().filter(|p| p.value == EigenValue::Infinite).count(), 2);
        let mut ims: Vec<f64> = finite_sorted(&pairs).iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && (ims[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_pencil_entry_point() {
        let l: PolyMatrix<Rational> = PolyMatrix::pencil(
            &Mat::from_diag(vec![Rational::from_integer((-3).into()), Rational::from_integer(5.into())]),
            &Mat::identity(2),
        );
        let ev = finite_sorted(&qz_solve_pencil(&l).unwrap());
        assert!((ev[0] + 5.0).norm() < 1e-14 && (ev[1] - 3.0).norm() < 1e-14);
    }

    fn planted_zero_model() -> (CorkModel, BasisRelation) {
        // R(λ) = diag(λ - 2, 1) + 0·r(λ)
        let q0 = cm(&[&[-2.0, 0.0], &[0.0, 1.0]]);
        let b0 = cm(&[&[-1.0, 0.0], &[0.0, 0.0]]);
        let z = Mat::zeros(2, 2);
        (CorkModel::new(vec![(q0, b0)], vec![(z.clone(), z)]).unwrap(), BasisRelation::monomial(1))
    }

    fn pole_at_three() -> BarycentricApprox {
        let p = Poly::new(vec![c(1.0)]);
        let q = Poly::new(vec![c(-3.0), c(1.0)]);
        BarycentricApprox::from_quotient(vec![c(0.0), c(1.0)], &p, &q).unwrap()
    }

    #[test]
    fn planted_zero_is_recovered() {
        let (model, rel) = planted_zero_model();
        let approxs = vec![pole_at_three()];
        let pencil = build_cork_aaa(&model, &approxs, &rel).unwrap();
        let pairs = solve_cork(&pencil).unwrap();
        let kept = recover_and_filter(&pairs, &pencil, &model, &rel, &approxs, &TargetRegion::All);
        let zeros: Vec<&Eigenpair> = kept.iter().filter(|p| p.classification == Classification::Eigenvalue).collect();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0].value.finite().unwrap() - 2.0).norm() < 1e-12);
        assert!(zeros[0].residual.unwrap() <= 1e-12);
        let poles: Vec<&Eigenpair> = kept.iter().filter(|p| p.classification == Classification::Pole).collect();
        assert!(!poles.is_empty() && poles.iter().all(|p| (p.value.finite().unwrap() - 3.0).norm() < 1e-8 && p.residual.is_none()));
    }

    #[test]
    fn empty_region_drops_everything() {
        let (model, rel) = planted_zero_model();
        let approxs = vec![pole_at_three()];
        let pencil = build_cork_aaa(&model, &approxs, &rel).unwrap();
        let pairs = solve_cork(&pencil).unwrap();
        let empty = TargetRegion::Rectangle { re_min: 1.0, re_max: 0.0, im_min: 0.0, im_max: 0.0 };
        assert!(recover_and_filter(&pairs, &pencil, &model, &rel, &approxs, &empty).is_empty());
        let disc = TargetRegion::Disc { center: c(2.0), radius: 0.5 };
        assert_eq!(recover_and_filter(&pairs, &pencil, &model, &rel, &approxs, &disc).len(), 1);
    }

    #[test]
    fn eigenvalue_count_matches_dimension() {
        let q = vec![
            (cm(&[&[1.0, 2.0], &[0.0, 1.0]]), cm(&[&[0.0, 0.0], &[0.0, 0.0]])),
            (cm(&[&[0.0, 0.0], &[0.0, 0.0]]), cm(&[&[1.0, 0.0], &[3.0, 1.0]])),
        ];
        let pencil = build_cork(&q, &BasisRelation::chebyshev(2)).unwrap();
        assert_eq!(solve_cork(&pencil).unwrap().len(), pencil.dim());
    }

    #[test]
    fn nonlinear_residual() {
        // F(λ) = [[e^λ - 1, 0], [0, λ + 1]] vanishes on e_1 at λ = 0
        let q0 = cm(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        let b0 = cm(&[&[0.0, 0.0], &[0.0, -1.0]]);
        let model = CorkModel::new(vec![(q0, b0)], vec![(cm(&[&[1.0, 0.0], &[0.0, 0.0]]), Mat::zeros(2, 2))]).unwrap();
        let nlep = NlepModel::new(model, BasisRelation::monomial(1), vec![ScalarFunction::Exp]).unwrap();
        assert!(residual_against_nonlinear(&nlep, c(0.0), &[c(1.0), c(0.0)]).unwrap() <= 1e-13);
        assert!(residual_against_nonlinear(&nlep, c(0.0), &[c(0.6), c(0.8)]).unwrap() > 0.1);

        let sq = NlepModel::new(nlep.model.clone(), nlep.relation.clone(), vec![ScalarFunction::Sqrt]).unwrap();
        assert!(matches!(residual_against_nonlinear(&sq, c(-2.0), &[c(1.0), c(0.0)]), Err(Error::FunctionNotEvaluable { .. })));
    }
}
