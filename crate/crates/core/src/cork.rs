//! CORK linearizations: linear relations `(X - λY) f(λ) = 0` for a scalar
//! basis, the CORK pencil of a polynomial matrix, its extension to AAA
//! rational approximations (full and trimmed by low-rank factors), views as
//! block full rank pencils, and the sufficient conditions for minimality.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::aaa::{numeric_common_roots, BarycentricApprox};
use crate::blockfullrank::BfrParts;
use crate::error::{Error, Result};
use crate::exactalg::linalg::{inverse, rref};
use crate::exactalg::roots::numeric_roots;
use crate::exactalg::{ExactField, Mat, Poly, PolyMatrix, RatFun, RatMatrix, Rational, Scalar};
use crate::numeric::{frobenius_norm, row_space_basis, singular_values};
use crate::smithmcmillan::determinantal_divisor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Monomial,
    Chebyshev,
    Custom,
}

/// Scalar polynomial basis `f = (f_0 = 1, f_1, …, f_{k-1})` with a linear
/// relation `(X - λY) f(λ) = 0` of rank `k-1` at every point.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisRelation {
    kind: BasisKind,
    x: Mat<Rational>,
    y: Mat<Rational>,
    f: Vec<Poly<Rational>>,
}

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

impl BasisRelation {
    /// `f_i = λ^i`; row `i` encodes `λ f_i - f_{i+1} = 0`.
    pub fn monomial(k: usize) -> Self {
        assert!(k >= 1, "basis needs at least one function");
        let mut x = Mat::zeros(k - 1, k);
        let mut y = Mat::zeros(k - 1, k);
        for i in 0..k - 1 {
            x[(i, i + 1)] = q(-1);
            y[(i, i)] = q(-1);
        }
        let f = (0..k).map(|i| Poly::monomial(q(1), i)).collect();
        BasisRelation { kind: BasisKind::Monomial, x, y, f }
    }

    /// Chebyshev polynomials of the first kind; row 0 encodes
    /// `λ T_0 - T_1 = 0` and row `i ≥ 1` encodes `2λ T_i - T_{i-1} - T_{i+1} = 0`.
    pub fn chebyshev(k: usize) -> Self {
        assert!(k >= 1, "basis needs at least one function");
        let mut x = Mat::zeros(k - 1, k);
        let mut y = Mat::zeros(k - 1, k);
        for i in 0..k - 1 {
            x[(i, i + 1)] = q(-1);
            if i == 0 {
                y[(0, 0)] = q(-1);
            } else {
                y[(i, i)] = q(-2);
                x[(i, i - 1)] = q(-1);
            }
        }
        let lam = Poly::x();
        let mut f: Vec<Poly<Rational>> = vec![Poly::one()];
        if k > 1 {
            f.push(lam.clone());
        }
        while f.len() < k {
            let n = f.len();
            let next = (lam.clone() * f[n - 1].clone()).scale(&q(2)) - f[n - 2].clone();
            f.push(next);
        }
        BasisRelation { kind: BasisKind::Chebyshev, x, y, f }
    }

    /// A user-supplied relation, verified: `f_0 = 1`, `(X - λY) f = 0` and
    /// the `(k-1)`-th determinantal divisor of `X - λY` is constant.
    pub fn custom(x: Mat<Rational>, y: Mat<Rational>, f: Vec<Poly<Rational>>) -> Result<Self> {
        let k = f.len();
        if k == 0 || x.shape() != (k - 1, k) || y.shape() != (k - 1, k) {
            return Err(Error::InvalidRelation("X and Y must be (k-1)×k for k basis functions".into()));
        }
        if !f[0].is_constant() || f[0].coeff(0) != q(1) {
            return Err(Error::InvalidRelation("f_0 must be 1".into()));
        }
        let rel = BasisRelation { kind: BasisKind::Custom, x, y, f };
        let pencil: PolyMatrix = rel.pencil();
        let fv = Mat::from_fn(k, 1, |i, _| rel.f[i].clone());
        if !(&pencil * &fv).is_zero() {
            return Err(Error::InvalidRelation("(X - λY) f is not zero".into()));
        }
        let dd = if k > 1 { determinantal_divisor(&pencil, k - 1) } else { Poly::one() };
        if dd.is_zero() || !dd.is_constant() {
            return Err(Error::InvalidRelation("X - λY drops rank somewhere".into()));
        }
        Ok(rel)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.f.len()
    }

    pub fn x(&self) -> &Mat<Rational> {
        &self.x
    }

    pub fn y(&self) -> &Mat<Rational> {
        &self.y
    }

    pub fn f(&self) -> &[Poly<Rational>] {
        &self.f
    }

    /// `X - λY` over the exact field.
    pub fn pencil<F: ExactField>(&self) -> PolyMatrix<F> {
        let e = |m: &Mat<Rational>| m.map(|v| F::embed(v));
        PolyMatrix::pencil(&e(&self.x), &-e(&self.y))
    }

    pub fn f_polys<F: ExactField>(&self) -> Vec<Poly<F>> {
        self.f.iter().map(|p| p.map(|c| F::embed(c))).collect()
    }

    pub fn eval_f<T: Scalar>(&self, lambda: &T) -> Vec<T> {
        self.f.iter().map(|p| p.map(|c| T::embed(c)).eval(lambda)).collect()
    }

    /// `(A_i, B_i)` with `Σ_i (A_i - λB_i) f_i(λ) = Σ_j Q_j λ^j`, from the
    /// monomial coefficients `Q_0, …, Q_d` (`k = max(d, 1)`).
    pub fn coefficients<T: Scalar>(&self, coeffs: &[Mat<T>]) -> Result<Vec<(Mat<T>, Mat<T>)>> {
        let d = coeffs.len().checked_sub(1).ok_or_else(|| Error::InvalidRelation("no coefficients".into()))?;
        let k = self.k();
        if k != d.max(1) {
            return Err(Error::InvalidRelation(format!("degree {d} needs a basis of size {}, got {k}", d.max(1))));
        }
        let (r, c) = coeffs[0].shape();
        let zero = Mat::zeros(r, c);
        let basis_coeffs = match self.kind {
            BasisKind::Monomial => coeffs.to_vec(),
            BasisKind::Chebyshev => monomial_to_chebyshev(coeffs),
            BasisKind::Custom => {
                return Err(Error::InvalidRelation("a custom basis needs its coefficients supplied directly".into()))
            }
        };
        let mut out: Vec<(Mat<T>, Mat<T>)> = (0..k).map(|i| (basis_coeffs[i].clone(), zero.clone())).collect();
        if d >= 1 {
            let top = &basis_coeffs[d];
            match self.kind {
                BasisKind::Chebyshev if d >= 2 => {
                    // T_d = 2λ T_{d-1} - T_{d-2}
                    out[d - 2].0 = &out[d - 2].0 - top;
                    out[d - 1].1 = -top.scale(&T::embed(&q(2)));
                }
                _ => out[d - 1].1 = -top.clone(),
            }
        }
        Ok(out)
    }
}

/// Coefficients of `Σ_j Q_j λ^j` in the Chebyshev basis, by Horner's rule
/// with `λ T_0 = T_1` and `λ T_i = (T_{i+1} + T_{i-1})/2`.
fn monomial_to_chebyshev<T: Scalar>(coeffs: &[Mat<T>]) -> Vec<Mat<T>> {
    let d = coeffs.len() - 1;
    let (r, c) = coeffs[0].shape();
    let half = T::embed(&Rational::new(1.into(), 2.into()));
    let mut acc: Vec<Mat<T>> = vec![Mat::zeros(r, c); d + 1];
    acc[0] = coeffs[d].clone();
    for j in (0..d).rev() {
        let mut next: Vec<Mat<T>> = vec![Mat::zeros(r, c); d + 1];
        for i in 0..d {
            if acc[i].is_zero() {
                continue;
            }
            if i == 0 {
                next[1] = &next[1] + &acc[0];
            } else {
                let h = acc[i].scale(&half);
                next[i + 1] = &next[i + 1] + &h;
                next[i - 1] = &next[i - 1] + &h;
            }
        }
        next[0] = &next[0] + &coeffs[j];
        acc = next;
    }
    acc
}

/// `F(λ) ≈ R(λ) = Σ_i (A_i - λB_i) f_i(λ) + Σ_i (C_i - λD_i) r_i(λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorkModel<T = Complex64> {
    n: usize,
    q: Vec<(Mat<T>, Mat<T>)>,
    terms: Vec<(Mat<T>, Mat<T>)>,
}

impl<T: Scalar> CorkModel<T> {
    pub fn new(q: Vec<(Mat<T>, Mat<T>)>, terms: Vec<(Mat<T>, Mat<T>)>) -> Result<Self> {
        let n = q.first().map(|(a, _)| a.rows()).ok_or_else(|| Error::DimensionMismatch("no polynomial part".into()))?;
        let all_square = q.iter().chain(&terms).all(|(a, b)| a.shape() == (n, n) && b.shape() == (n, n));
        if !all_square {
            return Err(Error::DimensionMismatch(format!("every coefficient must be {n}×{n}")));
        }
        Ok(CorkModel { n, q, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &[(Mat<T>, Mat<T>)] {
        &self.q
    }

    pub fn terms(&self) -> &[(Mat<T>, Mat<T>)] {
        &self.terms
    }
}

impl CorkModel<Complex64> {
    pub fn rationalize<F: ExactField>(&self) -> Result<CorkModel<F>> {
        let snap = |m: &Mat<Complex64>| m.try_map(|&z| F::from_c64(z).ok_or_else(|| Error::NotRepresentable(format!("{z}"))));
        let pairs = |v: &[(Mat<Complex64>, Mat<Complex64>)]| -> Result<Vec<(Mat<F>, Mat<F>)>> {
            v.iter().map(|(a, b)| Ok((snap(a)?, snap(b)?))).collect()
        };
        CorkModel::new(pairs(&self.q)?, pairs(&self.terms)?)
    }

    /// `R(λ)` in floating point; `None` at a pole of some `r_i`.
    pub fn eval_approx(&self, rel: &BasisRelation, approxs: &[BarycentricApprox], lambda: Complex64) -> Option<Mat<Complex64>> {
        let f = rel.eval_f(&lambda);
        let mut out = Mat::zeros(self.n, self.n);
        for ((a, b), fi) in self.q.iter().zip(&f) {
            out = &out + &(a - &b.scale(&lambda)).scale(fi);
        }
        for ((c, d), r) in self.terms.iter().zip(approxs) {
            let v = r.eval(&lambda)?;
            out = &out + &(c - &d.scale(&lambda)).scale(&v);
        }
        Some(out)
    }

    /// `F(λ)` with the original functions in place of their approximants.
    pub fn eval_with(&self, rel: &BasisRelation, g: &[Complex64], lambda: Complex64) -> Mat<Complex64> {
        let f = rel.eval_f(&lambda);
        let mut out = Mat::zeros(self.n, self.n);
        for ((a, b), fi) in self.q.iter().zip(&f) {
            out = &out + &(a - &b.scale(&lambda)).scale(fi);
        }
        for ((c, d), gi) in self.terms.iter().zip(g) {
            out = &out + &(c - &d.scale(&lambda)).scale(gi);
        }
        out
    }
}

/// `C - λD = (C̃ - λD̃) Z̃^*` with `Z̃` of full column rank `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankFactors<T = Complex64> {
    pub c: Mat<T>,
    pub d: Mat<T>,
    pub z: Mat<T>,
    /// Whether `Z̃^* Z̃ = I` holds (always in floating point; in exact
    /// arithmetic only when the column norms are rational).
    pub orthonormal: bool,
}

impl<T: Scalar> LowRankFactors<T> {
    pub fn rank(&self) -> usize {
        self.z.cols()
    }

    pub fn z_star(&self) -> Mat<T> {
        self.z.map(|v| v.conj()).transpose()
    }
}

impl LowRankFactors<Complex64> {
    pub fn rationalize<F: ExactField>(&self) -> Result<LowRankFactors<F>> {
        let snap = |m: &Mat<Complex64>| m.try_map(|&z| F::from_c64(z).ok_or_else(|| Error::NotRepresentable(format!("{z}"))));
        Ok(LowRankFactors { c: snap(&self.c)?, d: snap(&self.d)?, z: snap(&self.z)?, orthonormal: false })
    }
}

/// `Z̃` spans the row space of `[C; D]` (rank from singular values above
/// `tol·σ_max`), `C̃ = C Z̃`, `D̃ = D Z̃`.
pub fn low_rank_factorize(c: &Mat<Complex64>, d: &Mat<Complex64>, tol: f64) -> LowRankFactors<Complex64> {
    let stacked = Mat::vstack(&[c, d]).expect("C and D have the same shape");
    let z = row_space_basis(&stacked, tol);
    LowRankFactors { c: c * &z, d: d * &z, z, orthonormal: true }
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer().sqrt(), x.denom().sqrt());
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Rational::new(n, d))
}

/// Exact factorization: `Z̃` from Gram–Schmidt on a row-echelon basis of
/// `[C; D]`, normalized when every column norm is rational, and
/// `C̃ = C Z̃ (Z̃^* Z̃)^{-1}` so that `C̃ Z̃^* = C` exactly.
pub fn low_rank_factorize_exact<F: ExactField>(c: &Mat<F>, d: &Mat<F>) -> LowRankFactors<F> {
    let n = c.cols();
    let stacked = Mat::vstack(&[c, d]).expect("C and D have the same shape");
    let (echelon, pivots) = rref(&stacked);
    let inner = |u: &[F], v: &[F]| u.iter().zip(v).fold(F::zero(), |acc, (a, b)| acc + a.conj() * b.clone());
    let mut basis: Vec<Vec<F>> = Vec::new();
    for r in 0..pivots.len() {
        let mut v: Vec<F> = echelon.row(r).to_vec();
        for u in &basis {
            let coef = inner(u, &v) / inner(u, u);
            v = v.iter().zip(u).map(|(a, b)| a.clone() - coef.clone() * b.clone()).collect();
        }
        basis.push(v);
    }
    let norms: Vec<Rational> = basis.iter().map(|u| inner(u, u).parts().0).collect();
    let roots: Option<Vec<Rational>> = norms.iter().map(rational_sqrt).collect();
    let orthonormal = roots.is_some();
    let (z, scale): (Mat<F>, Vec<F>) = match roots {
        Some(rs) => (
            Mat::from_fn(n, basis.len(), |i, j| basis[j][i].clone() / F::from_rational(rs[j].clone())),
            vec![F::one(); basis.len()],
        ),
        None => (
            Mat::from_fn(n, basis.len(), |i, j| basis[j][i].clone()),
            norms.iter().map(|nn| F::one() / F::from_rational(nn.clone())).collect(),
        ),
    };
    let weight = Mat::from_diag(scale);
    LowRankFactors { c: &(c * &z) * &weight, d: &(d * &z) * &weight, z, orthonormal }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorkMode {
    Polynomial,
    Full,
    Trimmed,
}

/// A CORK pencil `L(λ) = A - λB` of size `kn + Σ state_sizes`, rows ordered
/// as (top block row, relation rows, state rows) and columns as (basis
/// columns, state columns).
#[derive(Clone, Debug, PartialEq)]
pub struct CorkPencil<T = Complex64> {
    pub mode: CorkMode,
    pub a: Mat<T>,
    pub b: Mat<T>,
    pub n: usize,
    pub k: usize,
    /// State size per nonlinear term: `ℓ_i n` (full) or `ℓ_i k_i` (trimmed).
    pub state_sizes: Vec<usize>,
    /// `(E_i, F_i)` per nonlinear term.
    pub state_pencils: Vec<(Mat<T>, Mat<T>)>,
}

impl<T: Scalar> CorkPencil<T> {
    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn top_dim(&self) -> usize {
        self.k * self.n
    }

    pub fn state_dim(&self) -> usize {
        self.state_sizes.iter().sum()
    }

    pub fn eval(&self, lambda: &T) -> Mat<T> {
        &self.a - &self.b.scale(lambda)
    }
}

/// `[A_0 - λB_0 … A_{k-1} - λB_{k-1}; (X - λY) ⊗ I_n]`.
pub fn build_cork<T: Scalar>(q: &[(Mat<T>, Mat<T>)], rel: &BasisRelation) -> Result<CorkPencil<T>> {
    let model = CorkModel::new(q.to_vec(), Vec::new())?;
    assemble(&model, &[], rel, None)
}

/// The CORK pencil for a model whose nonlinear terms are replaced by AAA
/// approximants: state block `(E - λF) ⊗ I_n` coupled through `-b ⊗ I_n`.
pub fn build_cork_aaa<T: Scalar>(
    model: &CorkModel<T>,
    approxs: &[BarycentricApprox<T>],
    rel: &BasisRelation,
) -> Result<CorkPencil<T>> {
    assemble(model, approxs, rel, None)
}

/// The trimmed CORK pencil: term `i` contributes `a_i^T ⊗ (C̃_i - λD̃_i)`,
/// state `(E_i - λF_i) ⊗ I_{k_i}` and coupling `-(b_i ⊗ I_{k_i}) Z̃_i^*`.
pub fn build_trimmed_cork<T: Scalar>(
    model: &CorkModel<T>,
    approxs: &[BarycentricApprox<T>],
    rel: &BasisRelation,
    factors: &[LowRankFactors<T>],
) -> Result<CorkPencil<T>> {
    assemble(model, approxs, rel, Some(factors))
}

fn assemble<T: Scalar>(
    model: &CorkModel<T>,
    approxs: &[BarycentricApprox<T>],
    rel: &BasisRelation,
    factors: Option<&[LowRankFactors<T>]>,
) -> Result<CorkPencil<T>> {
    let (n, k, s) = (model.n, rel.k(), model.terms.len());
    if model.q.len() != k {
        return Err(Error::DimensionMismatch(format!("{} coefficient pairs for a basis of size {k}", model.q.len())));
    }
    if approxs.len() != s {
        return Err(Error::DimensionMismatch(format!("{} approximants for {s} nonlinear terms", approxs.len())));
    }
    if let Some(fs) = factors {
        if fs.len() != s || fs.iter().any(|f| f.z.rows() != n || f.c.shape() != f.z.shape() || f.d.shape() != f.z.shape()) {
            return Err(Error::DimensionMismatch("low-rank factors do not match the terms".into()));
        }
    }
    let widths: Vec<usize> = match factors {
        Some(fs) => fs.iter().map(|f| f.rank()).collect(),
        None => vec![n; s],
    };
    let state_sizes: Vec<usize> = approxs.iter().zip(&widths).map(|(r, w)| r.m() * w).collect();
    let top = k * n;
    let dim = top + state_sizes.iter().sum::<usize>();
    let mut a = Mat::zeros(dim, dim);
    let mut b = Mat::zeros(dim, dim);
    for (i, (ai, bi)) in model.q.iter().enumerate() {
        a.set_block(0, i * n, ai);
        b.set_block(0, i * n, bi);
    }
    let embed = |m: &Mat<Rational>| m.map(|v| T::embed(v));
    let id_n: Mat<T> = Mat::identity(n);
    a.set_block(n, 0, &embed(&rel.x).kron(&id_n));
    b.set_block(n, 0, &embed(&rel.y).kron(&id_n));

    let mut state_pencils = Vec::with_capacity(s);
    let mut off = top;
    for (i, r) in approxs.iter().enumerate() {
        let w = widths[i];
        let (ct, dt, coupling) = match factors {
            Some(fs) => (fs[i].c.clone(), fs[i].d.clone(), -fs[i].z_star()),
            None => (model.terms[i].0.clone(), model.terms[i].1.clone(), -id_n.clone()),
        };
        let rp = r.realization();
        for (j, aj) in rp.a.iter().enumerate() {
            a.set_block(0, off + j * w, &ct.scale(aj));
            b.set_block(0, off + j * w, &dt.scale(aj));
        }
        a.set_block(off, 0, &coupling);
        let id_w: Mat<T> = Mat::identity(w);
        a.set_block(off, off, &rp.e.kron(&id_w));
        b.set_block(off, off, &rp.f.kron(&id_w));
        state_pencils.push((rp.e, rp.f));
        off += state_sizes[i];
    }
    let mode = match (s, factors) {
        (0, _) => CorkMode::Polynomial,
        (_, None) => CorkMode::Full,
        (_, Some(_)) => CorkMode::Trimmed,
    };
    Ok(CorkPencil { mode, a, b, n, k, state_sizes, state_pencils })
}

fn term_ratfun<F: ExactField>(r: &BarycentricApprox<F>) -> RatFun<F> {
    let (p, qq) = r.quotient();
    RatFun::new(p, qq).expect("q is nonzero for nonzero weights")
}

fn polynomial_part<F: ExactField>(model: &CorkModel<F>, rel: &BasisRelation) -> RatMatrix<F> {
    let f = rel.f_polys::<F>();
    let mut out: RatMatrix<F> = Mat::zeros(model.n, model.n);
    for ((a, b), fi) in model.q.iter().zip(f) {
        let blk = PolyMatrix::pencil(a, &-b.clone()).map(|e| RatFun::from_poly(e.clone() * fi.clone()));
        out = &out + &blk;
    }
    out
}

/// `Σ (A_i - λB_i) f_i + Σ (C_i - λD_i) p_i/q_i`, exactly.
pub fn cork_transfer<F: ExactField>(
    model: &CorkModel<F>,
    approxs: &[BarycentricApprox<F>],
    rel: &BasisRelation,
) -> Result<RatMatrix<F>> {
    if approxs.len() != model.terms.len() {
        return Err(Error::DimensionMismatch("one approximant per nonlinear term".into()));
    }
    let mut out = polynomial_part(model, rel);
    for ((c, d), r) in model.terms.iter().zip(approxs) {
        let rf = term_ratfun(r);
        let blk = PolyMatrix::pencil(c, &-d.clone()).map(|e| RatFun::from_poly(e.clone()) * rf.clone());
        out = &out + &blk;
    }
    Ok(out)
}

/// `Σ (A_i - λB_i) f_i + Σ (C̃_i - λD̃_i) Z̃_i^* p_i/q_i`, exactly.
pub fn trimmed_transfer<F: ExactField>(
    model: &CorkModel<F>,
    approxs: &[BarycentricApprox<F>],
    rel: &BasisRelation,
    factors: &[LowRankFactors<F>],
) -> Result<RatMatrix<F>> {
    if approxs.len() != model.terms.len() || factors.len() != model.terms.len() {
        return Err(Error::DimensionMismatch("one approximant and one factorization per nonlinear term".into()));
    }
    let mut out = polynomial_part(model, rel);
    for (r, fac) in approxs.iter().zip(factors) {
        let rf = term_ratfun(r);
        let zs = fac.z_star().to_poly();
        let blk = &PolyMatrix::pencil(&fac.c, &-fac.d.clone()) * &zs;
        out = &out + &blk.map(|e| RatFun::from_poly(e.clone()) * rf.clone());
    }
    Ok(out)
}

/// How to read a CORK pencil as a block full rank pencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfrView {
    /// State matrix `(E - λF) ⊗ I_n` (or `E - λF` when trimmed),
    /// `K1 = (X - λY) ⊗ I_n`, `N1 = f^T ⊗ I_n`, `K2` empty.
    StateMatrix,
    /// No state: `M` is the whole top block row and `K1` all rows below it,
    /// with `N1^T = [f ⊗ I_n; -A^{-1} B (f ⊗ I_n)]`.
    EmptyState,
}

pub fn cork_as_bfr<F: ExactField>(pencil: &CorkPencil<F>, rel: &BasisRelation, view: BfrView) -> Result<BfrParts<F>> {
    let (n, top, dim) = (pencil.n, pencil.top_dim(), pencil.dim());
    let l = PolyMatrix::pencil(&pencil.a, &-pencil.b.clone());
    let fcol = Mat::from_fn(rel.k(), 1, |i, _| RatFun::from_poly(rel.f_polys::<F>()[i].clone()));
    let f_kron = fcol.kron(&Mat::identity(n));
    let n2: RatMatrix<F> = Mat::identity(n);
    let state = top..dim;
    let parts = match view {
        BfrView::StateMatrix => BfrParts {
            a: l.submatrix(state.clone(), state.clone()),
            b: l.submatrix(state.clone(), 0..top),
            c: -l.submatrix(0..n, state),
            m: l.submatrix(0..n, 0..top),
            k1: l.submatrix(n..top, 0..top),
            k2: Mat::zeros(0, n),
            n1: f_kron.transpose(),
            n2,
        },
        BfrView::EmptyState => {
            let sa = l.submatrix(state.clone(), state.clone()).to_rat();
            let sb = l.submatrix(state, 0..top).to_rat();
            let lower = if dim > top { -(&(&inverse(&sa)? * &sb) * &f_kron) } else { Mat::zeros(0, n) };
            BfrParts {
                a: Mat::zeros(0, 0),
                b: Mat::zeros(0, dim),
                c: Mat::zeros(n, 0),
                m: l.submatrix(0..n, 0..dim),
                k1: l.submatrix(n..dim, 0..dim),
                k2: Mat::zeros(0, n),
                n1: Mat::vstack(&[&f_kron, &lower])?.transpose(),
                n2,
            }
        }
    };
    parts.validate()?;
    Ok(parts)
}

/// Per-term outcome of the sufficient minimality conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct TermCheck {
    /// `p_i/q_i` has no common root.
    pub irreducible: bool,
    pub common_root: Option<Complex64>,
    /// Full mode: `C_i - λD_i` is nonsingular at every eigenvalue of
    /// `E_i - λF_i`. Trimmed mode: `C̃_i - λD̃_i` has full column rank there.
    pub coefficient_condition: bool,
    pub coefficient_witness: Option<Complex64>,
    /// Eigenvalues of `E_i - λF_i`, the roots of `q_i`.
    pub state_eigenvalues: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalityReport {
    pub mode: CorkMode,
    pub terms: Vec<TermCheck>,
    /// State pencils of different terms share no finite eigenvalue.
    pub disjoint_states: bool,
    pub disjoint_witness: Option<(usize, usize, Complex64)>,
    /// All conditions hold, so the pencil with its state block is minimal
    /// in `C`. `false` leaves minimality undetermined.
    pub certified_minimal: bool,
}

const PROBES: [Complex64; 3] = [Complex64::new(0.618_033_988_7, 0.312_5), Complex64::new(-0.8, 1.1), Complex64::new(1.7, -0.4)];

fn is_singular_pencil(c: &Mat<Complex64>, d: &Mat<Complex64>) -> bool {
    PROBES.iter().all(|&z| {
        let m = c - &d.scale(&z);
        let sv = singular_values(&m);
        let smax = sv.first().copied().unwrap_or(0.0);
        smax == 0.0 || sv.last().copied().unwrap_or(0.0) <= 1e-12 * smax
    })
}

/// Sufficient conditions for the CORK pencil of the model to be minimal in
/// `C` with its state block: every `p_i/q_i` irreducible, the coefficient
/// pencil of each term of full rank at the eigenvalues of its state pencil,
/// and state pencils of distinct terms without common eigenvalues. Point
/// comparisons use the absolute gap `tol` after scaling by `max(1, |λ|)`.
///
/// With `factors` the trimmed pencil is checked, where `C̃_i - λD̃_i` only
/// needs full column rank. Without them every `C_i - λD_i` must be regular.
pub fn check_sufficient_minimality(
    model: &CorkModel<Complex64>,
    approxs: &[BarycentricApprox],
    factors: Option<&[LowRankFactors<Complex64>]>,
    tol: f64,
) -> Result<MinimalityReport> {
    let s = model.terms.len();
    if approxs.len() != s || factors.is_some_and(|f| f.len() != s) {
        return Err(Error::DimensionMismatch("one approximant and factorization per term".into()));
    }
    let mut terms = Vec::with_capacity(s);
    for (i, ((c, d), r)) in model.terms.iter().zip(approxs).enumerate() {
        let (ct, dt) = match factors {
            Some(fs) => (fs[i].c.clone(), fs[i].d.clone()),
            None => {
                if is_singular_pencil(c, d) {
                    return Err(Error::SingularTermPencil(i));
                }
                (c.clone(), d.clone())
            }
        };
        let common = numeric_common_roots(r, 1e-10);
        let state_eigenvalues = numeric_roots(&r.quotient().1);
        let width = ct.cols();
        let witness = state_eigenvalues.iter().copied().find(|&z| {
            let m = &ct - &dt.scale(&z);
            let norm = frobenius_norm(&m);
            let sv = singular_values(&m);
            width > 0 && (norm == 0.0 || sv.get(width - 1).copied().unwrap_or(0.0) <= tol * norm)
        });
        terms.push(TermCheck {
            irreducible: common.is_empty(),
            common_root: common.first().copied(),
            coefficient_condition: witness.is_none(),
            coefficient_witness: witness,
            state_eigenvalues,
        });
    }
    let mut disjoint_witness = None;
    'outer: for i in 0..s {
        for j in i + 1..s {
            for &x in &terms[i].state_eigenvalues {
                for &y in &terms[j].state_eigenvalues {
                    if (x - y).norm() <= tol * x.norm().max(1.0) {
                        disjoint_witness = Some((i, j, x));
                        break 'outer;
                    }
                }
            }
        }
    }
    let disjoint_states = disjoint_witness.is_none();
    let certified_minimal = disjoint_states && terms.iter().all(|t| t.irreducible && t.coefficient_condition);
    Ok(MinimalityReport {
        mode: if factors.is_some() { CorkMode::Trimmed } else { CorkMode::Full },
        terms,
        disjoint_states,
        disjoint_witness,
        certified_minimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockfullrank::Layout;
    use crate::exactalg::rat;
    use crate::smithmcmillan::SmithMcMillan;
    use crate::sysmat::{check_linearization_in, RegionSpec};

    fn m(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect())
    }

    #[test]
    fn monomial_relation_rows() {
        let rel = BasisRelation::monomial(3);
        let p: PolyMatrix = rel.pencil();
        let lam = Poly::x();
        let one = Poly::one();
        let want = Mat::from_rows(vec![
            vec![lam.clone(), -one.clone(), Poly::zero()],
            vec![Poly::zero(), lam, -one],
        ]);
        assert_eq!(p, want);
    }

    #[test]
    fn chebyshev_relation_rows() {
        let rel = BasisRelation::chebyshev(3);
        let p: PolyMatrix = rel.pencil();
        assert_eq!(p[(1, 0)], Poly::constant(rat(-1, 1)));
        assert_eq!(p[(1, 1)], Poly::new(vec![rat(0, 1), rat(2, 1)]));
        assert_eq!(p[(1, 2)], Poly::constant(rat(-1, 1)));
        assert_eq!(rel.f()[2], Poly::new(vec![rat(-1, 1), rat(0, 1), rat(2, 1)]));
        assert!(BasisRelation::custom(rel.x().clone(), rel.y().clone(), rel.f().to_vec()).is_ok());
    }

    #[test]
    fn custom_relation_rejects_rank_drop() {
        let r = BasisRelation::custom(m(&[&[0, 0]]), m(&[&[0, 0]]), vec![Poly::one(), Poly::x()]);
        assert!(matches!(r, Err(Error::InvalidRelation(_))));
    }

    fn quadratic() -> Vec<Mat<Rational>> {
        vec![m(&[&[1, 2], &[0, -1]]), m(&[&[0, 1], &[3, 1]]), m(&[&[2, 0], &[1, 1]])]
    }

    fn as_polymatrix(coeffs: &[Mat<Rational>]) -> PolyMatrix {
        let (r, c) = coeffs[0].shape();
        Mat::from_fn(r, c, |i, j| Poly::new(coeffs.iter().map(|m| m[(i, j)].clone()).collect()))
    }

    #[test]
    fn cork_of_quadratic_recovers_q() {
        for rel in [BasisRelation::monomial(2), BasisRelation::chebyshev(2)] {
            let parts = rel.coefficients(&quadratic()).unwrap();
            let pencil = build_cork(&parts, &rel).unwrap();
            assert_eq!(pencil.dim(), 4);
            let bfr = cork_as_bfr(&pencil, &rel, BfrView::StateMatrix).unwrap();
            assert_eq!(bfr.recover_r().unwrap(), as_polymatrix(&quadratic()).to_rat());
        }
    }

    #[test]
    fn chebyshev_cubic_coefficients() {
        let rel = BasisRelation::chebyshev(3);
        let cubic = vec![m(&[&[1]]), m(&[&[-2]]), m(&[&[3]]), m(&[&[5]])];
        let parts = rel.coefficients(&cubic).unwrap();
        let model = CorkModel::new(parts, vec![]).unwrap();
        let r = cork_transfer(&model, &[], &rel).unwrap();
        assert_eq!(r, as_polymatrix(&cubic).to_rat());
    }

    #[test]
    fn k_one_is_the_pencil() {
        let rel = BasisRelation::monomial(1);
        let parts = rel.coefficients(&[m(&[&[1, 2], &[3, 4]]), m(&[&[0, 1], &[1, 0]])]).unwrap();
        let pencil = build_cork(&parts, &rel).unwrap();
        assert_eq!(pencil.a, m(&[&[1, 2], &[3, 4]]));
        assert_eq!(pencil.b, -m(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn planted_zero_of_q() {
        // Q(λ) = diag(λ - 2, 1) + λ²·diag(0, 1)
        let coeffs = vec![m(&[&[-2, 0], &[0, 1]]), m(&[&[1, 0], &[0, 0]]), m(&[&[0, 0], &[0, 1]])];
        let rel = BasisRelation::monomial(2);
        let pencil = build_cork(&rel.coefficients(&coeffs).unwrap(), &rel).unwrap();
        let l = PolyMatrix::pencil(&pencil.a, &-pencil.b.clone());
        let sm = SmithMcMillan::new(&l.to_rat());
        let sq = SmithMcMillan::new(&as_polymatrix(&coeffs).to_rat());
        assert_eq!(sm.local(&rat(2, 1)).zeros(), sq.local(&rat(2, 1)).zeros());
        assert_eq!(sm.zero_polynomial().monic(), sq.zero_polynomial().monic());
    }

    fn one_term_model() -> (CorkModel<Rational>, BarycentricApprox<Rational>, BasisRelation) {
        let rel = BasisRelation::monomial(2);
        let q = rel.coefficients(&quadratic()).unwrap();
        let c = m(&[&[1, 2], &[2, 4]]);
        let d = m(&[&[0, 0], &[0, 0]]);
        let model = CorkModel::new(q, vec![(c, d)]).unwrap();
        // r = 1/(λ - 3) on supports 0, 1
        let r = BarycentricApprox::from_quotient(
            vec![rat(0, 1), rat(1, 1)],
            &Poly::constant(rat(1, 1)),
            &Poly::new(vec![rat(-3, 1), rat(1, 1)]),
        )
        .unwrap();
        (model, r, rel)
    }

    #[test]
    fn full_cork_sizes_and_transfer() {
        let (model, r, rel) = one_term_model();
        let pencil = build_cork_aaa(&model, std::slice::from_ref(&r), &rel).unwrap();
        assert_eq!(pencil.dim(), 2 * 2 + 2 * 2);
        let want = cork_transfer(&model, std::slice::from_ref(&r), &rel).unwrap();
        let bfr = cork_as_bfr(&pencil, &rel, BfrView::StateMatrix).unwrap();
        assert_eq!(bfr.recover_r().unwrap(), want);
        let empty = cork_as_bfr(&pencil, &rel, BfrView::EmptyState).unwrap();
        assert_eq!(empty.recover_r().unwrap(), want);
        let inf = bfr.check_infinity_condition().unwrap();
        assert!(!inf.passed);
        assert!(matches!(empty.check_infinity_condition(), Err(Error::ReversedBasisRankDeficient(_))));
    }

    #[test]
    fn trimmed_matches_full() {
        let (model, r, rel) = one_term_model();
        let (c, d) = model.terms()[0].clone();
        let fac = low_rank_factorize_exact(&c, &d);
        assert_eq!(fac.rank(), 1);
        assert_eq!(&fac.c * &fac.z_star(), c);
        let rs = std::slice::from_ref(&r);
        let trimmed = build_trimmed_cork(&model, rs, &rel, std::slice::from_ref(&fac)).unwrap();
        assert_eq!(trimmed.dim(), 2 * 2 + 2);
        let want = cork_transfer(&model, rs, &rel).unwrap();
        assert_eq!(trimmed_transfer(&model, rs, &rel, std::slice::from_ref(&fac)).unwrap(), want);
        let bfr = cork_as_bfr(&trimmed, &rel, BfrView::StateMatrix).unwrap();
        assert_eq!(bfr.recover_r().unwrap(), want);
        // with a rank-1 term only the trimmed pencil is minimal in C
        let sys = bfr.assemble().unwrap();
        assert!(sys.is_minimal_in(&RegionSpec::Cofinite(vec![])));
        let rep = check_linearization_in(&sys, &want, &RegionSpec::Cofinite(vec![])).unwrap();
        assert!(rep.is_linearization);
        let full = cork_as_bfr(&build_cork_aaa(&model, rs, &rel).unwrap(), &rel, BfrView::StateMatrix).unwrap();
        assert!(!full.assemble().unwrap().is_minimal_at(&rat(3, 1)));
    }

    #[test]
    fn trimmed_with_full_rank_is_a_permutation_of_full() {
        let rel = BasisRelation::monomial(2);
        let q = rel.coefficients(&quadratic()).unwrap();
        let model = CorkModel::new(q, vec![(m(&[&[1, 0], &[0, 1]]), m(&[&[0, 1], &[1, 0]]))]).unwrap();
        let r = BarycentricApprox::from_quotient(
            vec![rat(0, 1), rat(1, 1)],
            &Poly::constant(rat(2, 1)),
            &Poly::new(vec![rat(-5, 1), rat(1, 1)]),
        )
        .unwrap();
        let id = LowRankFactors { c: model.terms()[0].0.clone(), d: model.terms()[0].1.clone(), z: Mat::identity(2), orthonormal: true };
        let rs = std::slice::from_ref(&r);
        let full = build_cork_aaa(&model, rs, &rel).unwrap();
        let trimmed = build_trimmed_cork(&model, rs, &rel, std::slice::from_ref(&id)).unwrap();
        assert_eq!(full, CorkPencil { mode: CorkMode::Full, ..trimmed });
    }

    #[test]
    fn exact_orthonormal_when_norm_rational() {
        // row space spanned by (3, 4)/5
        let c = m(&[&[3, 4], &[6, 8]]);
        let fac = low_rank_factorize_exact(&c, &Mat::zeros(2, 2));
        assert!(fac.orthonormal);
        assert_eq!(fac.z, Mat::from_rows(vec![vec![rat(3, 5)], vec![rat(4, 5)]]));
        assert_eq!(&fac.z_star() * &fac.z, Mat::identity(1));
    }

    #[test]
    fn numeric_low_rank() {
        let c = Mat::from_fn(3, 3, |i, j| Complex64::new((i + 1) as f64 * (j as f64 - 1.0), 0.0));
        let fac = low_rank_factorize(&c, &Mat::zeros(3, 3), 1e-12);
        assert_eq!(fac.rank(), 1);
        let back = &fac.c * &fac.z_star();
        assert!(frobenius_norm(&(&back - &c)) < 1e-12);
    }

    fn to_c(model: &CorkModel<Rational>) -> CorkModel<Complex64> {
        let f = |m: &Mat<Rational>| m.map(|v| v.to_c64());
        CorkModel::new(
            model.q().iter().map(|(a, b)| (f(a), f(b))).collect(),
            model.terms().iter().map(|(a, b)| (f(a), f(b))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn sufficient_conditions() {
        let (model, _, _) = one_term_model();
        let cm = to_c(&model);
        let r = BarycentricApprox::from_quotient(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            &Poly::constant(Complex64::new(1.0, 0.0)),
            &Poly::new(vec![Complex64::new(-3.0, 0.0), Complex64::new(1.0, 0.0)]),
        )
        .unwrap();
        let rs = std::slice::from_ref(&r);
        assert!(matches!(check_sufficient_minimality(&cm, rs, None, 1e-8), Err(Error::SingularTermPencil(0))));
        let (c, d) = cm.terms()[0].clone();
        let fac = low_rank_factorize(&c, &d, 1e-12);
        let rep = check_sufficient_minimality(&cm, rs, Some(std::slice::from_ref(&fac)), 1e-8).unwrap();
        assert!(rep.certified_minimal);
        assert_eq!(rep.terms[0].state_eigenvalues.len(), 1);
    }

    #[test]
    fn shared_state_eigenvalue_is_reported() {
        let id = Mat::<Complex64>::identity(1);
        let zero = Mat::<Complex64>::zeros(1, 1);
        let model = CorkModel::new(vec![(id.clone(), zero.clone())], vec![(id.clone(), zero.clone()), (id, zero)]).unwrap();
        let r = BarycentricApprox::from_quotient(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            &Poly::constant(Complex64::new(1.0, 0.0)),
            &Poly::new(vec![Complex64::new(-3.0, 0.0), Complex64::new(1.0, 0.0)]),
        )
        .unwrap();
        let rep = check_sufficient_minimality(&model, &[r.clone(), r], None, 1e-8).unwrap();
        assert!(!rep.disjoint_states);
        let (i, j, z) = rep.disjoint_witness.unwrap();
        assert_eq!((i, j), (0, 1));
        assert!((z - 3.0).norm() < 1e-10);
        assert!(!rep.certified_minimal);
    }

    #[test]
    fn state_view_layout_is_corner() {
        let (model, r, rel) = one_term_model();
        let pencil = build_cork_aaa(&model, std::slice::from_ref(&r), &rel).unwrap();
        let bfr = cork_as_bfr(&pencil, &rel, BfrView::StateMatrix).unwrap();
        let l = PolyMatrix::pencil(&pencil.a, &-pencil.b.clone());
        assert_eq!(bfr.pencil(Layout::Corner).unwrap(), l);
    }
}
