//! Block full rank pencils `[M K2^T; K1 0]` bordered by a state block, the
//! finite and infinite rank conditions that make them linearizations, and
//! the strong block minimal bases construction from a polynomial part plus a
//! state-space realization.

use num_traits::{One, Zero};

use crate::error::{Error, Result, Side};
use crate::exactalg::linalg::{normal_rank, poly_det, poly_normal_rank, polynomial_nullspace, rank, solve};
use crate::exactalg::{Degree, ExactField, Mat, Poly, PolyMatrix, RatMatrix, Rational};
use crate::sysmat::{rank_in_region, RegionSpec, SystemMatrix, Witness};

/// Where the state block sits in the assembled pencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `[A B 0; -C M K2^T; 0 K1 0]`.
    Canonical,
    /// `[M K2^T -C; K1 0 0; B 0 A]`.
    Corner,
}

/// Blocks of a block full rank linearization together with the dual bases
/// used to define the rational matrix it represents.
///
/// Shapes: `A` n×n, `B` n×c, `C` r×n, `M` r×c, `K1` m̂×c, `K2` p̂×r,
/// `N1` (c-m̂)×c, `N2` (r-p̂)×r. An empty `K_i` has zero rows and its `N_i`
/// is any square matrix invertible on the region of interest.
#[derive(Clone, Debug, PartialEq)]
pub struct BfrParts<F = Rational> {
    pub a: PolyMatrix<F>,
    pub b: PolyMatrix<F>,
    pub c: PolyMatrix<F>,
    pub m: PolyMatrix<F>,
    pub k1: PolyMatrix<F>,
    pub k2: PolyMatrix<F>,
    pub n1: RatMatrix<F>,
    pub n2: RatMatrix<F>,
}

/// Row degrees of a rational matrix and the common value `t` if uniform.
#[derive(Clone, Debug, PartialEq)]
pub struct RowDegreeProfile {
    pub row_degrees: Vec<Degree>,
    pub t: Option<i64>,
}

/// Outcome of a rank condition on a region.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionCheck<F = Rational> {
    pub passed: bool,
    pub witness: Option<Witness<F>>,
}

/// Why the condition at infinity failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfinityFailure {
    /// `rev_1 A(0)` is singular and the bordering blocks do not restore rank.
    ReversedStateBlockRankDeficient,
}

impl std::fmt::Display for InfinityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfinityFailure::ReversedStateBlockRankDeficient => write!(f, "reversed state block rank-deficient at 0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfinityCheck {
    pub passed: bool,
    pub grade: i64,
    pub failure: Option<InfinityFailure>,
}

fn mismatch(what: &str) -> Error {
    Error::DimensionMismatch(what.to_string())
}

impl<F: ExactField> BfrParts<F> {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Check shapes, full row normal rank of `K_i`, duality `K_i N_i^T = 0`
    /// and that `[K_i; N_i]` is square of full normal rank.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let (r, c) = self.m.shape();
        if self.a.cols() != n || self.b.shape() != (n, c) || self.c.shape() != (r, n) {
            return Err(mismatch("state blocks do not conform with M"));
        }
        if self.k1.cols() != c || self.k2.cols() != r {
            return Err(mismatch("K1 must have as many columns as M, K2 as many as M has rows"));
        }
        for (side, k, nb) in [(Side::First, &self.k1, &self.n1), (Side::Second, &self.k2, &self.n2)] {
            if nb.cols() != k.cols() || nb.rows() + k.rows() != k.cols() {
                return Err(mismatch(&format!("{side}: [K; N] must be square")));
            }
            if k.rows() > 0 {
                if poly_normal_rank(k) != k.rows() {
                    return Err(mismatch(&format!("{side}: K has deficient row normal rank")));
                }
                if !(&k.to_rat() * &nb.transpose()).is_zero() {
                    return Err(mismatch(&format!("{side}: K N^T is not zero")));
                }
            }
            let stacked = Mat::vstack(&[&k.to_rat(), nb])?;
            if normal_rank(&stacked) != k.cols() {
                return Err(mismatch(&format!("{side}: [K; N] is singular")));
            }
        }
        if n > 0 && poly_normal_rank(&self.a) != n {
            return Err(Error::StateNotRegular);
        }
        Ok(())
    }

    /// The bordered pencil as a system matrix with state `A`:
    /// `B' = [B 0]`, `C' = [C; 0]`, `D = [M K2^T; K1 0]`.
    pub fn assemble(&self) -> Result<SystemMatrix<F>> {
        self.validate()?;
        let n = self.n();
        let (r, c) = self.m.shape();
        let (mh, ph) = (self.k1.rows(), self.k2.rows());
        let k2t = self.k2.transpose();
        let d = Mat::blocks(&[r, mh], &[c, ph], &[vec![Some(&self.m), Some(&k2t)], vec![Some(&self.k1), None]])?;
        let b = Mat::hstack(&[&self.b, &Mat::zeros(n, ph)])?;
        let cc = Mat::vstack(&[&self.c, &Mat::zeros(mh, n)])?;
        SystemMatrix::new(self.a.clone(), b, cc, d)
    }

    pub fn pencil(&self, layout: Layout) -> Result<PolyMatrix<F>> {
        let sys = self.assemble()?;
        Ok(match layout {
            Layout::Canonical => sys.pencil(),
            Layout::Corner => {
                let n = self.n();
                let (r, c) = self.m.shape();
                let (mh, ph) = (self.k1.rows(), self.k2.rows());
                let k2t = self.k2.transpose();
                let neg_c = -self.c.clone();
                Mat::blocks(
                    &[r, mh, n],
                    &[c, ph, n],
                    &[
                        vec![Some(&self.m), Some(&k2t), Some(&neg_c)],
                        vec![Some(&self.k1), None, None],
                        vec![Some(&self.b), None, Some(&self.a)],
                    ],
                )?
            }
        })
    }

    /// Read the blocks back from an assembled pencil. `r × c` is the size of
    /// `M`; the dual bases are not part of the pencil and must be supplied.
    pub fn from_pencil(
        l: &PolyMatrix<F>,
        layout: Layout,
        n: usize,
        (r, c): (usize, usize),
        n1: RatMatrix<F>,
        n2: RatMatrix<F>,
    ) -> Result<Self> {
        let (rows, cols) = l.shape();
        if rows < n + r || cols < n + c {
            return Err(mismatch("pencil smaller than the declared blocks"));
        }
        let (mh, ph) = (rows - n - r, cols - n - c);
        let parts = match layout {
            Layout::Canonical => BfrParts {
                a: l.submatrix(0..n, 0..n),
                b: l.submatrix(0..n, n..n + c),
                c: -l.submatrix(n..n + r, 0..n),
                m: l.submatrix(n..n + r, n..n + c),
                k1: l.submatrix(n + r..rows, n..n + c),
                k2: l.submatrix(n..n + r, n + c..cols).transpose(),
                n1,
                n2,
            },
            Layout::Corner => BfrParts {
                m: l.submatrix(0..r, 0..c),
                k2: l.submatrix(0..r, c..c + ph).transpose(),
                c: -l.submatrix(0..r, c + ph..cols),
                k1: l.submatrix(r..r + mh, 0..c),
                b: l.submatrix(r + mh..rows, 0..c),
                a: l.submatrix(r + mh..rows, c + ph..cols),
                n1,
                n2,
            },
        };
        parts.validate()?;
        Ok(parts)
    }

    /// `N2 (M + C A^{-1} B) N1^T`.
    pub fn recover_r(&self) -> Result<RatMatrix<F>> {
        let inner = SystemMatrix::new(self.a.clone(), self.b.clone(), self.c.clone(), self.m.clone())?
            .transfer_function()?;
        Ok(&(&self.n2 * &inner) * &self.n1.transpose())
    }

    fn bordered(&self) -> (RatMatrix<F>, RatMatrix<F>) {
        let a = self.a.to_rat();
        let nc = -(&self.n2 * &self.c.to_rat());
        let bn = &self.b.to_rat() * &self.n1.transpose();
        (Mat::vstack(&[&a, &nc]).unwrap(), Mat::hstack(&[&a, &bn]).unwrap())
    }

    /// The finite rank condition: `[A; -N2 C]` and `[A, B N1^T]` have rank
    /// `n` at every point of the region. First verifies that `K_i` and `N_i`
    /// have full row rank there.
    pub fn check_finite_condition(&self, region: &RegionSpec<F>) -> Result<ConditionCheck<F>> {
        self.validate()?;
        for (side, k, nb) in [(Side::First, &self.k1, &self.n1), (Side::Second, &self.k2, &self.n2)] {
            if k.rows() > 0 {
                rank_in_region(&k.to_rat(), k.rows(), region)
                    .map_err(|w| Error::DualBasisNotFullRankInRegion { side, witness: w.to_string() })?;
            }
            rank_in_region(nb, nb.rows(), region)
                .map_err(|w| Error::DualBasisNotFullRankInRegion { side, witness: w.to_string() })?;
        }
        let n = self.n();
        if n == 0 {
            return Ok(ConditionCheck { passed: true, witness: None });
        }
        let (left, right) = self.bordered();
        let res = rank_in_region(&left, n, region).and_then(|_| rank_in_region(&right, n, region));
        Ok(match res {
            Ok(()) => ConditionCheck { passed: true, witness: None },
            Err(w) => ConditionCheck { passed: false, witness: Some(w) },
        })
    }

    /// The condition at infinity, with grade `1 + t1 + t2` where `t_i` is the
    /// uniform row degree of `N_i`.
    pub fn check_infinity_condition(&self) -> Result<InfinityCheck> {
        self.validate()?;
        let zero = F::zero();
        let mut ts = [0i64; 2];
        let mut rev_n = Vec::new();
        for (idx, (side, k, nb)) in
            [(Side::First, &self.k1, &self.n1), (Side::Second, &self.k2, &self.n2)].into_iter().enumerate()
        {
            let t = row_degree_profile(nb).t.ok_or(Error::NonUniformRowDegrees(side))?;
            ts[idx] = t;
            if k.rows() > 0 {
                let rk = k.reverse(1).eval(&zero).map_err(|_| Error::ReversedBasisRankDeficient(side))?;
                if rank(&rk) != k.rows() {
                    return Err(Error::ReversedBasisRankDeficient(side));
                }
            }
            let rn = nb.reverse(t).eval(&zero).map_err(|_| Error::ReversedBasisRankDeficient(side))?;
            if rank(&rn) != nb.rows() {
                return Err(Error::ReversedBasisRankDeficient(side));
            }
            rev_n.push(rn);
        }
        let grade = 1 + ts[0] + ts[1];
        let n = self.n();
        if n == 0 {
            return Ok(InfinityCheck { passed: true, grade, failure: None });
        }
        let at0 = |m: &PolyMatrix<F>| m.reverse(1).eval(&zero).expect("pencil reversal is polynomial");
        let (ra, rb, rc) = (at0(&self.a), at0(&self.b), at0(&self.c));
        let left = Mat::vstack(&[&ra, &-(&rev_n[1] * &rc)])?;
        let right = Mat::hstack(&[&ra, &(&rb * &rev_n[0].transpose())])?;
        let passed = rank(&left) == n && rank(&right) == n;
        Ok(InfinityCheck {
            passed,
            grade,
            failure: (!passed).then_some(InfinityFailure::ReversedStateBlockRankDeficient),
        })
    }
}

/// A dual basis of `K`: a polynomial, primitive-row basis of the right
/// nullspace over `F(λ)`, so that `K N^T = 0`.
pub fn dual_basis_for<F: ExactField>(k: &PolyMatrix<F>) -> RatMatrix<F> {
    if k.rows() == 0 {
        return Mat::identity(k.cols());
    }
    polynomial_nullspace(&k.to_rat()).to_rat()
}

/// Row degrees and, when they agree, the common degree `t`. A uniform `t`
/// is only reported if `rev_t N` is defined at 0 with no zero row there.
pub fn row_degree_profile<F: ExactField>(n: &RatMatrix<F>) -> RowDegreeProfile {
    let row_degrees = n.row_degrees();
    let first = row_degrees.first().copied();
    let uniform = row_degrees.iter().all(|d| Some(*d) == first);
    let t = match (uniform, first) {
        (true, Some(Degree::Finite(t))) => {
            let ok = n.reverse(t).eval(&F::zero()).is_ok_and(|v| (0..v.rows()).all(|i| v.row(i).iter().any(|e| !e.is_zero())));
            ok.then_some(t)
        }
        (true, None) => Some(0),
        _ => None,
    };
    RowDegreeProfile { row_degrees, t }
}

/// A strong block minimal bases pencil `[M K2^T; K1 0]` with polynomial
/// dual minimal bases `N1`, `N2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SbmbPencil<F = Rational> {
    pub m: PolyMatrix<F>,
    pub k1: PolyMatrix<F>,
    pub k2: PolyMatrix<F>,
    pub n1: PolyMatrix<F>,
    pub n2: PolyMatrix<F>,
}

impl<F: ExactField> SbmbPencil<F> {
    /// The polynomial `N2 M N1^T` this pencil is associated with.
    pub fn polynomial(&self) -> PolyMatrix<F> {
        &(&self.n2 * &self.m) * &self.n1.transpose()
    }
}

/// Block Frobenius-type pencil for `D(λ) = Σ_j D_j λ^j` (coefficients lowest
/// first, degree `d ≥ 1`): `M = [D_d λ + D_{d-1}, D_{d-2}, …, D_0]`,
/// `K1 = L_{d-1}(λ) ⊗ I_m`, `N1 = [λ^{d-1} … 1] ⊗ I_m`, `K2` empty.
pub fn frobenius_pencil<F: ExactField>(coeffs: &[Mat<F>]) -> Result<SbmbPencil<F>> {
    let d = coeffs.len().checked_sub(1).filter(|&d| d >= 1).ok_or_else(|| mismatch("degree must be at least 1"))?;
    let (p, m) = coeffs[0].shape();
    if coeffs.iter().any(|c| c.shape() != (p, m)) {
        return Err(mismatch("coefficients of different shapes"));
    }
    let mut blocks = vec![PolyMatrix::pencil(&coeffs[d - 1], &coeffs[d])];
    for j in (0..d - 1).rev() {
        blocks.push(coeffs[j].to_poly());
    }
    let refs: Vec<&PolyMatrix<F>> = blocks.iter().collect();
    let mm = Mat::hstack(&refs)?;
    let lam = Poly::x();
    let one = Poly::one();
    let l = Mat::from_fn(d - 1, d, |i, j| {
        if j == i {
            -one.clone()
        } else if j == i + 1 {
            lam.clone()
        } else {
            Poly::zero()
        }
    });
    let k1 = l.kron(&Mat::identity(m));
    let row = Mat::from_fn(1, d, |_, j| Poly::monomial(F::one(), d - 1 - j));
    let n1 = row.kron(&Mat::identity(m));
    Ok(SbmbPencil { m: mm, k1, k2: Mat::zeros(0, p), n1, n2: Mat::identity(p) })
}

/// `rank [B, AB, …, A^{n-1}B] = n` and the dual observability test.
pub fn is_minimal_realization<F: ExactField>(a: &Mat<F>, b: &Mat<F>, c: &Mat<F>) -> bool {
    let n = a.rows();
    if n == 0 {
        return true;
    }
    let mut blocks = vec![b.clone()];
    for _ in 1..n {
        let next = a * blocks.last().unwrap();
        blocks.push(next);
    }
    let refs: Vec<&Mat<F>> = blocks.iter().collect();
    let ctrb = Mat::hstack(&refs).unwrap();
    let at = a.transpose();
    let mut oblocks = vec![c.transpose()];
    for _ in 1..n {
        let next = &at * oblocks.last().unwrap();
        oblocks.push(next);
    }
    let orefs: Vec<&Mat<F>> = oblocks.iter().collect();
    let obsv = Mat::hstack(&orefs).unwrap();
    rank(&ctrb) == n && rank(&obsv) == n
}

/// Constant `K̂` with `K̂ N^T = I`, solved coefficientwise from
/// `K̂ [N_0^T … N_d^T] = [I 0 … 0]`, and checked so that `[K; K̂]` is
/// unimodular.
fn unimodular_completion<F: ExactField>(k: &PolyMatrix<F>, nb: &PolyMatrix<F>, side: Side) -> Result<Mat<F>> {
    let rows = nb.rows();
    let deg = nb.degree().finite().unwrap_or(0) as usize;
    let coeff_rows: Vec<Mat<F>> = (0..=deg).map(|j| nb.coeff(j)).collect();
    let refs: Vec<&Mat<F>> = coeff_rows.iter().collect();
    let lhs = Mat::vstack(&refs)?;
    let mut rhs = Mat::zeros(lhs.rows(), rows);
    for i in 0..rows {
        rhs[(i, i)] = F::one();
    }
    let khat = solve(&lhs, &rhs).map_err(|_| Error::UnimodularCompletionFailed(side))?.transpose();
    let u = Mat::vstack(&[k, &khat.to_poly()])?;
    let det = poly_det(&u)?;
    if det.is_zero() || !det.is_constant() {
        return Err(Error::UnimodularCompletionFailed(side));
    }
    Ok(khat)
}

/// Strong linearization of `D(λ) + C(λI - A)^{-1}B`:
/// `[X(λI-A)Y, X B K̂1, 0; -K̂2^T C Y, M, K2^T; 0, K1, 0]`.
pub fn build_sbmb_linearization<F: ExactField>(
    pencil: &SbmbPencil<F>,
    (a, b, c): (&Mat<F>, &Mat<F>, &Mat<F>),
    x: &Mat<F>,
    y: &Mat<F>,
) -> Result<BfrParts<F>> {
    let deg = |m: &PolyMatrix<F>| m.degree().finite().unwrap_or(0);
    let deg_d = deg(&pencil.polynomial());
    let expected = deg(&pencil.n1) + deg(&pencil.n2) + 1;
    if deg_d != expected {
        return Err(Error::NotSharpDegree { deg_d, expected });
    }
    if !is_minimal_realization(a, b, c) {
        return Err(Error::RealizationNotMinimal);
    }
    let n = a.rows();
    if x.shape() != (n, n) || y.shape() != (n, n) || rank(x) != n || rank(y) != n {
        return Err(mismatch("X and Y must be nonsingular n×n"));
    }
    let kh1 = unimodular_completion(&pencil.k1, &pencil.n1, Side::First)?;
    let kh2 = unimodular_completion(&pencil.k2, &pencil.n2, Side::Second)?;
    let state = PolyMatrix::pencil(&-a.clone(), &Mat::identity(n));
    let parts = BfrParts {
        a: &(&x.to_poly() * &state) * &y.to_poly(),
        b: (&(x * b) * &kh1).to_poly(),
        c: (&(&kh2.transpose() * c) * y).to_poly(),
        m: pencil.m.clone(),
        k1: pencil.k1.clone(),
        k2: pencil.k2.clone(),
        n1: pencil.n1.to_rat(),
        n2: pencil.n2.to_rat(),
    };
    parts.validate()?;
    Ok(parts)
}

/// `D(λ) + C(λI - A)^{-1}B` as an exact rational matrix.
pub fn realization_transfer<F: ExactField>(d: &PolyMatrix<F>, a: &Mat<F>, b: &Mat<F>, c: &Mat<F>) -> Result<RatMatrix<F>> {
    let n = a.rows();
    let state = PolyMatrix::pencil(&-a.clone(), &Mat::identity(n));
    let s = SystemMatrix::new(state, b.to_poly(), c.to_poly(), Mat::zeros(d.rows(), d.cols()))?;
    s.transfer_function()?.try_add(&d.to_rat())
}
