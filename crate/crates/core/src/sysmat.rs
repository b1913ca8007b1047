//! Linear polynomial system matrices `[A B; -C D]`, their transfer
//! functions, minimality, and verification that a pencil linearizes a
//! rational matrix on a region or at infinity.

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::exactalg::linalg::{clear_row_denominators, normal_rank, poly_normal_rank, poly_solve, rank};
use crate::exactalg::{ExactField, Mat, Poly, PolyMatrix, RatFun, RatMatrix, Rational};
use crate::smithmcmillan::{smith_invariant_factors, SmithMcMillan};

/// Where a property is checked.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionSpec<F = Rational> {
    /// Finitely many points.
    FiniteSet(Vec<F>),
    /// The whole field except the listed points.
    Cofinite(Vec<F>),
    /// The point at infinity with a grade.
    Infinity { grade: i64 },
}

impl<F: ExactField> RegionSpec<F> {
    pub fn contains(&self, x: &F) -> bool {
        match self {
            RegionSpec::FiniteSet(p) => p.contains(x),
            RegionSpec::Cofinite(ex) => !ex.contains(x),
            RegionSpec::Infinity { .. } => false,
        }
    }
}

/// Where a check failed: a concrete point, an irreducible-over-the-field
/// factor whose roots are the failing points, or everywhere (normal rank
/// already too small).
#[derive(Clone, Debug, PartialEq)]
pub enum Witness<F = Rational> {
    Point(F),
    Factor(Poly<F>),
    Generic,
}

impl<F: ExactField> fmt::Display for Witness<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Point(x) => write!(f, "{x}"),
            Witness::Factor(p) => write!(f, "roots of {p}"),
            Witness::Generic => write!(f, "every point"),
        }
    }
}

/// Point witness if `p` has a root in the field, otherwise the symbolic factor.
pub(crate) fn witness_for<F: ExactField>(p: &Poly<F>) -> Witness<F> {
    let (roots, rest) = p.exact_roots();
    match roots.into_iter().next() {
        Some((r, _)) => Witness::Point(r),
        None => Witness::Factor(rest.squarefree()),
    }
}

/// Certify that the rational matrix `x` is defined and has rank `k` at every
/// point of the region. Cofinite regions use the `k`-th determinantal divisor
/// of the row-denominator-cleared matrix.
pub(crate) fn rank_in_region<F: ExactField>(
    x: &RatMatrix<F>,
    k: usize,
    region: &RegionSpec<F>,
) -> std::result::Result<(), Witness<F>> {
    match region {
        RegionSpec::FiniteSet(points) => {
            for p in points {
                match x.eval(p) {
                    Ok(v) if rank(&v) == k => {}
                    _ => return Err(Witness::Point(p.clone())),
                }
            }
            Ok(())
        }
        RegionSpec::Cofinite(excl) => {
            for e in x.entries() {
                let d = e.den().strip_roots(excl);
                if !d.is_constant() {
                    return Err(witness_for(&d));
                }
            }
            if k == 0 {
                return Ok(());
            }
            let p = clear_row_denominators(x);
            let s = smith_invariant_factors(&p);
            if s.len() < k {
                return Err(Witness::Generic);
            }
            let dk = s[..k].iter().fold(Poly::one(), |acc, f| acc * f.clone()).strip_roots(excl);
            if dk.is_constant() {
                Ok(())
            } else {
                Err(witness_for(&dk))
            }
        }
        RegionSpec::Infinity { .. } => Err(Witness::Generic),
    }
}

/// Linear polynomial system matrix `[A B; -C D]` with state dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrix<F = Rational> {
    pub a: PolyMatrix<F>,
    pub b: PolyMatrix<F>,
    pub c: PolyMatrix<F>,
    pub d: PolyMatrix<F>,
}

/// Outcome of [`check_linearization_in`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationReport<F = Rational> {
    pub is_linearization: bool,
    pub rank_condition: bool,
    pub pole_match: bool,
    pub zero_match: bool,
    pub witness: Option<Witness<F>>,
}

impl<F: ExactField> SystemMatrix<F> {
    pub fn new(a: PolyMatrix<F>, b: PolyMatrix<F>, c: PolyMatrix<F>, d: PolyMatrix<F>) -> Result<Self> {
        let n = a.rows();
        let ok = a.cols() == n
            && b.rows() == n
            && c.cols() == n
            && c.rows() == d.rows()
            && b.cols() == d.cols();
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        let degree_ok = [&a, &b, &c, &d].iter().all(|m| m.degree() <= crate::exactalg::Degree::Finite(1));
        if !degree_ok {
            return Err(Error::DimensionMismatch("system matrix blocks must have degree at most 1".into()));
        }
        Ok(SystemMatrix { a, b, c, d })
    }

    /// A pencil with no state (`n = 0`).
    pub fn stateless(d: PolyMatrix<F>) -> Self {
        SystemMatrix { a: Mat::zeros(0, 0), b: Mat::zeros(0, d.cols()), c: Mat::zeros(d.rows(), 0), d }
    }

    /// Split a pencil whose leading `n×n` block is the state matrix.
    pub fn from_pencil(l: &PolyMatrix<F>, n: usize) -> Result<Self> {
        let (r, c) = l.shape();
        if n > r || n > c {
            return Err(Error::DimensionMismatch("state larger than pencil".into()));
        }
        SystemMatrix::new(
            l.submatrix(0..n, 0..n),
            l.submatrix(0..n, n..c),
            -l.submatrix(n..r, 0..n),
            l.submatrix(n..r, n..c),
        )
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn pencil(&self) -> PolyMatrix<F> {
        let n = self.n();
        let (p, m) = self.d.shape();
        let neg_c = -self.c.clone();
        Mat::blocks(&[n, p], &[n, m], &[vec![Some(&self.a), Some(&self.b)], vec![Some(&neg_c), Some(&self.d)]])
            .expect("conformal blocks")
    }

    pub fn is_regular(&self) -> bool {
        poly_normal_rank(&self.a) == self.n()
    }

    /// `D + C A^{-1} B`.
    pub fn transfer_function(&self) -> Result<RatMatrix<F>> {
        let d = self.d.to_rat();
        if self.n() == 0 {
            return Ok(d);
        }
        let (y, den) = poly_solve(&self.a, &self.b).map_err(|_| Error::SingularStateMatrix)?;
        let cy = &self.c * &y;
        let cab = cy.try_map(|p| RatFun::new(p.clone(), den.clone()))?;
        Ok(&d + &cab)
    }

    pub fn is_minimal_at(&self, x: &F) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let ac = Mat::vstack(&[&self.a, &self.c]).unwrap().eval(x);
        let ab = Mat::hstack(&[&self.a, &self.b]).unwrap().eval(x);
        rank(&ac) == n && rank(&ab) == n
    }

    /// `Ok` if minimal at every point of the region, else a failing witness.
    pub fn minimality_in(&self, region: &RegionSpec<F>) -> std::result::Result<(), Witness<F>> {
        let n = self.n();
        if n == 0 {
            return Ok(());
        }
        let ac = Mat::vstack(&[&self.a, &self.c]).unwrap().to_rat();
        let ab = Mat::hstack(&[&self.a, &self.b]).unwrap().to_rat();
        rank_in_region(&ac, n, region)?;
        rank_in_region(&ab, n, region)
    }

    pub fn is_minimal_in(&self, region: &RegionSpec<F>) -> bool {
        self.minimality_in(region).is_ok()
    }

    /// Blockwise 1-reversal.
    pub fn reverse(&self) -> Self {
        let rev = |m: &PolyMatrix<F>| m.reverse(1).to_poly().expect("pencil reversal is polynomial");
        SystemMatrix { a: rev(&self.a), b: rev(&self.b), c: rev(&self.c), d: rev(&self.d) }
    }
}

/// Verify that `p` linearizes `g` on the region via the spectral
/// characterization: rank identity, pole structure of `g` equal to the
/// elementary divisors of the state matrix, zero structure of `g` equal to
/// the elementary divisors of the whole pencil.
pub fn check_linearization_in<F: ExactField>(
    p: &SystemMatrix<F>,
    g: &RatMatrix<F>,
    region: &RegionSpec<F>,
) -> Result<LinearizationReport<F>> {
    if let RegionSpec::Infinity { grade } = region {
        return check_linearization_at_infinity(p, g, *grade);
    }
    if !p.is_regular() {
        return Err(Error::StateNotRegular);
    }
    if let Err(w) = p.minimality_in(region) {
        return Err(Error::PreconditionNotMinimal { witness: w.to_string() });
    }
    let n = p.n();
    let l = p.pencil();
    let s = (l.rows() - n) as i64 - g.rows() as i64;
    let s_cols = (l.cols() - n) as i64 - g.cols() as i64;
    if s < 0 || s != s_cols {
        return Err(Error::DimensionMismatch(format!(
            "pencil {:?} with state {n} cannot linearize a {}x{} matrix",
            l.shape(),
            g.rows(),
            g.cols()
        )));
    }
    let rank_condition = poly_normal_rank(&l) == normal_rank(g) + n + s as usize;
    let sm = SmithMcMillan::new(g);
    let (pole_match, zero_match, witness) = match region {
        RegionSpec::Cofinite(excl) => compare_global(&sm, &p.a, &l, excl),
        RegionSpec::FiniteSet(points) => compare_pointwise(&sm, &p.a, &l, points),
        RegionSpec::Infinity { .. } => unreachable!(),
    };
    Ok(LinearizationReport {
        is_linearization: rank_condition && pole_match && zero_match,
        rank_condition,
        pole_match,
        zero_match,
        witness: if rank_condition { witness } else { witness.or(Some(Witness::Generic)) },
    })
}

/// Nonconstant members of an invariant-factor list after removing roots at
/// excluded points, in divisibility order.
fn stripped<F: ExactField>(factors: impl IntoIterator<Item = Poly<F>>, excl: &[F]) -> Vec<Poly<F>> {
    factors.into_iter().map(|f| f.strip_roots(excl).monic()).filter(|f| !f.is_constant()).collect()
}

fn first_difference<F: ExactField>(a: &[Poly<F>], b: &[Poly<F>]) -> Witness<F> {
    let prod = |v: &[Poly<F>]| v.iter().fold(Poly::one(), |acc, f| acc * f.clone());
    let all = prod(a) * prod(b);
    let (roots, _) = all.exact_roots();
    for (r, _) in roots {
        let ma: Vec<_> = a.iter().map(|f| f.multiplicity_at(&r)).filter(|m| *m != Some(0)).collect();
        let mb: Vec<_> = b.iter().map(|f| f.multiplicity_at(&r)).filter(|m| *m != Some(0)).collect();
        if ma != mb {
            return Witness::Point(r);
        }
    }
    // mismatch lives on roots outside the field
    let g = prod(a).gcd(&prod(b));
    let diff = prod(a).exact_div(&g).unwrap() * prod(b).exact_div(&g).unwrap();
    if diff.is_constant() {
        Witness::Factor(all.squarefree())
    } else {
        Witness::Factor(diff.squarefree())
    }
}

fn compare_global<F: ExactField>(
    sm: &SmithMcMillan<F>,
    a: &PolyMatrix<F>,
    l: &PolyMatrix<F>,
    excl: &[F],
) -> (bool, bool, Option<Witness<F>>) {
    // ψ_{i+1} | ψ_i, so reverse to get divisibility order
    let g_poles = stripped(sm.psi.iter().rev().cloned(), excl);
    let a_divs = stripped(smith_invariant_factors(a), excl);
    let g_zeros = stripped(sm.eps.iter().cloned(), excl);
    let l_divs = stripped(smith_invariant_factors(l), excl);
    let pole_match = g_poles == a_divs;
    let zero_match = g_zeros == l_divs;
    let witness = if !pole_match {
        Some(first_difference(&g_poles, &a_divs))
    } else if !zero_match {
        Some(first_difference(&g_zeros, &l_divs))
    } else {
        None
    };
    (pole_match, zero_match, witness)
}

/// Positive invariant orders of a polynomial matrix at `x`, i.e. its partial
/// multiplicities there.
fn partial_multiplicities<F: ExactField>(factors: &[Poly<F>], x: &F) -> Vec<usize> {
    factors.iter().map(|f| f.multiplicity_at(x).unwrap_or(0)).filter(|&m| m > 0).collect()
}

fn compare_pointwise<F: ExactField>(
    sm: &SmithMcMillan<F>,
    a: &PolyMatrix<F>,
    l: &PolyMatrix<F>,
    points: &[F],
) -> (bool, bool, Option<Witness<F>>) {
    let a_f = smith_invariant_factors(a);
    let l_f = smith_invariant_factors(l);
    let (mut pole_match, mut zero_match, mut witness) = (true, true, None);
    for x in points {
        let local = sm.local(x);
        let pm = local.poles() == partial_multiplicities(&a_f, x);
        let zm = local.zeros() == partial_multiplicities(&l_f, x);
        if (!pm || !zm) && witness.is_none() {
            witness = Some(Witness::Point(x.clone()));
        }
        pole_match &= pm;
        zero_match &= zm;
    }
    (pole_match, zero_match, witness)
}

/// Linearization at infinity of grade `g`: the 1-reversal of `p` must
/// linearize `rev_g` of the matrix at 0.
pub fn check_linearization_at_infinity<F: ExactField>(
    p: &SystemMatrix<F>,
    g: &RatMatrix<F>,
    grade: i64,
) -> Result<LinearizationReport<F>> {
    let rp = p.reverse();
    let rg = g.reverse(grade);
    let zero = F::zero();
    if !rp.is_minimal_at(&zero) {
        return Err(Error::PreconditionNotMinimal { witness: "0 (reversed pencil)".into() });
    }
    check_linearization_in(&rp, &rg, &RegionSpec::FiniteSet(vec![zero]))
}
