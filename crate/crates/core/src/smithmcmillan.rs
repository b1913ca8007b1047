//! Smith forms of polynomial matrices and local Smith–McMillan structure of
//! rational matrices: invariant orders at finite points and at infinity,
//! pole and zero partial multiplicities.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{ExactField, Poly, PolyMatrix, RatMatrix, Rational};

/// A point of the extended plane. Infinity carries the grade used to
/// reverse the matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Point<F = Rational> {
    Finite(F),
    Infinity { grade: i64 },
}

impl<F: ExactField> fmt::Display for Point<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(x) => write!(f, "{x}"),
            Point::Infinity { grade } => write!(f, "inf (grade {grade})"),
        }
    }
}

/// Invariant orders `ν1 ≤ … ≤ νr` of a rational matrix at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalStructure<F = Rational> {
    pub point: Point<F>,
    pub orders: Vec<i64>,
    pub normal_rank: usize,
}

impl<F: ExactField> LocalStructure<F> {
    /// Pole partial multiplicities `-νi` for `νi < 0`, nondecreasing.
    pub fn poles(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.orders.iter().filter(|&&v| v < 0).map(|&v| (-v) as usize).collect();
        p.sort_unstable();
        p
    }

    /// Zero partial multiplicities `νi` for `νi > 0`, nondecreasing.
    pub fn zeros(&self) -> Vec<usize> {
        self.orders.iter().filter(|&&v| v > 0).map(|&v| v as usize).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleZeroEntry<F = Rational> {
    pub point: F,
    pub poles: Vec<usize>,
    pub zeros: Vec<usize>,
}

/// Poles and zeros at a list of points; points that are neither are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleZeroReport<F = Rational> {
    pub entries: Vec<PoleZeroEntry<F>>,
}

impl<F: ExactField> PoleZeroReport<F> {
    pub fn poles(&self) -> Vec<(F, Vec<usize>)> {
        self.entries.iter().filter(|e| !e.poles.is_empty()).map(|e| (e.point.clone(), e.poles.clone())).collect()
    }

    pub fn zeros(&self) -> Vec<(F, Vec<usize>)> {
        self.entries.iter().filter(|e| !e.zeros.is_empty()).map(|e| (e.point.clone(), e.zeros.clone())).collect()
    }
}

/// Finite points where a rational matrix can have poles or zeros. Factors
/// whose roots are not in the field stay symbolic in `unresolved`.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePoints<F = Rational> {
    pub points: Vec<F>,
    pub unresolved: Vec<Poly<F>>,
}

impl<F: ExactField> CandidatePoints<F> {
    pub fn require_rational(self) -> Result<Vec<F>> {
        if self.unresolved.is_empty() {
            Ok(self.points)
        } else {
            Err(Error::RootsNotRational(self.unresolved.iter().map(|p| p.to_string()).collect()))
        }
    }
}

/// Monic invariant factors `s1 | s2 | … | sr` of a polynomial matrix.
///
/// Elimination pivots on a nonzero entry of minimal degree (first in
/// row-major order among ties), reduces its row and column by division, and
/// repairs divisibility by adding offending rows into the pivot row.
pub fn smith_invariant_factors<F: ExactField>(p: &PolyMatrix<F>) -> Vec<Poly<F>> {
    let mut a = p.clone();
    let (rows, cols) = a.shape();
    let mut out = Vec::new();
    for k in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_degree_entry(&a, k) else {
                return out;
            };
            a.swap_rows(k, pi);
            a.swap_cols(k, pj);
            let piv = a[(k, k)].clone();
            let mut dirty = false;
            for i in k + 1..rows {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let (q, r) = a[(i, k)].div_rem(&piv);
                for j in k..cols {
                    let v = a[(i, j)].clone() - q.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
                a[(i, k)] = r.clone();
                dirty |= !r.is_zero();
            }
            for j in k + 1..cols {
                if a[(k, j)].is_zero() {
                    continue;
                }
                let (q, r) = a[(k, j)].div_rem(&piv);
                for i in k..rows {
                    let v = a[(i, j)].clone() - q.clone() * a[(i, k)].clone();
                    a[(i, j)] = v;
                }
                a[(k, j)] = r.clone();
                dirty |= !r.is_zero();
            }
            if dirty {
                continue;
            }
            let offender = (k + 1..rows)
                .find(|&i| (k + 1..cols).any(|j| a[(i, j)].exact_div(&piv).is_none()));
            match offender {
                Some(i) => {
                    for j in k..cols {
                        let v = a[(k, j)].clone() + a[(i, j)].clone();
                        a[(k, j)] = v;
                    }
                }
                None => break,
            }
        }
        out.push(a[(k, k)].monic());
    }
    out
}

fn min_degree_entry<F: ExactField>(a: &PolyMatrix<F>, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), usize)> = None;
    for i in k..a.rows() {
        for j in k..a.cols() {
            if let Some(d) = a[(i, j)].degree() {
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some(((i, j), d));
                }
            }
        }
    }
    best.map(|(pos, _)| pos)
}

/// `k`-th determinantal divisor (monic gcd of all `k×k` minors), read off the
/// invariant factors. Zero when `k` exceeds the normal rank.
pub fn determinantal_divisor<F: ExactField>(p: &PolyMatrix<F>, k: usize) -> Poly<F> {
    let s = smith_invariant_factors(p);
    if k > s.len() {
        return Poly::zero();
    }
    s[..k].iter().fold(Poly::one(), |acc, f| acc * f.clone())
}

/// Global Smith–McMillan data of `R = N/d`: `d` is the monic lcm of the
/// entry denominators and `s_i` the invariant factors of `N`. The reduced
/// diagonal entries are `ε_i/ψ_i = s_i/d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithMcMillan<F = Rational> {
    pub den: Poly<F>,
    pub factors: Vec<Poly<F>>,
    pub eps: Vec<Poly<F>>,
    pub psi: Vec<Poly<F>>,
}

impl<F: ExactField> SmithMcMillan<F> {
    pub fn new(r: &RatMatrix<F>) -> Self {
        let (n, den) = r.split_denominator();
        let factors = smith_invariant_factors(&n);
        let mut eps = Vec::new();
        let mut psi = Vec::new();
        for s in &factors {
            let g = s.gcd(&den);
            eps.push(s.exact_div(&g).unwrap().monic());
            psi.push(den.exact_div(&g).unwrap().monic());
        }
        SmithMcMillan { den, factors, eps, psi }
    }

    pub fn normal_rank(&self) -> usize {
        self.factors.len()
    }

    /// `Π ε_i`: finite zeros with their total multiplicities.
    pub fn zero_polynomial(&self) -> Poly<F> {
        self.eps.iter().fold(Poly::one(), |acc, e| acc * e.clone())
    }

    /// `Π ψ_i`: finite poles with their total multiplicities.
    pub fn pole_polynomial(&self) -> Poly<F> {
        self.psi.iter().fold(Poly::one(), |acc, e| acc * e.clone())
    }

    /// Invariant orders `ν_i = mult(s_i) - mult(d)` at `x`.
    pub fn orders_at(&self, x: &F) -> Vec<i64> {
        let md = self.den.multiplicity_at(x).unwrap_or(0) as i64;
        self.factors.iter().map(|s| s.multiplicity_at(x).unwrap_or(0) as i64 - md).collect()
    }

    pub fn local(&self, x: &F) -> LocalStructure<F> {
        LocalStructure { point: Point::Finite(x.clone()), orders: self.orders_at(x), normal_rank: self.normal_rank() }
    }

    /// Exact roots of `d` and of the largest invariant factor.
    pub fn candidate_points(&self) -> CandidatePoints<F> {
        let mut polys = vec![self.den.clone()];
        if let Some(last) = self.factors.last() {
            polys.push(last.clone());
        }
        candidate_points_of(&polys)
    }
}

pub(crate) fn candidate_points_of<F: ExactField>(polys: &[Poly<F>]) -> CandidatePoints<F> {
    let mut points: Vec<F> = Vec::new();
    let mut unresolved: Vec<Poly<F>> = Vec::new();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        let (roots, rest) = p.exact_roots();
        points.extend(roots.into_iter().map(|(r, _)| r));
        if !rest.is_constant() {
            let sf = rest.squarefree();
            if !unresolved.contains(&sf) {
                unresolved.push(sf);
            }
        }
    }
    points.sort_by(|a, b| a.canonical_cmp(b));
    points.dedup();
    CandidatePoints { points, unresolved }
}

pub fn local_orders<F: ExactField>(r: &RatMatrix<F>, x: &F) -> LocalStructure<F> {
    SmithMcMillan::new(r).local(x)
}

/// Structure at infinity: the orders of `rev_g R` at 0.
pub fn orders_at_infinity<F: ExactField>(r: &RatMatrix<F>, g: i64) -> LocalStructure<F> {
    let rev = r.reverse(g);
    let s = SmithMcMillan::new(&rev);
    LocalStructure { point: Point::Infinity { grade: g }, orders: s.orders_at(&F::zero()), normal_rank: s.normal_rank() }
}

pub fn pole_zero_in<F: ExactField>(r: &RatMatrix<F>, points: &[F]) -> PoleZeroReport<F> {
    let s = SmithMcMillan::new(r);
    let entries = points
        .iter()
        .filter_map(|x| {
            let l = s.local(x);
            let (poles, zeros) = (l.poles(), l.zeros());
            (!poles.is_empty() || !zeros.is_empty()).then(|| PoleZeroEntry { point: x.clone(), poles, zeros })
        })
        .collect();
    PoleZeroReport { entries }
}

pub fn candidate_points<F: ExactField>(r: &RatMatrix<F>) -> CandidatePoints<F> {
    SmithMcMillan::new(r).candidate_points()
}
