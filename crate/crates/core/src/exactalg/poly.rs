use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::scalar::{ExactField, Scalar};
use super::RatFun;

/// Degree of a polynomial or rational function. The zero element has degree
/// [`Degree::NegInfinity`], which orders below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Dense univariate polynomial, coefficients lowest degree first. The zero
/// polynomial is the empty coefficient list; otherwise the last coefficient
/// is nonzero.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monic linear factor `λ - root`.
    pub fn linear(root: T) -> Self {
        Poly::new(vec![-root, T::one()])
    }

    /// `λ`.
    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `λ^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> Degree {
        match self.degree() {
            Some(d) => Degree::Finite(d as i64),
            None => Degree::NegInfinity,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiply by `λ^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * int_scalar::<T>(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Division with remainder. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dl = divisor.leading().expect("division by the zero polynomial").clone();
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / dl.clone();
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Quotient if `divisor` divides `self` exactly.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_c64(&self) -> Poly<Complex64> {
        self.map(|c| c.to_c64())
    }

    /// `λ^g · p(1/λ)`, reduced. Polynomial whenever `g >= deg p`.
    pub fn reverse(&self, g: i64) -> RatFun<T>
    where
        T: ExactField,
    {
        let Some(d) = self.degree() else {
            return RatFun::zero();
        };
        // λ^g p(1/λ) = λ^(g-d) · rev_d p(λ)
        let mut rev = self.coeffs.clone();
        rev.reverse();
        let rev = Poly::new(rev);
        let shift = g - d as i64;
        if shift >= 0 {
            RatFun::from_poly(rev.shift(shift as usize))
        } else {
            RatFun::new(rev, Poly::monomial(T::one(), (-shift) as usize))
                .expect("monomial denominator is nonzero")
        }
    }
}

fn int_scalar<T: Scalar>(k: i64) -> T {
    let mut acc = T::zero();
    let one = T::one();
    for _ in 0..k.unsigned_abs() {
        acc = acc + one.clone();
    }
    if k < 0 {
        -acc
    } else {
        acc
    }
}

impl<F: ExactField> Poly<F> {
    /// Monic greatest common divisor, by the subresultant polynomial
    /// remainder sequence on denominator-cleared inputs. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let (mut a, mut b) = if self.coeffs.len() >= other.coeffs.len() {
            (self.clear_denominators(), other.clear_denominators())
        } else {
            (other.clear_denominators(), self.clear_denominators())
        };
        let mut g = F::one();
        let mut h = F::one();
        loop {
            let delta = (a.coeffs.len() - b.coeffs.len()) as u32;
            let lb = b.leading().unwrap().clone();
            let (_, r) = a.div_rem(&b);
            // pseudo-remainder lc(b)^(δ+1)·a mod b
            let r = r.scale(&pow_scalar(&lb, delta + 1));
            if r.is_zero() {
                return b.monic();
            }
            if r.is_constant() {
                return Poly::one();
            }
            let divisor = g.clone() * pow_scalar(&h, delta);
            a = b;
            b = r.scale(&(F::one() / divisor));
            g = a.leading().unwrap().clone();
            h = if delta == 0 {
                h
            } else {
                pow_scalar(&g, delta) / pow_scalar(&h, delta - 1)
            };
        }
    }

    /// Multiply through by the lcm of all coefficient denominators.
    pub fn clear_denominators(&self) -> Self {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator_lcm()));
        self.scale(&F::from_rational(super::Rational::from_integer(lcm)))
    }

    pub fn lcm(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        (self.clone() * other.exact_div(&g).unwrap()).monic()
    }

    /// Order of vanishing at `root`, by repeated exact division by `λ - root`.
    /// `None` for the zero polynomial.
    pub fn multiplicity_at(&self, root: &F) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let lin = Poly::linear(root.clone());
        let mut p = self.clone();
        let mut k = 0;
        while p.eval(root).is_zero() {
            p = p.exact_div(&lin).unwrap();
            k += 1;
        }
        Some(k)
    }

    /// How many times `factor` (nonconstant) divides `self`.
    pub fn multiplicity_of(&self, factor: &Self) -> Option<usize> {
        if self.is_zero() || factor.is_constant() {
            return None;
        }
        let mut p = self.clone();
        let mut k = 0;
        while let Some(q) = p.exact_div(factor) {
            p = q;
            k += 1;
        }
        Some(k)
    }

    /// Remove every factor `λ - e` for the listed points.
    pub fn strip_roots(&self, points: &[F]) -> Self {
        let mut p = self.clone();
        for e in points {
            if let Some(k) = p.multiplicity_at(e) {
                let lin = Poly::linear(e.clone());
                for _ in 0..k {
                    p = p.exact_div(&lin).unwrap();
                }
            }
        }
        p
    }

    pub fn squarefree(&self) -> Self {
        if self.is_constant() {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).unwrap().monic()
    }

    /// All exactly representable roots of `self` that could be found, each
    /// with multiplicity, plus the monic cofactor left after removing them.
    pub fn exact_roots(&self) -> (Vec<(F, usize)>, Self) {
        if self.is_zero() {
            return (Vec::new(), Poly::zero());
        }
        let sf = self.squarefree();
        let mut roots: Vec<F> = super::roots::exact_root_candidates(&sf)
            .into_iter()
            .filter(|r| sf.eval(r).is_zero())
            .collect();
        roots.sort_by(|a, b| a.canonical_cmp(b));
        roots.dedup();
        let mut rest = self.monic();
        let mut out = Vec::new();
        for r in roots {
            let k = rest.multiplicity_at(&r).unwrap_or(0);
            if k > 0 {
                let lin = Poly::linear(r.clone());
                for _ in 0..k {
                    rest = rest.exact_div(&lin).unwrap();
                }
                out.push((r, k));
            }
        }
        (out, rest)
    }
}

fn pow_scalar<T: Scalar>(x: &T, e: u32) -> T {
    let mut acc = T::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

impl<T: Scalar> Zero for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Scalar> One for Poly<T> {
    fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }
}

impl<T: Scalar> Add for Poly<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for Poly<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Neg for Poly<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Poly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<T: Scalar> Mul for Poly<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<F: ExactField> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if c.is_real() { c.to_string() } else { format!("({c})") };
            match k {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !c.is_one() {
                        write!(f, "{coef}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
