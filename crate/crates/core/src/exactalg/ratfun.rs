use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::{Degree, Poly};
use super::scalar::{ExactField, Rational};
use crate::error::{Error, Result};

/// Reduced rational function `num / den`: `gcd(num, den) = 1` and `den` is
/// monic. Zero is `0 / 1`.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFun<F = Rational> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: ExactField> RatFun<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFun::zero());
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g).expect("gcd divides numerator");
        let den = den.exact_div(&g).expect("gcd divides denominator");
        let lead = den.leading().unwrap().clone();
        let inv = F::one() / lead;
        Ok(RatFun { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn constant(c: F) -> Self {
        RatFun::from_poly(Poly::constant(c))
    }

    pub fn x() -> Self {
        RatFun::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    /// `deg num - deg den`; [`Degree::NegInfinity`] for zero.
    pub fn degree(&self) -> Degree {
        match (self.num.degree(), self.den.degree()) {
            (Some(a), Some(b)) => Degree::Finite(a as i64 - b as i64),
            _ => Degree::NegInfinity,
        }
    }

    pub fn is_defined_at(&self, x: &F) -> bool {
        !self.den.eval(x).is_zero()
    }

    pub fn eval(&self, x: &F) -> Result<F> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::NotDefinedAt(x.to_string()));
        }
        Ok(self.num.eval(x) / d)
    }

    /// Floating-point evaluation. Returns a non-finite value at poles.
    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.num.to_c64().eval(&x) / self.den.to_c64().eval(&x)
    }

    /// `λ^g · r(1/λ)`, reduced.
    pub fn reverse(&self, g: i64) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        // λ^g n(1/λ)/d(1/λ) = λ^(g - dn + dd) rev(n)/rev(d)
        let num = self.num.reverse(dn);
        let den = self.den.reverse(dd);
        let shift = g - dn + dd;
        let base = num / den;
        if shift >= 0 {
            base * RatFun::from_poly(Poly::monomial(F::one(), shift as usize))
        } else {
            base / RatFun::from_poly(Poly::monomial(F::one(), (-shift) as usize))
        }
    }

    pub fn inv(&self) -> Result<Self> {
        RatFun::new(self.den.clone(), self.num.clone())
    }

    /// Order of `r` at `x`: multiplicity as a zero minus multiplicity as a
    /// pole. `None` for the zero function.
    pub fn order_at(&self, x: &F) -> Option<i64> {
        let zn = self.num.multiplicity_at(x)? as i64;
        let zd = self.den.multiplicity_at(x).unwrap() as i64;
        Some(zn - zd)
    }
}

impl<F: ExactField> Zero for RatFun<F> {
    fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: ExactField> One for RatFun<F> {
    fn one() -> Self {
        RatFun { num: Poly::one(), den: Poly::one() }
    }
}

impl<F: ExactField> Add for RatFun<F> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        if self.den == rhs.den {
            return RatFun::new(self.num + rhs.num, self.den).unwrap();
        }
        let g = self.den.gcd(&rhs.den);
        let a = rhs.den.exact_div(&g).unwrap();
        let b = self.den.exact_div(&g).unwrap();
        RatFun::new(self.num * a.clone() + rhs.num * b, self.den * a).unwrap()
    }
}

impl<F: ExactField> Sub for RatFun<F> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: ExactField> Neg for RatFun<F> {
    type Output = Self;

    fn neg(self) -> Self {
        RatFun { num: -self.num, den: self.den }
    }
}

impl<F: ExactField> Mul for RatFun<F> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return RatFun::zero();
        }
        if self.is_poly() && rhs.is_poly() {
            return RatFun::from_poly(self.num * rhs.num);
        }
        // cross-cancel before multiplying to keep degrees down
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = self.num.exact_div(&g1).unwrap() * rhs.num.exact_div(&g2).unwrap();
        let den = self.den.exact_div(&g2).unwrap() * rhs.den.exact_div(&g1).unwrap();
        RatFun::new(num, den).unwrap()
    }
}

impl<F: ExactField> Div for RatFun<F> {
    type Output = Self;

    /// Panics on division by zero.
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by the zero rational function")
    }
}

impl<F: ExactField> From<Poly<F>> for RatFun<F> {
    fn from(p: Poly<F>) -> Self {
        RatFun::from_poly(p)
    }
}

impl<F: ExactField> fmt::Display for RatFun<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
