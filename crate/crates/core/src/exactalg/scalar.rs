use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Rational = BigRational;

/// Exact Gaussian rational `a + b·i` with `a, b ∈ ℚ`.
pub type GaussRational = Complex<BigRational>;

/// Coefficient type of a polynomial: exact rationals, Gaussian rationals or
/// complex doubles.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn to_c64(&self) -> Complex64;

    fn conj(&self) -> Self;

    /// Image of an exact rational; rounded for floating types.
    fn embed(q: &Rational) -> Self;

    fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }
}

/// A field whose arithmetic is exact. Everything on the oracle path is
/// generic over this trait.
pub trait ExactField: Scalar + fmt::Display {
    fn from_i64(v: i64) -> Self;

    fn from_rational(q: Rational) -> Self;

    /// Snap a complex double to the field. Doubles are dyadic rationals, so
    /// the conversion is exact; `None` if the value is not representable
    /// (a nonzero imaginary part for a real field, or a non-finite value).
    fn from_c64(z: Complex64) -> Option<Self>;

    /// Embedding into the Gaussian rationals.
    fn to_gauss(&self) -> GaussRational;

    /// Least common multiple of the denominators of all components.
    fn denominator_lcm(&self) -> BigInt;

    /// Total order used only to make outputs deterministic.
    fn canonical_cmp(&self, other: &Self) -> Ordering;

    fn is_real(&self) -> bool;

    /// Real and imaginary parts as exact rationals.
    fn parts(&self) -> (Rational, Rational);

    fn from_parts(re: Rational, im: Rational) -> Option<Self>;
}

impl Scalar for Rational {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn embed(q: &Rational) -> Self {
        q.clone()
    }
}

impl Scalar for GaussRational {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn embed(q: &Rational) -> Self {
        Complex::new(q.clone(), Rational::zero())
    }
}

impl Scalar for Complex64 {
    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn embed(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
}

impl ExactField for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: Rational) -> Self {
        q
    }

    fn from_c64(z: Complex64) -> Option<Self> {
        if z.im != 0.0 {
            return None;
        }
        Rational::from_float(z.re)
    }

    fn to_gauss(&self) -> GaussRational {
        Complex::new(self.clone(), Rational::zero())
    }

    fn denominator_lcm(&self) -> BigInt {
        self.denom().clone()
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn is_real(&self) -> bool {
        true
    }

    fn parts(&self) -> (Rational, Rational) {
        (self.clone(), Rational::zero())
    }

    fn from_parts(re: Rational, im: Rational) -> Option<Self> {
        im.is_zero().then_some(re)
    }
}

impl ExactField for GaussRational {
    fn from_i64(v: i64) -> Self {
        Complex::new(Rational::from_i64(v), Rational::zero())
    }

    fn from_rational(q: Rational) -> Self {
        Complex::new(q, Rational::zero())
    }

    fn from_c64(z: Complex64) -> Option<Self> {
        Some(Complex::new(Rational::from_float(z.re)?, Rational::from_float(z.im)?))
    }

    fn to_gauss(&self) -> GaussRational {
        self.clone()
    }

    fn denominator_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn parts(&self) -> (Rational, Rational) {
        (self.re.clone(), self.im.clone())
    }

    fn from_parts(re: Rational, im: Rational) -> Option<Self> {
        Some(Complex::new(re, im))
    }
}

/// Nearest double to an exact rational (correct for huge numerators and
/// denominators, unlike a naive `n as f64 / d as f64`).
pub fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let (n, d) = (q.numer(), q.denom());
    if let (Some(nf), Some(df)) = (n.to_f64(), d.to_f64()) {
        if nf.is_finite() && df.is_finite() && nf.abs() < 1e300 && df < 1e300 {
            return nf / df;
        }
    }
    // Scale to keep 64 significant bits in the quotient.
    let shift = n.bits() as i64 - d.bits() as i64 - 64;
    let (num, den) = if shift > 0 {
        (n.clone(), d.clone() << shift as usize)
    } else {
        (n.clone() << (-shift) as usize, d.clone())
    };
    let quotient = (num / den).to_f64().unwrap_or(0.0);
    quotient * 2f64.powi(shift as i32)
}

/// Parse `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().ok()? };
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(Rational::new(numer, scale));
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Canonical text form of an exact rational: `"p/q"` or `"p"`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer-valued convenience constructor for any exact field.
pub fn int<F: ExactField>(v: i64) -> F {
    F::from_i64(v)
}

/// Best rational approximations of `x` by continued fractions, smallest
/// denominators first.
pub(crate) fn convergents(x: f64, max_den: i64, max_terms: usize) -> Vec<Rational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    for _ in 0..max_terms {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(Rational::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}
