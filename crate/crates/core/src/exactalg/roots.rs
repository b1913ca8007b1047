//! Root finding for polynomials: numeric roots of complex polynomials and
//! exact recovery of roots that lie in the coefficient field.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Poly;
use super::scalar::{convergents, rational_to_f64, ExactField, Rational};

/// All complex roots of `p` (with multiplicity), by Weierstrass iteration
/// polished with Newton steps. Roots are sorted by real then imaginary part.
pub fn numeric_roots(p: &Poly<Complex64>) -> Vec<Complex64> {
    let Some(d) = p.degree() else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let lead = *p.leading().unwrap();
    let c: Vec<Complex64> = p.coeffs().iter().map(|a| a / lead).collect();
    let monic = Poly::new(c.clone());
    // Cauchy bound for the initial circle
    let radius = 1.0 + c[..d].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(radius.min(1e6) * 0.9, theta)
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let num = monic.eval(&z[i]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = num / den;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    let dp = monic.derivative();
    for root in z.iter_mut() {
        for _ in 0..3 {
            let f = monic.eval(root);
            let fp = dp.eval(root);
            if fp.norm() == 0.0 {
                break;
            }
            let next = *root - f / fp;
            if monic.eval(&next).norm() < f.norm() {
                *root = next;
            } else {
                break;
            }
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    z
}

/// Elements of `F` that may be roots of `p`. Every true root in `F` with
/// moderate height is included; callers must verify candidates exactly.
pub(crate) fn exact_root_candidates<F: ExactField>(p: &Poly<F>) -> Vec<F> {
    let mut out = Vec::new();
    if p.is_constant() {
        return out;
    }
    if p.coeff(0).is_zero() {
        out.push(F::zero());
    }
    if p.coeffs().iter().all(|c| c.is_real()) {
        let real: Vec<Rational> = p.coeffs().iter().map(|c| c.parts().0).collect();
        out.extend(divisor_candidates(&real).into_iter().map(F::from_rational));
    }
    for z in numeric_roots(&p.to_c64()) {
        if let Some(c) = snap_root(p, z) {
            out.push(c);
        }
    }
    out
}

/// Rational-root-theorem candidates `±a/b` with `a | c_0` and `b | c_n`
/// after clearing denominators. Skipped when the integers are too large to
/// factor by trial division.
fn divisor_candidates(coeffs: &[Rational]) -> Vec<Rational> {
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let first = ints.iter().position(|c| !c.is_zero());
    let (Some(first), Some(last)) = (first, ints.last()) else {
        return Vec::new();
    };
    let (Some(c0), Some(cn)) = (ints[first].abs().to_u64(), last.abs().to_u64()) else {
        return Vec::new();
    };
    if c0 > 1_000_000_000_000 || cn > 1_000_000_000_000 {
        return Vec::new();
    }
    let (dp, dq) = (divisors(c0), divisors(cn));
    if dp.len() * dq.len() > 20_000 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for &a in &dp {
        for &b in &dq {
            let q = Rational::new(BigInt::from(a), BigInt::from(b));
            out.push(q.clone());
            out.push(-q);
        }
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            small.push(k);
            if k * k != n {
                large.push(n / k);
            }
        }
        k += 1;
        if k > 1_000_000 {
            break;
        }
    }
    small.extend(large.into_iter().rev());
    small
}

/// Try continued-fraction reconstructions of a numeric root and keep the
/// first that is an exact root.
fn snap_root<F: ExactField>(p: &Poly<F>, z: Complex64) -> Option<F> {
    let tol = 1e-6 * (1.0 + z.norm());
    let near = |x: f64| -> Vec<Rational> {
        let mut c: Vec<Rational> = convergents(x, 1_000_000_000, 40)
            .into_iter()
            .filter(|q| (rational_to_f64(q) - x).abs() <= tol)
            .collect();
        if x.abs() <= tol {
            c.insert(0, Rational::zero());
        }
        c.truncate(6);
        c
    };
    let res = near(z.re);
    let ims = if z.im.abs() <= tol { vec![Rational::zero()] } else { near(z.im) };
    for re in &res {
        for im in &ims {
            if let Some(c) = F::from_parts(re.clone(), im.clone()) {
                if p.eval(&c).is_zero() {
                    return Some(c);
                }
            }
        }
    }
    None
}
