#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ratlin::exactalg::linalg::{inverse, rank};
use ratlin::exactalg::{Mat, Poly, PolyMatrix, RatFun, Rational, Scalar};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn poly(c: &[i64]) -> Poly<Rational> {
    Poly::new(c.iter().map(|&v| q(v, 1)).collect())
}

pub fn ratfun(n: &[i64], d: &[i64]) -> RatFun {
    RatFun::new(poly(n), poly(d)).unwrap()
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn to_c64(m: &Mat<Rational>) -> Mat<Complex64> {
    m.map(|v| v.to_c64())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize, lo: i64, hi: i64) -> Mat<Rational> {
    Mat::from_fn(r, c, |_, _| q(rng.gen_range(lo..=hi), 1))
}

pub fn rand_nonsingular(rng: &mut ChaCha8Rng, n: usize) -> Mat<Rational> {
    loop {
        let m = rand_mat(rng, n, n, -2, 2);
        if rank(&m) == n {
            return m;
        }
    }
}

pub fn rand_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> Poly<Rational> {
    let deg = rng.gen_range(0..=max_deg);
    Poly::new((0..=deg).map(|_| q(rng.gen_range(-4..=4), 1)).collect())
}

pub fn rand_poly_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, max_deg: usize) -> PolyMatrix {
    Mat::from_fn(r, c, |_, _| rand_poly(rng, max_deg))
}

/// `A = U T U^{-1}` with distinct integer eigenvalues `T_ii`, returned
/// together with `U` and `T`.
pub fn rand_rational_spectrum(rng: &mut ChaCha8Rng, n: usize) -> (Mat<Rational>, Mat<Rational>, Mat<Rational>) {
    let mut pool: Vec<i64> = (-3..=3).collect();
    let t = Mat::from_fn(n, n, |i, j| {
        if i == j {
            let k = rng.gen_range(0..pool.len());
            q(pool.swap_remove(k), 1)
        } else if j > i {
            q(rng.gen_range(-2..=2), 1)
        } else {
            q(0, 1)
        }
    });
    let u = Mat::from_fn(n, n, |i, j| if i == j { q(1, 1) } else if i > j { q(rng.gen_range(-2..=2), 1) } else { q(0, 1) });
    (&(&u * &t) * &inverse(&u).unwrap(), u, t)
}

pub fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly<Rational>> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|c| poly(&c))
}

pub fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Poly<Rational>> {
    small_poly(max_deg).prop_filter("nonzero", |p| p.degree().is_some())
}

/// Largest distance in a greedy nearest matching of two equal-size multisets.
pub fn match_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut left = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let (i, d) = left.iter().enumerate().map(|(i, y)| (i, (x - y).norm())).min_by(|u, v| u.1.total_cmp(&v.1))?;
        worst = worst.max(d);
        left.swap_remove(i);
    }
    Some(worst)
}
