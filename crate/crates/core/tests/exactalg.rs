mod common;

use common::*;
use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use ratlin::exactalg::linalg::{inverse, normal_rank, poly_det, poly_solve, rank};
use ratlin::exactalg::{ExactField, GaussRational, Mat, Poly, RatFun, RatMatrix, Rational, Scalar};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_multiplicative(a in small_poly(5), b in small_poly(5), seed in any::<u64>()) {
        let mut rng = rng(seed);
        let prod = a.clone() * b.clone();
        for _ in 0..64 {
            let x = q(rng.gen_range(-50..=50), rng.gen_range(1..=9));
            prop_assert_eq!(prod.eval(&x), a.eval(&x) * b.eval(&x));
        }
    }

    #[test]
    fn division_with_remainder(a in small_poly(6), b in nonzero_poly(3)) {
        let (quot, rem) = a.div_rem(&b);
        prop_assert_eq!(quot * b.clone() + rem.clone(), a);
        prop_assert!(rem.deg() < b.deg());
    }

    #[test]
    fn gcd_divides_both(a in nonzero_poly(4), b in nonzero_poly(4), common in nonzero_poly(2)) {
        let (x, y) = (a * common.clone(), b * common.clone());
        let g = x.gcd(&y);
        prop_assert!(x.exact_div(&g).is_some() && y.exact_div(&g).is_some());
        prop_assert!(g.exact_div(&common.monic()).is_some());
    }

    #[test]
    fn double_reversal_is_identity(p in nonzero_poly(5), extra in 0i64..3) {
        let g = p.degree().unwrap() as i64 + extra;
        prop_assert_eq!(p.reverse(g).reverse(g), RatFun::from_poly(p));
    }

    #[test]
    fn degree_ignores_common_factors(n in small_poly(4), d in nonzero_poly(4), s in nonzero_poly(3)) {
        let plain = RatFun::new(n.clone(), d.clone()).unwrap();
        let padded = RatFun::new(n * s.clone(), d * s).unwrap();
        prop_assert_eq!(plain.degree(), padded.degree());
        prop_assert_eq!(plain, padded);
    }

    #[test]
    fn normal_rank_matches_random_evaluation(seed in any::<u64>(), size in 1usize..4, deficient in any::<bool>()) {
        let mut rng = rng(seed);
        let mut entries: Vec<Vec<RatFun>> = (0..size)
            .map(|_| (0..size).map(|_| RatFun::new(rand_poly(&mut rng, 2), poly(&[rng.gen_range(1..=3), 1])).unwrap()).collect())
            .collect();
        if deficient && size > 1 {
            let w = RatFun::new(rand_poly(&mut rng, 1), poly(&[2, 1])).unwrap();
            entries[size - 1] = entries[0].iter().map(|e| e.clone() * w.clone()).collect();
        }
        let r: RatMatrix = Mat::from_rows(entries);
        let nr = normal_rank(&r);
        let x = loop {
            let x = q(rng.gen_range(-1000..=1000), rng.gen_range(1..=97));
            if r.is_defined_at(&x) {
                break x;
            }
        };
        prop_assert_eq!(nr, rank(&r.eval(&x).unwrap()));
        if deficient && size > 1 {
            prop_assert!(nr < size);
        }
    }

    #[test]
    fn exact_and_float_evaluation_agree(n in small_poly(4), d in nonzero_poly(3), theta in 0.0f64..std::f64::consts::TAU) {
        let z = Complex64::from_polar(1.0, theta);
        let f = RatFun::new(n, d).unwrap();
        let lift = |p: &Poly<Rational>| p.map(GaussRational::embed);
        let exact = RatFun::new(lift(f.num()), lift(f.den())).unwrap();
        let zq = GaussRational::from_c64(z).unwrap();
        prop_assume!(exact.is_defined_at(&zq) && f.den().to_c64().eval(&z).norm() > 1e-6);
        let want = exact.eval(&zq).unwrap().to_c64();
        let got = f.eval_c64(z);
        prop_assert!((want - got).norm() <= 1e-10 * want.norm().max(1.0));
    }

    #[test]
    fn fraction_free_solve_matches_inverse(seed in any::<u64>(), n in 1usize..4, k in 1usize..3) {
        let mut rng = rng(seed);
        let a = rand_poly_matrix(&mut rng, n, n, 2);
        let b = rand_poly_matrix(&mut rng, n, k, 2);
        let det = poly_det(&a).unwrap();
        prop_assume!(!det.is_zero());
        let (y, d) = poly_solve(&a, &b).unwrap();
        prop_assert!(d == det || d == -det.clone());
        prop_assert_eq!(&a * &y, b.map(|p| p.clone() * d.clone()));
        let x = &inverse(&a.to_rat()).unwrap() * &b.to_rat();
        prop_assert_eq!(y.map(|p| RatFun::new(p.clone(), d.clone()).unwrap()), x);
    }
}

#[test]
fn zero_denominator_is_rejected() {
    assert!(RatFun::new(poly(&[1]), Poly::zero()).is_err());
}

#[test]
fn pole_is_not_defined() {
    let r = ratfun(&[1], &[0, 1]);
    assert!(r.eval(&q(0, 1)).is_err());
    assert_eq!(r.eval(&q(2, 1)).unwrap(), q(1, 2));
}
