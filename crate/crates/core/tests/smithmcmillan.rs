mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ratlin::exactalg::linalg::poly_det;
use ratlin::exactalg::{Mat, Poly, PolyMatrix, RatFun, RatMatrix, Rational};
use ratlin::smithmcmillan::{local_orders, orders_at_infinity, pole_zero_in, smith_invariant_factors, SmithMcMillan};

/// Product of up to six elementary row operations with entries of degree ≤ 2.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> PolyMatrix {
    let mut u: PolyMatrix = Mat::identity(n);
    for _ in 0..rng.gen_range(0..=6) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let mut e: PolyMatrix = Mat::identity(n);
        match rng.gen_range(0..3) {
            0 if i != j => e[(i, j)] = rand_poly(rng, 2),
            1 => e.swap_rows(i, j),
            _ => e[(i, i)] = Poly::constant(q(rng.gen_range(1..=3), rng.gen_range(1..=2))),
        }
        u = &e * &u;
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn divisibility_chain(seed in any::<u64>(), r in 1usize..4, c in 1usize..4) {
        let p = rand_poly_matrix(&mut rng(seed), r, c, 2);
        let s = smith_invariant_factors(&p);
        for w in s.windows(2) {
            prop_assert!(w[1].exact_div(&w[0]).is_some(), "{} does not divide {}", w[0], w[1]);
        }
        prop_assert!(s.iter().all(|f| f.leading() == Some(&Rational::one())));
    }

    #[test]
    fn unimodular_invariance(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng(seed);
        let p = rand_poly_matrix(&mut rng, n, n, 2);
        let (u, v) = (unimodular(&mut rng, n), unimodular(&mut rng, n).transpose());
        prop_assert_eq!(smith_invariant_factors(&(&(&u * &p) * &v)), smith_invariant_factors(&p));
    }

    #[test]
    fn product_of_invariants_is_determinant(seed in any::<u64>(), n in 1usize..4) {
        let p = rand_poly_matrix(&mut rng(seed), n, n, 2);
        let s = smith_invariant_factors(&p);
        let det = poly_det(&p).unwrap();
        if det.is_zero() {
            prop_assert!(s.len() < n);
        } else {
            prop_assert_eq!(s.into_iter().fold(Poly::one(), |a, f| a * f), det.monic());
        }
    }

    #[test]
    fn scalar_orders_are_multiplicity_differences(
        num_roots in prop::collection::vec((-4i64..=4, 1usize..3), 0..3),
        den_roots in prop::collection::vec((5i64..=9, 1usize..3), 0..3),
        probe in -9i64..=9,
    ) {
        let build = |roots: &[(i64, usize)]| roots.iter().fold(Poly::one(), |acc, &(z, e)| acc * Poly::linear(q(z, 1)).pow(e as u32));
        let (num, den) = (build(&num_roots), build(&den_roots));
        let r: RatMatrix = Mat::from_rows(vec![vec![RatFun::new(num.clone(), den.clone()).unwrap()]]);
        let x = q(probe, 1);
        let want = num.multiplicity_at(&x).unwrap() as i64 - den.multiplicity_at(&x).unwrap() as i64;
        prop_assert_eq!(local_orders(&r, &x).orders, vec![want]);
    }

    #[test]
    fn reversal_moves_orders_to_reciprocal_points(seed in any::<u64>(), g in 0i64..4, point in 1i64..5) {
        let mut rng = rng(seed);
        let lam0 = q(if rng.gen_bool(0.5) { point } else { -point }, 1);
        let r: RatMatrix = Mat::from_fn(2, 2, |_, _| {
            let root = q(rng.gen_range(-4..=4), 1);
            let den = if rng.gen_bool(0.5) { Poly::linear(root) } else { Poly::one() };
            RatFun::new(rand_poly(&mut rng, 2) * Poly::linear(q(rng.gen_range(-4..=4), 1)), den).unwrap()
        });
        let recip = Rational::one() / lam0.clone();
        prop_assert_eq!(local_orders(&r, &lam0).orders, local_orders(&r.reverse(g), &recip).orders);
    }
}

#[test]
fn diagonal_report() {
    let r: RatMatrix = Mat::from_diag(vec![ratfun(&[-1, 1], &[1, 1]), ratfun(&[-1, 1], &[1])]);
    let rep = pole_zero_in(&r, &[q(1, 1), q(-1, 1)]);
    assert_eq!(rep.zeros(), vec![(q(1, 1), vec![1, 1])]);
    assert_eq!(rep.poles(), vec![(q(-1, 1), vec![1])]);
}

#[test]
fn identity_has_no_structure() {
    let r: RatMatrix = Mat::identity(2);
    assert_eq!(local_orders(&r, &q(3, 1)).orders, vec![0, 0]);
    assert!(SmithMcMillan::new(&r).candidate_points().points.is_empty());
}

#[test]
fn polynomial_has_pole_at_infinity() {
    // λ² at infinity with grade 0: order -2
    let r: RatMatrix = Mat::from_rows(vec![vec![ratfun(&[0, 0, 1], &[1])]]);
    assert_eq!(orders_at_infinity(&r, 0).orders, vec![-2]);
    assert_eq!(orders_at_infinity(&r, 2).orders, vec![0]);
}
