mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ratlin::aaa::BarycentricApprox;
use ratlin::cork::{
    build_cork, build_cork_aaa, build_trimmed_cork, cork_as_bfr, cork_transfer, low_rank_factorize_exact,
    trimmed_transfer, BasisRelation, BfrView, CorkModel, CorkMode,
};
use ratlin::exactalg::linalg::poly_det;
use ratlin::exactalg::{Mat, Poly, PolyMatrix, Rational};
use ratlin::smithmcmillan::{smith_invariant_factors, SmithMcMillan};
use ratlin::sysmat::RegionSpec;

fn relation(chebyshev: bool, k: usize) -> BasisRelation {
    if chebyshev {
        BasisRelation::chebyshev(k)
    } else {
        BasisRelation::monomial(k)
    }
}

fn as_polymatrix(coeffs: &[Mat<Rational>]) -> PolyMatrix {
    let (r, c) = coeffs[0].shape();
    Mat::from_fn(r, c, |i, j| Poly::new(coeffs.iter().map(|m| m[(i, j)].clone()).collect()))
}

fn nontrivial(factors: Vec<Poly<Rational>>) -> Vec<Poly<Rational>> {
    factors.into_iter().map(|p| p.monic()).filter(|p| !p.is_constant()).collect()
}

/// `C = u v^T`, `D = w v^T` for rank one, otherwise random full-rank `C`.
fn random_term(rng: &mut ChaCha8Rng, n: usize, rank_one: bool) -> (Mat<Rational>, Mat<Rational>) {
    if rank_one {
        let u = rand_mat(rng, n, 1, 1, 3);
        let v = rand_mat(rng, 1, n, -2, 2);
        let w = if rng.gen_bool(0.5) { rand_mat(rng, n, 1, -2, 2) } else { Mat::zeros(n, 1) };
        let v = if v.is_zero() { Mat::from_fn(1, n, |_, j| q(j as i64 + 1, 1)) } else { v };
        (&u * &v, &w * &v)
    } else {
        (rand_nonsingular(rng, n), rand_mat(rng, n, n, -1, 1))
    }
}

fn random_approx(rng: &mut ChaCha8Rng, m: usize) -> BarycentricApprox<Rational> {
    let mut supports: Vec<Rational> = Vec::new();
    while supports.len() < m {
        let x = q(rng.gen_range(-9..=9), rng.gen_range(1..=3));
        if !supports.contains(&x) {
            supports.push(x);
        }
    }
    let weights = (0..m).map(|_| q([-2, -1, 1, 2][rng.gen_range(0..4)], rng.gen_range(1..=3))).collect();
    let values = (0..m).map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect();
    BarycentricApprox::new(supports, weights, values).unwrap()
}

struct Instance {
    model: CorkModel<Rational>,
    approx: BarycentricApprox<Rational>,
    rel: BasisRelation,
}

fn random_instance(seed: u64, k: usize, m: usize, rank_one: bool, chebyshev: bool) -> Instance {
    let mut rng = rng(seed);
    let n = 2;
    let rel = relation(chebyshev, k);
    let coeffs: Vec<Mat<Rational>> = (0..=k).map(|_| rand_mat(&mut rng, n, n, -2, 2)).collect();
    let model = CorkModel::new(rel.coefficients(&coeffs).unwrap(), vec![random_term(&mut rng, n, rank_one)]).unwrap();
    Instance { model, approx: random_approx(&mut rng, m), rel }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn polynomial_cork_keeps_the_smith_form(seed in any::<u64>(), n in 1usize..=2, d in 1usize..=3, cheb in any::<bool>()) {
        let mut rng = rng(seed);
        let coeffs: Vec<Mat<Rational>> = (0..=d).map(|_| rand_mat(&mut rng, n, n, -2, 2)).collect();
        let rel = relation(cheb, d);
        let pencil = build_cork(&rel.coefficients(&coeffs).unwrap(), &rel).unwrap();
        prop_assert_eq!(pencil.mode, CorkMode::Polynomial);
        prop_assert_eq!(pencil.dim(), d * n);
        let l = PolyMatrix::pencil(&pencil.a, &-pencil.b.clone());
        let want = nontrivial(smith_invariant_factors(&as_polymatrix(&coeffs)));
        prop_assert_eq!(nontrivial(smith_invariant_factors(&l)), want);
    }

    #[test]
    fn full_and_trimmed_recover_the_same_matrix(
        seed in any::<u64>(), k in 1usize..=2, m in 1usize..=3, rank_one in any::<bool>(), cheb in any::<bool>(),
    ) {
        let inst = random_instance(seed, k, m, rank_one, cheb);
        let rs = std::slice::from_ref(&inst.approx);
        let (c, d) = inst.model.terms()[0].clone();
        let fac = low_rank_factorize_exact(&c, &d);
        let fs = std::slice::from_ref(&fac);
        let want = cork_transfer(&inst.model, rs, &inst.rel).unwrap();
        prop_assert_eq!(&trimmed_transfer(&inst.model, rs, &inst.rel, fs).unwrap(), &want);

        let full = build_cork_aaa(&inst.model, rs, &inst.rel).unwrap();
        let trimmed = build_trimmed_cork(&inst.model, rs, &inst.rel, fs).unwrap();
        prop_assert_eq!(full.dim(), k * 2 + m * 2);
        prop_assert_eq!(trimmed.dim(), k * 2 + m * fac.rank());
        prop_assert_eq!(trimmed.state_dim(), m * fac.rank());
        if rank_one {
            prop_assert_eq!(fac.rank(), 1);
        }
        for p in [&full, &trimmed] {
            let bfr = cork_as_bfr(p, &inst.rel, BfrView::StateMatrix).unwrap();
            prop_assert_eq!(&bfr.recover_r().unwrap(), &want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn minimal_trimmed_pencil_carries_poles_and_zeros(seed in any::<u64>(), m in 1usize..=3, rank_one in any::<bool>()) {
        let inst = random_instance(seed, 2, m, rank_one, false);
        let rs = std::slice::from_ref(&inst.approx);
        let (c, d) = inst.model.terms()[0].clone();
        let fac = low_rank_factorize_exact(&c, &d);
        let pencil = build_trimmed_cork(&inst.model, rs, &inst.rel, std::slice::from_ref(&fac)).unwrap();
        let sys = cork_as_bfr(&pencil, &inst.rel, BfrView::StateMatrix).unwrap().assemble().unwrap();
        prop_assume!(sys.is_minimal_in(&RegionSpec::Cofinite(vec![])));
        let l = PolyMatrix::pencil(&pencil.a, &-pencil.b.clone());
        let det_l = poly_det(&l).unwrap();
        prop_assume!(!det_l.is_zero());

        let r = cork_transfer(&inst.model, rs, &inst.rel).unwrap();
        let sm = SmithMcMillan::new(&r);
        let det_a = poly_det(&sys.a).unwrap();
        prop_assert_eq!(det_a.monic(), sm.pole_polynomial());
        prop_assert_eq!(det_l.monic(), sm.zero_polynomial());
    }
}

#[test]
fn full_mode_is_not_minimal_with_a_rank_one_term() {
    let rel = BasisRelation::monomial(1);
    let q2 = |a: i64, b: i64, c: i64, d: i64| Mat::from_rows(vec![vec![q(a, 1), q(b, 1)], vec![q(c, 1), q(d, 1)]]);
    let model = CorkModel::new(
        vec![(q2(1, 0, 0, 1), q2(-1, 0, 0, -2))],
        vec![(q2(1, 1, 1, 1), Mat::zeros(2, 2))],
    )
    .unwrap();
    // 1/(λ - 4)
    let r = BarycentricApprox::from_quotient(vec![q(0, 1), q(1, 1)], &Poly::one(), &poly(&[-4, 1])).unwrap();
    let rs = std::slice::from_ref(&r);
    let full = cork_as_bfr(&build_cork_aaa(&model, rs, &rel).unwrap(), &rel, BfrView::StateMatrix).unwrap();
    let sys = full.assemble().unwrap();
    assert!(!sys.is_minimal_at(&q(4, 1)));
    let fac = low_rank_factorize_exact(&model.terms()[0].0, &model.terms()[0].1);
    let trimmed = build_trimmed_cork(&model, rs, &rel, std::slice::from_ref(&fac)).unwrap();
    let sys = cork_as_bfr(&trimmed, &rel, BfrView::StateMatrix).unwrap().assemble().unwrap();
    assert!(sys.is_minimal_at(&q(4, 1)));
}
