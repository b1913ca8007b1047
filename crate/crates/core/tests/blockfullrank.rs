mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ratlin::blockfullrank::{
    build_sbmb_linearization, dual_basis_for, frobenius_pencil, is_minimal_realization, realization_transfer, BfrParts,
    Layout, SbmbPencil,
};
use ratlin::exactalg::linalg::{inverse, normal_rank, nullspace};
use ratlin::exactalg::{Mat, PolyMatrix, RatMatrix, Rational};
use ratlin::sysmat::{check_linearization_at_infinity, check_linearization_in, RegionSpec, Witness};

struct Instance {
    sb: SbmbPencil,
    a: Mat<Rational>,
    b: Mat<Rational>,
    c: Mat<Rational>,
    t: Mat<Rational>,
    degree: i64,
}

fn instance(rng: &mut ChaCha8Rng) -> Instance {
    loop {
        let m = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=2);
        let degree = rng.gen_range(2..=3usize);
        let mut coeffs: Vec<Mat<Rational>> = (0..=degree).map(|_| rand_mat(rng, m, m, -3, 3)).collect();
        if coeffs[degree].is_zero() {
            coeffs[degree] = Mat::identity(m);
        }
        let (a, _, t) = rand_rational_spectrum(rng, n);
        let b = rand_mat(rng, n, m, -2, 2);
        let c = rand_mat(rng, m, n, -2, 2);
        if is_minimal_realization(&a, &b, &c) {
            let sb = frobenius_pencil(&coeffs).unwrap();
            return Instance { sb, a, b, c, t, degree: degree as i64 };
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn finite_and_infinite_conditions_imply_linearization(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = instance(&mut rng);
        let n = inst.a.rows();
        let (x, y) = (rand_nonsingular(&mut rng, n), rand_nonsingular(&mut rng, n));
        let parts = build_sbmb_linearization(&inst.sb, (&inst.a, &inst.b, &inst.c), &x, &y).unwrap();
        let r = parts.recover_r().unwrap();
        prop_assert_eq!(&r, &realization_transfer(&inst.sb.polynomial(), &inst.a, &inst.b, &inst.c).unwrap());
        let sys = parts.assemble().unwrap();
        let everywhere = RegionSpec::Cofinite(vec![]);
        prop_assert!(parts.check_finite_condition(&everywhere).unwrap().passed);
        prop_assert!(check_linearization_in(&sys, &r, &everywhere).unwrap().is_linearization);
        let inf = parts.check_infinity_condition().unwrap();
        prop_assert!(inf.passed);
        prop_assert_eq!(inf.grade, inst.degree);
        prop_assert!(check_linearization_at_infinity(&sys, &r, inf.grade).unwrap().is_linearization);
    }

    #[test]
    fn state_coordinates_do_not_change_r(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = instance(&mut rng);
        let n = inst.a.rows();
        let id: Mat<Rational> = Mat::identity(n);
        let plain = build_sbmb_linearization(&inst.sb, (&inst.a, &inst.b, &inst.c), &id, &id).unwrap();
        let (x, y) = (rand_nonsingular(&mut rng, n), rand_nonsingular(&mut rng, n));
        let moved = build_sbmb_linearization(&inst.sb, (&inst.a, &inst.b, &inst.c), &x, &y).unwrap();
        prop_assert_eq!(plain.recover_r().unwrap(), moved.recover_r().unwrap());
    }

    #[test]
    fn dual_bases_annihilate(seed in any::<u64>(), rows in 1usize..3) {
        let mut rng = rng(seed);
        let k: PolyMatrix = PolyMatrix::pencil(&rand_mat(&mut rng, rows, 3, -2, 2), &rand_mat(&mut rng, rows, 3, -2, 2));
        prop_assume!(normal_rank(&k.to_rat()) == rows);
        let n = dual_basis_for(&k);
        prop_assert_eq!(n.rows(), 3 - rows);
        prop_assert!((&k.to_rat() * &n.transpose()).is_zero());
        prop_assert_eq!(normal_rank(&Mat::vstack(&[&k.to_rat(), &n]).unwrap()), 3);
    }

    #[test]
    fn uncontrollable_mode_fails_the_rank_condition(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = instance(&mut rng);
        let n = inst.a.rows();
        let (x, y) = (rand_nonsingular(&mut rng, n), rand_nonsingular(&mut rng, n));
        let mut parts = build_sbmb_linearization(&inst.sb, (&inst.a, &inst.b, &inst.c), &x, &y).unwrap();
        // left eigenvector w of A for T_00, moved to the coordinates of X(λI - A)Y
        let lambda0 = inst.t[(0, 0)].clone();
        let shifted = &inst.a - &Mat::identity(n).scale(&lambda0);
        let w = nullspace(&shifted.transpose());
        let yv = &inverse(&x.transpose()).unwrap() * &w.submatrix(0..1, 0..n).transpose();
        let norm = (&yv.transpose() * &yv)[(0, 0)].clone();
        let proj = &Mat::identity(n) - &(&yv * &yv.transpose()).scale(&(Rational::from_integer(1.into()) / norm));
        parts.b = &proj.to_poly() * &parts.b;
        let check = parts.check_finite_condition(&RegionSpec::Cofinite(vec![])).unwrap();
        prop_assert!(!check.passed);
        prop_assert_eq!(check.witness, Some(Witness::Point(lambda0)));
        prop_assert!(!parts.assemble().unwrap().is_minimal_at(&inst.t[(0, 0)]));
    }
}

#[test]
fn canonical_layout_roundtrip() {
    let inst = instance(&mut rng(11));
    let id: Mat<Rational> = Mat::identity(inst.a.rows());
    let parts = build_sbmb_linearization(&inst.sb, (&inst.a, &inst.b, &inst.c), &id, &id).unwrap();
    let l = parts.pencil(Layout::Canonical).unwrap();
    let back = BfrParts::from_pencil(&l, Layout::Canonical, parts.n(), parts.m.shape(), parts.n1.clone(), parts.n2.clone()).unwrap();
    assert_eq!(back, parts);
}

#[test]
fn empty_dual_side_uses_identity() {
    let k: PolyMatrix = Mat::zeros(0, 2);
    let n: RatMatrix = dual_basis_for(&k);
    assert_eq!(n, Mat::identity(2));
}
