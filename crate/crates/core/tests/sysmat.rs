mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ratlin::blockfullrank::is_minimal_realization;
use ratlin::exactalg::linalg::{det, poly_det};
use ratlin::exactalg::{Mat, PolyMatrix, RatFun, Rational};
use ratlin::smithmcmillan::{local_orders, SmithMcMillan};
use ratlin::sysmat::{check_linearization_in, RegionSpec, SystemMatrix, Witness};

fn state(a: &Mat<Rational>) -> PolyMatrix {
    PolyMatrix::pencil(&-a.clone(), &Mat::identity(a.rows()))
}

/// A minimal `(A, B, C)` with rational spectrum and a pencil `D`.
fn minimal_system(rng: &mut ChaCha8Rng) -> SystemMatrix {
    loop {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=2);
        let (a, _, _) = rand_rational_spectrum(rng, n);
        let b = rand_mat(rng, n, m, -2, 2);
        let c = rand_mat(rng, m, n, -2, 2);
        if !is_minimal_realization(&a, &b, &c) {
            continue;
        }
        let d = PolyMatrix::pencil(&rand_mat(rng, m, m, -2, 2), &rand_mat(rng, m, m, -1, 1));
        return SystemMatrix::new(state(&a), b.to_poly(), c.to_poly(), d).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transfer_function_invariant_under_state_equivalence(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sys = minimal_system(&mut rng);
        let n = sys.n();
        let (x, y) = (rand_nonsingular(&mut rng, n).to_poly(), rand_nonsingular(&mut rng, n).to_poly());
        let moved = SystemMatrix::new(&(&x * &sys.a) * &y, &x * &sys.b, &sys.c * &y, sys.d.clone()).unwrap();
        prop_assert_eq!(moved.transfer_function().unwrap(), sys.transfer_function().unwrap());
    }

    #[test]
    fn determinant_factors_through_schur_complement(seed in any::<u64>()) {
        let sys = minimal_system(&mut rng(seed));
        let whole = RatFun::from_poly(poly_det(&sys.pencil()).unwrap());
        let schur = det(&sys.transfer_function().unwrap()).unwrap();
        prop_assert_eq!(whole, RatFun::from_poly(poly_det(&sys.a).unwrap()) * schur);
    }

    #[test]
    fn passing_check_matches_orders_pointwise(seed in any::<u64>()) {
        let sys = minimal_system(&mut rng(seed));
        let g = sys.transfer_function().unwrap();
        let rep = check_linearization_in(&sys, &g, &RegionSpec::Cofinite(vec![])).unwrap();
        prop_assert!(rep.is_linearization, "{:?}", rep);
        let pencil = sys.pencil().to_rat();
        let state = sys.a.to_rat();
        for x in SmithMcMillan::new(&g).candidate_points().points {
            let at_g = local_orders(&g, &x);
            prop_assert_eq!(at_g.poles(), local_orders(&state, &x).zeros());
            prop_assert_eq!(at_g.zeros(), local_orders(&pencil, &x).zeros());
        }
    }
}

#[test]
fn hidden_mode_breaks_minimality_at_its_eigenvalue() {
    // A = diag(1, 2) with the mode at 2 unobservable
    let a = Mat::from_diag(vec![q(1, 1), q(2, 1)]);
    let b = Mat::from_rows(vec![vec![q(1, 1)], vec![q(1, 1)]]);
    let c = Mat::from_rows(vec![vec![q(1, 1), q(0, 1)]]);
    let sys = SystemMatrix::new(state(&a), b.to_poly(), c.to_poly(), Mat::identity(1)).unwrap();
    assert!(sys.is_minimal_at(&q(1, 1)));
    assert!(!sys.is_minimal_at(&q(2, 1)));
    assert_eq!(sys.minimality_in(&RegionSpec::Cofinite(vec![])), Err(Witness::Point(q(2, 1))));
    assert!(sys.is_minimal_in(&RegionSpec::Cofinite(vec![q(2, 1)])));
}

#[test]
fn stateless_transfer_is_d() {
    let d: PolyMatrix = Mat::from_rows(vec![vec![poly(&[1, 1]), poly(&[2])]]);
    assert_eq!(SystemMatrix::stateless(d.clone()).transfer_function().unwrap(), d.to_rat());
}
