//! Seeded property checks for the group module: the homography composition
//! law, the chain rule, exact nonsingularity of the differential, and the
//! region classifier definition.

use varfun::algebra::linalg;
use varfun::group::{
    classify_region, decompose_affine_jorgensen, decompose_rank_one, homography_eval,
    homography_jacobian, GroupRegion,
};
use varfun::sampling;

#[test]
fn homography_respects_composition() {
    let mut rng = sampling::seeded_rng(42);
    let mut checked = 0;
    while checked < 200 {
        let n = 1 + (checked % 3);
        let g = sampling::random_group_element(&mut rng, n, 3);
        let g1 = sampling::random_group_element(&mut rng, n, 3);
        let m = sampling::random_point(&mut rng, n);
        // all denominators along the way must be nonzero
        let Ok(mid) = homography_eval(&g, &m) else { continue };
        let Ok(lhs) = homography_eval(&g1, &mid) else { continue };
        let Ok(rhs) = homography_eval(&g1.mul(&g), &m) else { continue };
        assert_eq!(lhs, rhs, "composition failed at n={n}");
        checked += 1;
    }
}

#[test]
fn jacobian_chain_rule_and_nonsingularity() {
    use num_traits::Zero;
    let mut rng = sampling::seeded_rng(43);
    let mut checked = 0;
    while checked < 100 {
        let n = 1 + (checked % 3);
        let g = sampling::random_group_element(&mut rng, n, 3);
        let g1 = sampling::random_group_element(&mut rng, n, 3);
        let m = sampling::random_point(&mut rng, n);
        let Ok(mid) = homography_eval(&g, &m) else { continue };
        let Ok(jg) = homography_jacobian(&g, &m) else { continue };
        let Ok(jg1) = homography_jacobian(&g1, &mid) else { continue };
        let Ok(jchain) = homography_jacobian(&g1.mul(&g), &m) else { continue };
        assert_eq!(jchain, linalg::mat_mul(&jg1, &jg), "chain rule at n={n}");
        // exactly nonsingular off the hyperplane
        assert!(!linalg::mat_det(&jg).is_zero());
        checked += 1;
    }
}

#[test]
fn classifier_matches_g0_definition() {
    use num_traits::{Signed, Zero};
    let mut rng = sampling::seeded_rng(44);
    for case in 0..200 {
        let n = 1 + (case % 3);
        let g = sampling::random_group_element(&mut rng, n, 2);
        let in_g0 = g.c_vec().iter().all(|x| x.is_zero()) && g.d_scalar().is_positive();
        assert_eq!(classify_region(&g) == GroupRegion::G0, in_g0);
    }
}

#[test]
fn affine_jorgensen_reconstruction_on_random_g0() {
    use num_traits::Zero;
    let mut rng = sampling::seeded_rng(45);
    let mut checked = 0;
    while checked < 100 {
        let n = 1 + (checked % 3);
        let g = sampling::random_group_element(&mut rng, n, 3);
        // force the G_0 shape: zero out c, make d positive
        let mut rows = g.rows().clone();
        for j in 0..n {
            rows[n][j] = varfun::algebra::rat(0);
        }
        if rows[n][n].is_zero() {
            rows[n][n] = varfun::algebra::rat(2);
        } else if rows[n][n] < varfun::algebra::rat(0) {
            rows[n][n] = -rows[n][n].clone();
        }
        let Ok(g0) = varfun::group::GroupElement::new(rows) else { continue };
        let (aff, jor) = decompose_affine_jorgensen(&g0).unwrap();
        assert_eq!(aff.mul(&jor), g0);
        assert!(aff.in_g0() && jor.in_g0());
        checked += 1;
    }
}

#[test]
fn rank_one_round_trip_random() {
    use num_traits::Zero;
    let mut rng = sampling::seeded_rng(46);
    let mut checked = 0;
    while checked < 150 {
        let n = 1 + (checked % 3);
        let g = sampling::random_group_element_rational(&mut rng, n, 3, 2);
        if g.c_vec().iter().all(|x| x.is_zero()) {
            continue;
        }
        match decompose_rank_one(&g) {
            Ok(f) => {
                assert_eq!(f.reconstruct(), g);
                assert!(f.g0.in_g0());
                checked += 1;
            }
            Err(varfun::group::GroupError::RequiresFloat) => continue,
            Err(e) => panic!("unexpected decomposition error: {e}"),
        }
    }
}
