//! Property tests for the algebra kernel: evaluation is a ring homomorphism,
//! exp/log1p round-trip, the vanishing-division certificate, and determinant
//! multiplicativity.

use proptest::prelude::*;

use varfun::algebra::{
    series_det, series_solve_vanishing_div, ExponentVector, MultiPoly, Rational, TruncSeries,
};

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn poly_strategy(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    let monomials = ExponentVector::up_to_degree(n, max_deg);
    let count = monomials.len();
    prop::collection::vec((0..count, rational_strategy()), 0..=max_terms).prop_map(
        move |pairs| {
            let mut p = MultiPoly::zero(n);
            for (idx, c) in pairs {
                p.add_term(monomials[idx].clone(), c);
            }
            p
        },
    )
}

fn point_strategy(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational_strategy(), n)
}

/// A series with zero constant term.
fn zero_const_series(n: usize, trunc: u32) -> impl Strategy<Value = TruncSeries> {
    poly_strategy(n, trunc, 6).prop_map(move |p| {
        let mut s = TruncSeries::from_poly(&p, trunc);
        let k0 = ExponentVector::zeros(n);
        let c0 = s.coefficient(&k0);
        s.add_term(k0, -c0);
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_is_multiplicative(
        n in 1usize..=3,
        seed_p in poly_strategy(3, 4, 5),
        seed_q in poly_strategy(3, 4, 5),
        point in point_strategy(3),
    ) {
        // restrict the 3-variable samples to the first n variables
        let restrict = |p: &MultiPoly| {
            let mut out = MultiPoly::zero(n);
            for (k, c) in p.terms() {
                if (n..3).all(|i| k.get(i) == 0) {
                    out.add_term(
                        ExponentVector::new((0..n).map(|i| k.get(i)).collect()),
                        c.clone(),
                    );
                }
            }
            out
        };
        let p = restrict(&seed_p);
        let q = restrict(&seed_q);
        let x = &point[..n];
        let lhs = (&p * &q).eval(x).unwrap();
        let rhs = p.eval(x).unwrap() * q.eval(x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_log1p_round_trip(s in zero_const_series(2, 6)) {
        // exp(log(1+s)) - (1+s) has no terms of degree <= D
        let round = s.log1p().unwrap().exp().unwrap();
        let one_plus = &TruncSeries::one(2, 6) + &s;
        prop_assert_eq!(round, one_plus);
    }

    #[test]
    fn vanishing_division_certificate(
        q in poly_strategy(2, 3, 4),
        x_true in poly_strategy(2, 3, 4),
    ) {
        prop_assume!(!q.is_zero());
        // build P = q * x_true so the quotient exists, then check the
        // certificate (q * x - P) = 0 through degree d + deg(q_low)
        let p = &q * &x_true;
        let d = 4u32;
        let x = series_solve_vanishing_div(&q, &p, d).unwrap();
        let d0 = q.lowest_degree().unwrap();
        let cap = d + d0;
        let prod = &TruncSeries::from_poly(&q, cap) * &TruncSeries::from_poly(&x.to_poly(), cap);
        let diff = &prod - &TruncSeries::from_poly(&p, cap);
        prop_assert!(diff.is_zero(), "residual through degree {} nonzero", cap);
    }

    #[test]
    fn det_is_multiplicative_2x2(
        a00 in poly_strategy(2, 2, 3),
        a01 in poly_strategy(2, 2, 3),
        a10 in poly_strategy(2, 2, 3),
        a11 in poly_strategy(2, 2, 3),
        b00 in poly_strategy(2, 2, 3),
        b01 in poly_strategy(2, 2, 3),
        b10 in poly_strategy(2, 2, 3),
        b11 in poly_strategy(2, 2, 3),
    ) {
        let d = 5u32;
        let s = |p: &MultiPoly| TruncSeries::from_poly(p, d);
        let a = vec![vec![s(&a00), s(&a01)], vec![s(&a10), s(&a11)]];
        let b = vec![vec![s(&b00), s(&b01)], vec![s(&b10), s(&b11)]];
        let prod: Vec<Vec<TruncSeries>> = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        let mut acc = TruncSeries::zero(2, d);
                        for k in 0..2 {
                            acc = &acc + &(&a[i][k] * &b[k][j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let lhs = series_det(&prod).unwrap();
        let rhs = &series_det(&a).unwrap() * &series_det(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
