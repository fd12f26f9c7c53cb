use num_traits::Zero;
use proptest::prelude::*;
use zhukit::formal::{binom_expand, iota_expand, recompose, residue, Binomial, LaurentPoly, RationalForm, Region};
use zhukit::rat::{binom, rat, Rat};

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn arb_nonzero() -> impl Strategy<Value = Rat> {
    arb_rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec(arb_rat(), 1..5)
        .prop_map(|cs| LaurentPoly::from_terms(cs.into_iter().enumerate().map(|(i, c)| (i as i64, c))))
        .prop_filter("nonzero", |p| !p.0.is_empty())
}

proptest! {
    #[test]
    fn recompose_inverts_expansion_at_infinity(g in arb_poly(), l in 0i64..3, k in 0i64..4, z in arb_nonzero()) {
        let rf = RationalForm::scalar(g.clone(), l, k, z.clone());
        let top = g.max_exp().unwrap() - l - k;
        let s = iota_expand(&rf, Region::AtInfinity, -20, top).unwrap();
        prop_assert_eq!(recompose(&s, l, k, &z).unwrap().numerator(), g);
    }

    #[test]
    fn expansions_agree_on_polynomials(g in arb_poly(), z in arb_nonzero()) {
        let rf = RationalForm::scalar(g.clone(), 0, 0, z);
        let a = iota_expand(&rf, Region::AtZero, 0, 6).unwrap();
        let b = iota_expand(&rf, Region::AtInfinity, 0, 6).unwrap();
        for e in 0..=6 {
            prop_assert_eq!(a.coeff(e).unwrap(), g.coeff(e));
            prop_assert_eq!(b.coeff(e).unwrap(), g.coeff(e));
        }
    }

    #[test]
    fn binomial_coefficients_match_pascal(n in -6i64..=6, z in arb_nonzero()) {
        let s = binom_expand(Binomial::XMinusZ, n, &z, -12, n.max(0)).unwrap();
        for i in 0..6 {
            let e = n - i;
            let want = binom(n, i) * zhukit::rat::pow(&-z.clone(), i);
            prop_assert_eq!(s.coeff(e).unwrap(), want);
        }
    }

    #[test]
    fn simple_pole_residue_is_one(z in arb_nonzero()) {
        let rf = RationalForm::scalar(LaurentPoly::monomial(0, rat(1, 1)), 0, 1, z);
        let s = iota_expand(&rf, Region::AtInfinity, -8, -1).unwrap();
        prop_assert_eq!(residue(&s).unwrap(), rat(1, 1));
    }
}
