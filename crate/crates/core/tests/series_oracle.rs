//! Series arithmetic against a brute-force polynomial model.
//!
//! Exact series with finitely many terms are ordinary group-ring elements,
//! so a `BTreeMap` convolution is a complete oracle for `add` and `mul`.
//! Inversion is checked through the defining identity `a * a^{-1} = 1`
//! modulo the reported floor, plus a frozen geometric expansion.

use std::collections::BTreeMap;

use hahnlog_core::{
    rat, rat_i, ExtValue, GroupElement, IndexPoint, OrderTypeSpec, Rational, Series, Universe,
};
use proptest::prelude::*;

type Poly = BTreeMap<GroupElement, Rational>;

fn poly_from(s: &Series<GroupElement>) -> Poly {
    assert!(s.is_exact());
    s.terms().iter().cloned().collect()
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (e, q) in b {
        let entry = out.entry(e.clone()).or_insert_with(|| rat_i(0));
        *entry += q;
    }
    out.retain(|_, q| *q != rat_i(0));
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, qa) in a {
        for (eb, qb) in b {
            let e = ea.checked_add(eb).unwrap();
            let entry = out.entry(e).or_insert_with(|| rat_i(0));
            *entry += qa * qb;
        }
    }
    out.retain(|_, q| *q != rat_i(0));
    out
}

fn universe2() -> Universe {
    OrderTypeSpec::standard(2).unwrap().into_universe()
}

fn exp(u: &Universe, terms: &[((usize, i64), i64)]) -> GroupElement {
    GroupElement::from_terms(
        u,
        terms
            .iter()
            .map(|((l, n), c)| (IndexPoint::new(u, *l, *n).unwrap(), rat_i(*c))),
    )
    .unwrap()
}

fn coeff() -> impl Strategy<Value = Rational> {
    prop_oneof![
        (-3i64..=3).prop_map(|n| rat(n, 1)),
        ((-5i64..=5), (1i64..=3)).prop_map(|(n, d)| rat(n, d)),
    ]
}

fn exact_series(u: Universe) -> impl Strategy<Value = Series<GroupElement>> {
    prop::collection::vec(((0usize..2, -3i64..=3, -2i64..=2), coeff()), 0..5).prop_map(
        move |raw| {
            let terms = raw.into_iter().map(|((l, n, c), q)| {
                let e = GroupElement::from_terms(
                    &u,
                    [(IndexPoint::new(&u, l, n).unwrap(), rat_i(c))],
                )
                .unwrap();
                (e, q)
            });
            Series::from_terms(terms, ExtValue::Infinity).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_addition_matches_the_convolution_model(
        a in exact_series(universe2()),
        b in exact_series(universe2()),
    ) {
        let expect = poly_add(&poly_from(&a), &poly_from(&b));
        let got = poly_from(&a.checked_add(&b).unwrap());
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn exact_multiplication_matches_the_convolution_model(
        a in exact_series(universe2()),
        b in exact_series(universe2()),
    ) {
        let expect = poly_mul(&poly_from(&a), &poly_from(&b));
        let got = poly_from(&a.mul(&b).unwrap());
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn multiplication_distributes_over_addition(
        a in exact_series(universe2()),
        b in exact_series(universe2()),
        c in exact_series(universe2()),
    ) {
        let lhs = a.mul(&b.checked_add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().checked_add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inversion_satisfies_the_defining_identity(
        a in exact_series(universe2()),
        order in 1u32..4,
    ) {
        // Restrict to provably nonzero inputs; inversion rejects the rest.
        prop_assume!(!a.terms().is_empty());
        let inv = a.invert(order).unwrap();
        let product = a.mul(&inv).unwrap();
        let one = Series::one_from(&a.terms()[0].0);
        prop_assert!(product.indistinguishable(&one).unwrap());
    }
}

#[test]
fn geometric_inverse_is_frozen() {
    let u = universe2();
    let e0 = exp(&u, &[((0, 0), 1)]);
    let one_plus = Series::from_terms(
        [(e0.scale(&rat_i(0)), rat_i(1)), (e0.clone(), rat_i(1))],
        ExtValue::Infinity,
    )
    .unwrap();
    let inv = one_plus.invert(2).unwrap();
    assert_eq!(
        inv.to_string(),
        "1 - t^{e(t0,0)} + t^{2*e(t0,0)} (mod t^{3*e(t0,0)})"
    );
}

#[test]
fn truncated_factors_cap_the_product_floor() {
    let u = universe2();
    let e0 = exp(&u, &[((0, 0), 1)]);
    let e1 = exp(&u, &[((0, 1), 1)]);
    // (1 + t^{e1} mod t^{2 e1}) * t^{e0}: the unknown tail shifts by e0.
    let unit = Series::from_terms(
        [(e0.scale(&rat_i(0)), rat_i(1)), (e1.clone(), rat_i(1))],
        ExtValue::Finite(e1.scale(&rat_i(2))),
    )
    .unwrap();
    let shifted = unit.mul(&Series::monomial(e0.clone(), rat_i(1))).unwrap();
    let expect_floor = e1.scale(&rat_i(2)).checked_add(&e0).unwrap();
    assert_eq!(shifted.floor(), &ExtValue::Finite(expect_floor));
    assert_eq!(shifted.terms().len(), 2);
}

#[test]
fn powers_agree_with_repeated_multiplication() {
    let u = universe2();
    let e0 = exp(&u, &[((0, 0), 1)]);
    let a = Series::from_terms(
        [(e0.scale(&rat_i(0)), rat_i(2)), (e0.clone(), rat(1, 2))],
        ExtValue::Infinity,
    )
    .unwrap();
    let cubed = a.pow(3, 3).unwrap();
    let manual = a.mul(&a).unwrap().mul(&a).unwrap();
    assert_eq!(cubed, manual);

    let inv_sq = a.pow(-2, 3).unwrap();
    let product = inv_sq.mul(&manual).unwrap();
    assert!(product.indistinguishable(&a).unwrap());
}

#[test]
fn valuation_and_sign_track_the_leading_term() {
    let u = universe2();
    let neg = exp(&u, &[((0, 0), -1)]);
    let e1 = exp(&u, &[((1, 0), 1)]);
    let a = Series::from_terms(
        [(neg.clone(), rat_i(-3)), (e1.clone(), rat_i(5))],
        ExtValue::Infinity,
    )
    .unwrap();
    assert_eq!(a.valuation().unwrap(), ExtValue::Finite(neg.clone()));
    assert_eq!(a.try_sign().unwrap(), std::cmp::Ordering::Less);

    // An empty truncated series has no usable valuation.
    let unknown: Series<GroupElement> = Series::unknown_below(e1);
    assert!(unknown.valuation().is_err());
    assert_eq!(
        Series::<GroupElement>::exact_zero().valuation().unwrap(),
        ExtValue::Infinity
    );
}
