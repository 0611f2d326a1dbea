//! Logarithm and exponential: frozen channel values, the defining laws on
//! deterministic samples, and decomposition round trips.
//!
//! Expected strings were computed by hand from the Taylor expansions and
//! the index-shift action of the contraction, then frozen here.

use std::cmp::Ordering;

use hahnlog_core::{
    assemble_log, check_growth, check_strong, check_unit_law, chi_from_log, decompose_log,
    exp_interval, iterate_log_value, log_equiv_class, log_equiv_witness, log_interval, rat, rat_i,
    rexp, rlog, zeta_from_chi, Error, FactorTerm, GroupElement, IndexPoint,
    OrderTypeSpec, PrecisionPolicy, ResidueLogMode, ResidueTerm, Series, Universe,
    ZetaMap,
};

fn universe2() -> Universe {
    OrderTypeSpec::standard(2).unwrap().into_universe()
}

fn basis(u: &Universe, label: usize, offset: i64) -> GroupElement {
    GroupElement::basis(u, IndexPoint::new(u, label, offset).unwrap()).unwrap()
}

fn monomial(u: &Universe, label: usize, offset: i64, sign: i64) -> Series<GroupElement> {
    Series::monomial(basis(u, label, offset).scale(&rat_i(sign)), rat_i(1))
}

fn policy(order: u32) -> PrecisionPolicy {
    PrecisionPolicy::new(order).unwrap()
}

#[test]
fn taylor_channels_are_frozen() {
    let u = universe2();
    let e0 = basis(&u, 0, 0);
    let p = policy(2);

    let eps = Series::monomial(e0.clone(), rat_i(1));
    let exp = rexp(&eps, &GroupElement::zero(&u), &p).unwrap();
    assert_eq!(
        exp.to_string(),
        "1 + t^{e(t0,0)} + 1/2*t^{2*e(t0,0)} (mod t^{3*e(t0,0)})"
    );

    let one_unit = Series::one_from(&e0).checked_add(&eps).unwrap();
    let log = rlog(&one_unit, &p).unwrap();
    assert_eq!(
        log.to_string(),
        "t^{e(t0,0)} - 1/2*t^{2*e(t0,0)} (mod t^{3*e(t0,0)})"
    );

    // The two truncations invert each other within the shared floor.
    let back = rlog(&exp, &p).unwrap();
    assert!(back.indistinguishable(&eps).unwrap());
    let forth = rexp(&log, &GroupElement::zero(&u), &p).unwrap();
    assert!(forth.indistinguishable(&one_unit).unwrap());
}

#[test]
fn monomial_logs_shift_the_index() {
    let u = universe2();
    let l = assemble_log(&u, ResidueLogMode::Monic, policy(2));

    let a = monomial(&u, 0, 0, -1);
    let out = l.full_log(&a).unwrap();
    assert_eq!(out.infinite.to_string(), "t^{-e(t0,1)} (exact)");
    assert_eq!(out.residue, ResidueTerm::Zero);
    assert!(out.small.is_known_zero());
    assert_eq!(out.exact_total().unwrap().to_string(), "t^{-e(t0,1)} (exact)");

    // log 1 = 0, exactly.
    let one = Series::one_from(&basis(&u, 0, 0));
    assert_eq!(l.full_log(&one).unwrap().exact_total().unwrap().to_string(), "0 (exact)");

    // Iterated logs walk the offset chain.
    let thrice = iterate_log_value(&l, &a, 3).unwrap();
    assert_eq!(thrice.to_string(), "t^{-e(t0,3)} (exact)");
}

#[test]
fn monic_mode_rejects_other_residues() {
    let u = universe2();
    let l = assemble_log(&u, ResidueLogMode::Monic, policy(2));
    let a = monomial(&u, 0, 0, -1).scale(&rat_i(2));
    match l.full_log(&a) {
        Err(Error::NonMonicResidue(q)) => assert_eq!(q, rat_i(2)),
        other => panic!("expected a residue rejection, got {other:?}"),
    }
    // Negative and zero arguments have no logarithm at all.
    assert!(l.full_log(&a.negated()).is_err());
    assert!(l.full_log(&Series::exact_zero()).is_err());
}

#[test]
fn interval_mode_carries_the_residue_out_of_band() {
    let u = universe2();
    let width = rat(1, 1000);
    let l = assemble_log(&u, ResidueLogMode::Interval { width: width.clone() }, policy(2));
    let a = monomial(&u, 0, 0, -1).scale(&rat_i(2));
    let out = l.full_log(&a).unwrap();
    match &out.residue {
        ResidueTerm::LogInterval { lo, hi } => {
            assert_eq!(&(hi - lo), &width);
            // ln 2 = 0.6931471..., safely inside a width-1/1000 enclosure.
            assert!(lo < &rat(693147, 1000000));
            assert!(hi > &rat(693148, 1000000));
        }
        other => panic!("expected an interval residue, got {other:?}"),
    }
    assert!(out.exact_total().is_err());
    assert_eq!(out.in_band().unwrap().to_string(), "t^{-e(t0,1)} (exact)");
}

#[test]
fn exponentials_invert_the_shift_and_police_their_domain() {
    let u = universe2();
    let l = assemble_log(&u, ResidueLogMode::Monic, policy(2));

    let b = monomial(&u, 0, 1, -1);
    let out = l.full_exp(&b).unwrap();
    assert_eq!(out.monomial.to_string(), "t^{-e(t0,0)} (exact)");
    assert_eq!(out.factor, FactorTerm::One);
    assert_eq!(out.unit.to_string(), "1 (exact)");

    // The shift inverts in both directions through the offset chain.
    let back = l.exp_value(&l.log_value(&monomial(&u, 0, 0, -1)).unwrap()).unwrap();
    assert_eq!(back.to_string(), "t^{-e(t0,0)} (exact)");
    let fore = l.log_value(&l.exp_value(&b).unwrap()).unwrap();
    assert_eq!(fore.to_string(), "t^{-e(t0,1)} (exact)");

    // A two-term exponent is not a lifted basis direction: outside the
    // partial exponential's domain.
    let g = basis(&u, 0, 0)
        .scale(&rat(-1, 2))
        .checked_add(&basis(&u, 1, 0).scale(&rat(-1, 2)))
        .unwrap();
    let bad = Series::monomial(g, rat_i(1));
    assert!(matches!(l.full_exp(&bad), Err(Error::NotInImage(_))));
}

#[test]
fn logs_are_multiplicative_on_decomposable_inputs() {
    let u = universe2();
    let l = assemble_log(&u, ResidueLogMode::Monic, policy(3));
    let e0 = basis(&u, 0, 0);

    let a = monomial(&u, 0, 0, -1);
    let b = monomial(&u, 1, 2, -1);
    let ab = a.mul(&b).unwrap();
    let sum = l
        .log_value(&a)
        .unwrap()
        .checked_add(&l.log_value(&b).unwrap())
        .unwrap();
    assert_eq!(l.log_value(&ab).unwrap(), sum);

    // With 1-unit factors the identity holds modulo the Taylor floor.
    let unit = Series::one_from(&e0)
        .checked_add(&Series::monomial(e0.clone(), rat(1, 2)))
        .unwrap();
    let au = a.mul(&unit).unwrap();
    let lhs = l.log_value(&au).unwrap();
    let rhs = l
        .log_value(&a)
        .unwrap()
        .checked_add(&l.log_value(&unit).unwrap())
        .unwrap();
    assert!(lhs.indistinguishable(&rhs).unwrap());
}

#[test]
fn defining_laws_hold_on_a_deterministic_sweep() {
    let u = universe2();
    let l = assemble_log(&u, ResidueLogMode::Monic, policy(2));
    let e0 = basis(&u, 0, 0);

    let infinite_samples = [
        monomial(&u, 0, 0, -1),
        monomial(&u, 0, -2, -1),
        monomial(&u, 1, 1, -1),
        monomial(&u, 0, 0, -1)
            .checked_add(&monomial(&u, 1, 0, -1).scale(&rat(1, 3)))
            .unwrap(),
        monomial(&u, 0, 3, -1)
            .checked_add(&Series::one_from(&e0).scale(&rat_i(7)))
            .unwrap(),
    ];
    for a in &infinite_samples {
        assert!(check_strong(&l, a).unwrap(), "strong law failed for {a}");
        for n in 1..=4 {
            assert!(check_growth(&l, a, n).unwrap(), "growth failed for {a} at {n}");
        }
    }

    // Order preservation across the sweep.
    for a in &infinite_samples {
        for b in &infinite_samples {
            let cmp = a.try_cmp(b).unwrap();
            if cmp == Ordering::Equal {
                continue;
            }
            let la = l.log_value(a).unwrap();
            let lb = l.log_value(b).unwrap();
            assert_eq!(la.try_cmp(&lb).unwrap(), cmp, "order flipped for {a}, {b}");
        }
    }

    let small_samples = [
        Series::monomial(e0.clone(), rat_i(1)),
        Series::monomial(e0.clone(), rat(-1, 2)),
        Series::monomial(basis(&u, 1, -1), rat(2, 3)),
    ];
    for b in &small_samples {
        let report = check_unit_law(&l, b).unwrap();
        assert!(report.strict, "unit law failed for {b}");
        assert_eq!(report.doubled, Some(true), "gap valuation drifted for {b}");
    }
}

#[test]
fn contraction_is_recoverable_from_the_log() {
    let u = universe2();
    let zeta = ZetaMap::new(&u);
    let l = assemble_log(&u, ResidueLogMode::Monic, policy(2));

    for label in 0..2 {
        for offset in -3..=3 {
            let p = IndexPoint::new(&u, label, offset).unwrap();
            let g = GroupElement::basis(&u, p).unwrap().negated();
            assert_eq!(chi_from_log(&l, &g).unwrap(), zeta.chi(&g).unwrap());
            let via_chi = zeta_from_chi(&u, |x| zeta.chi(x), p).unwrap();
            assert_eq!(via_chi, zeta.apply(p).unwrap());
        }
    }
}

#[test]
fn decomposition_round_trips_through_assembly() {
    let u = universe2();
    let p = policy(2);

    for mode in [
        ResidueLogMode::Monic,
        ResidueLogMode::Interval { width: rat(1, 64) },
    ] {
        let l = assemble_log(&u, mode.clone(), p.clone());
        let d = decompose_log(&l, -3..=3, &p).unwrap();
        assert_eq!(d.mode, mode);

        let zeta = ZetaMap::new(&u);
        assert!(!d.zeta_action.is_empty());
        for (from, to) in &d.zeta_action {
            assert_eq!(zeta.apply(*from).unwrap(), *to);
        }

        let rebuilt = d.assemble(&u, p.clone()).unwrap();
        let probes = [
            monomial(&u, 0, 0, -1),
            monomial(&u, 1, -2, -1),
            monomial(&u, 0, 2, -1)
                .checked_add(&monomial(&u, 1, 3, -1))
                .unwrap(),
        ];
        for a in &probes {
            let x = l.full_log(a).unwrap();
            let y = rebuilt.full_log(a).unwrap();
            assert_eq!(x.infinite, y.infinite);
            assert_eq!(x.small, y.small);
        }
    }
}

#[test]
fn log_equivalence_has_classes_and_witnesses() {
    let u = universe2();
    let l = assemble_log(&u, ResidueLogMode::Monic, policy(2));

    let a = monomial(&u, 0, 0, -1);
    let b = monomial(&u, 0, 2, -1);
    let c = monomial(&u, 1, 0, -1);

    assert!(log_equiv_class(&a, &b).unwrap());
    assert!(!log_equiv_class(&a, &c).unwrap());

    assert_eq!(log_equiv_witness(&l, &a, &b, 8).unwrap(), Some(2));
    assert_eq!(log_equiv_witness(&l, &a, &a, 8).unwrap(), Some(0));
    assert_eq!(log_equiv_witness(&l, &a, &c, 8).unwrap(), None);

    // Finite elements are outside the relation's domain.
    let one = Series::one_from(&basis(&u, 0, 0));
    assert!(log_equiv_class(&a, &one).is_err());
}

#[test]
fn interval_endpoints_are_exact_widths() {
    let width = rat(1, 500);

    let (lo, hi) = log_interval(&rat_i(3), &width).unwrap();
    assert_eq!(hi.clone() - lo.clone(), width);
    // ln 3 = 1.0986...
    assert!(lo < rat(10986, 10000));
    assert!(hi > rat(10987, 10000));

    let (lo, hi) = exp_interval(&rat_i(1), &width).unwrap();
    assert_eq!(hi.clone() - lo.clone(), width);
    // e = 2.71828...
    assert!(lo < rat(27182, 10000));
    assert!(hi > rat(27183, 10000));

    // Zero width and nonpositive log arguments are rejected.
    assert!(log_interval(&rat_i(-1), &width).is_err());
    assert!(log_interval(&rat_i(2), &rat_i(0)).is_err());
    assert!(exp_interval(&rat_i(0), &rat_i(0)).is_err());
}
