//! Tower properties across stages: the valuation inequality for lifted
//! exponents, coherence of the stage maps with log and exp, descent of
//! logarithms to the ground stage, and growth of the exponential's domain.

use std::cmp::Ordering;

use hahnlog_core::{
    assemble_log, rat, rat_i, try_unembed_to, Error, GroupElement, IndexPoint, OrderTypeSpec,
    PrecisionPolicy, ResidueLogMode, Series, StageElement, StageTower, Universe,
    STAGE_DEPTH_CAP,
};

fn universe1() -> Universe {
    OrderTypeSpec::standard(1).unwrap().into_universe()
}

fn basis(u: &Universe, offset: i64) -> GroupElement {
    GroupElement::basis(u, IndexPoint::new(u, 0, offset).unwrap()).unwrap()
}

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::new(2).unwrap()
}

// Strictly negative ground and stage-1 exponents for the sweeps.
fn negative_grounds(u: &Universe) -> Vec<StageElement> {
    let mut out = Vec::new();
    for offset in -2..=2 {
        out.push(StageElement::ground(basis(u, offset).negated()));
        out.push(StageElement::ground(basis(u, offset).scale(&rat(-3, 2))));
    }
    out.push(StageElement::ground(
        basis(u, 0)
            .scale(&rat(-1, 2))
            .checked_add(&basis(u, 1).scale(&rat(-1, 2)))
            .unwrap(),
    ));
    out.push(StageElement::ground(
        basis(u, -1).negated().checked_add(&basis(u, 2)).unwrap(),
    ));
    out
}

fn negative_stage1(u: &Universe) -> Vec<StageElement> {
    let keys = negative_grounds(u);
    let mut out = Vec::new();
    for k in &keys {
        out.push(StageElement::lift_from_terms(u, 1, [(k.clone(), rat_i(-1))]).unwrap());
        out.push(StageElement::lift_from_terms(u, 1, [(k.clone(), rat(-2, 3))]).unwrap());
    }
    // Two-term lifts, negated when the leading coefficient is positive.
    for pair in keys.windows(2) {
        let x = StageElement::lift_from_terms(
            u,
            1,
            [(pair[0].clone(), rat_i(-1)), (pair[1].clone(), rat(1, 2))],
        )
        .unwrap();
        out.push(if x.sign() == Ordering::Less { x } else { x.negated() });
    }
    out.retain(|x| x.sign() == Ordering::Less);
    out
}

#[test]
fn lifted_exponents_dominate_their_valuations() {
    let u = universe1();
    let tower = StageTower::build(&u, 2).unwrap();
    for g in negative_grounds(&u).into_iter().chain(negative_stage1(&u)) {
        assert!(tower.check27(&g).unwrap(), "valuation bound failed for {g}");
    }
    let positive = StageElement::ground(basis(&u, 0));
    assert!(matches!(tower.check27(&positive), Err(Error::NonNegative)));
}

#[test]
fn stage_maps_commute_with_the_logarithm() {
    let u = universe1();
    let tower = StageTower::build(&u, 2).unwrap();
    let mode = ResidueLogMode::Monic;
    let p = policy();
    let ground_log = assemble_log(&u, mode.clone(), p.clone());

    let samples = [
        Series::monomial(basis(&u, 0).negated(), rat_i(1)),
        Series::monomial(basis(&u, -2).negated(), rat_i(1)),
        Series::monomial(basis(&u, 0).negated(), rat_i(1))
            .checked_add(&Series::monomial(basis(&u, 1).negated(), rat(1, 3)))
            .unwrap(),
    ];

    for a in &samples {
        // Stage 0 of the tower is the ground logarithm verbatim.
        let lifted = tower.ground_series(a).unwrap();
        let out0 = tower.log(0, &lifted, &mode, &p).unwrap();
        let ground = ground_log.full_log(a).unwrap();
        assert_eq!(
            tower.to_ground_series(&out0.exact_total().unwrap()).unwrap(),
            ground.exact_total().unwrap()
        );

        // Embedding first and taking the stage-1 log lands on the embedded
        // image of the stage-0 log.
        for stage in 1..=2 {
            let embedded = tower.embed_series(&lifted, stage).unwrap();
            let up = tower.log(stage, &embedded, &mode, &p).unwrap();
            let down = tower
                .embed_series(&out0.exact_total().unwrap(), stage)
                .unwrap();
            assert_eq!(up.exact_total().unwrap(), down, "log drifted at stage {stage}");
        }
    }
}

#[test]
fn stage_maps_commute_with_the_exponential() {
    let u = universe1();
    let tower = StageTower::build(&u, 1).unwrap();
    let mode = ResidueLogMode::Monic;
    let p = policy();

    // A ground argument inside the stage-0 domain.
    let b = Series::monomial(basis(&u, 1).negated(), rat_i(1));
    let lifted = tower.ground_series(&b).unwrap();
    let low = tower.exp(0, &lifted, &mode, &p).unwrap().exact_total().unwrap();
    let embedded_arg = tower.embed_series(&lifted, 1).unwrap();
    let high = tower.exp(1, &embedded_arg, &mode, &p).unwrap().exact_total().unwrap();
    assert_eq!(high, tower.embed_series(&low, 1).unwrap());
}

#[test]
fn exponential_domain_grows_with_the_stage() {
    let u = universe1();
    let tower = StageTower::build(&u, 1).unwrap();
    let mode = ResidueLogMode::Monic;
    let p = policy();

    // Exponents that are not lifted basis directions stay outside the
    // ground exponential's domain but enter one stage up.
    let shapes = [
        basis(&u, 0)
            .scale(&rat(-1, 2))
            .checked_add(&basis(&u, 1).scale(&rat(-1, 2)))
            .unwrap(),
        basis(&u, 0).negated().checked_add(&basis(&u, 2).negated()).unwrap(),
        basis(&u, -1).scale(&rat(-2, 1)),
    ];
    for g in shapes {
        let arg = Series::monomial(g, rat_i(1));
        let lifted = tower.ground_series(&arg).unwrap();
        assert!(matches!(
            tower.exp(0, &lifted, &mode, &p),
            Err(Error::NotInImage(_))
        ));

        let embedded = tower.embed_series(&lifted, 1).unwrap();
        let out = tower.exp(1, &embedded, &mode, &p).unwrap();
        let value = out.exact_total().unwrap();
        // The stage-1 log recovers the argument exactly.
        let back = tower.log(1, &value, &mode, &p).unwrap();
        assert_eq!(back.exact_total().unwrap(), embedded);
    }
}

#[test]
fn logarithms_descend_to_the_ground_stage() {
    let u = universe1();
    let tower = StageTower::build(&u, 2).unwrap();
    let mode = ResidueLogMode::Monic;
    let p = policy();

    // Embedded ground content is grounded from the start.
    for stage in 1..=2 {
        let a = Series::monomial(basis(&u, 0).negated(), rat_i(1));
        let lifted = tower.embed_series(&tower.ground_series(&a).unwrap(), stage).unwrap();
        assert_eq!(tower.log_descends(&lifted, &mode, &p).unwrap(), 0);
    }

    // A genuinely stage-1 exponent needs exactly one log.
    let g = basis(&u, 0)
        .scale(&rat(-1, 2))
        .checked_add(&basis(&u, 1).scale(&rat(-1, 2)))
        .unwrap();
    let x = StageElement::lift_from_terms(&u, 1, [(StageElement::ground(g), rat_i(-1))]).unwrap();
    let a = Series::monomial(x.clone(), rat_i(1));
    assert_eq!(tower.log_descends(&a, &mode, &p).unwrap(), 1);

    // One log of that element lands on exponents that unembed to stage 0.
    let one_log = tower.log(1, &a, &mode, &p).unwrap().exact_total().unwrap();
    for (e, _) in one_log.terms() {
        assert!(try_unembed_to(e, 0).is_ok());
    }

    // Truncating the input does not change the answer.
    let capped = a.with_floor_capped(hahnlog_core::ExtValue::Finite(
        x.negated(),
    ));
    assert_eq!(tower.log_descends(&capped, &mode, &p).unwrap(), 1);
}

#[test]
fn restricted_exponentials_agree_with_the_interval_oracle() {
    let u = universe1();
    let tower = StageTower::build(&u, 1).unwrap();
    let p = policy();

    let infinitesimals = [
        Series::monomial(StageElement::ground(basis(&u, 0)), rat_i(1)),
        Series::monomial(StageElement::ground(basis(&u, 2)), rat(-1, 2)),
        Series::monomial(StageElement::ground(basis(&u, 0)), rat(1, 3))
            .checked_add(&Series::monomial(StageElement::ground(basis(&u, 1)), rat_i(2)))
            .unwrap(),
    ];
    for mode in [
        ResidueLogMode::Monic,
        ResidueLogMode::Interval { width: rat(1, 128) },
    ] {
        for a in &infinitesimals {
            assert!(tower.restricted_exp_agreement(a, &mode, &p).unwrap(), "{a}");
        }
    }

    // A constant term needs the interval mode.
    let with_constant = infinitesimals[0]
        .checked_add(&Series::monomial(
            StageElement::ground(GroupElement::zero(&u)),
            rat(3, 4),
        ))
        .unwrap();
    assert!(tower
        .restricted_exp_agreement(&with_constant, &ResidueLogMode::Interval { width: rat(1, 128) }, &p)
        .unwrap());

    // Infinite parts are outside the restricted exponential's domain.
    let infinite = Series::monomial(StageElement::ground(basis(&u, 0).negated()), rat_i(1));
    assert!(tower.restricted_exp_agreement(&infinite, &ResidueLogMode::Monic, &p).is_err());
}

#[test]
fn tower_limits_hold() {
    let u = universe1();
    assert!(matches!(
        StageTower::build(&u, STAGE_DEPTH_CAP + 1),
        Err(Error::DepthExceeded { requested, cap })
            if requested == STAGE_DEPTH_CAP + 1 && cap == STAGE_DEPTH_CAP
    ));
    let tower = StageTower::build(&u, 1).unwrap();
    assert!(matches!(
        tower.section(2),
        Err(Error::StageOutOfRange { stage: 2, depth: 1 })
    ));
}
