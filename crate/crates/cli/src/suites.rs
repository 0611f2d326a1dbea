//! Check suites behind the `check` subcommand. Each suite samples inputs
//! deterministically from the configured seed, runs one family of engine
//! operations, verifies the outcome through an independent route where one
//! exists, and reports counts plus a pass or fail verdict. A failing check
//! records the first witness so a report line is enough to reproduce it.

use std::collections::BTreeMap;
use std::fmt::Display;

use hahnlog_core::{
    assemble_log, check_growth, check_strong, check_unit_law, corollary14_check, decompose_log,
    embed_series1, enumerate_segments, exponential_rank, iterate_log_value, log_equiv_class,
    log_equiv_witness, principal_exponential_rank, rat, rat_i, theorem15_check,
    zeta_closed_segments, Error, ExtValue, FinalSegment, GroupElement, IndexPoint, LogComponents,
    OrderTypeSpec, PrecisionPolicy, Rational, ResidueLogMode, SegmentKind, Series, StageElement,
    StageTower, Universe, ZetaMap,
};

use crate::config::{ModeChoice, RunConfig};
use crate::report::Section;
use crate::sample::Sampler;

/// Every suite name `check` accepts, in listing order.
pub const SUITE_NAMES: &[&str] = &[
    "strong",
    "t1",
    "growth",
    "lemma9",
    "lemma10",
    "thm12",
    "thm13",
    "cor14",
    "thm15",
    "thm16",
    "thm20",
    "tower27",
    "descent",
    "restricted",
    "oracles",
];

/// Runs one named suite. `Err` means the request itself was unusable
/// (unknown name, bad configuration); check failures land in the sections.
pub fn run_suite(name: &str, config: &RunConfig) -> Result<Vec<Section>, String> {
    match name {
        "strong" => suite_strong(config),
        "t1" => suite_t1(config),
        "growth" => suite_growth(config),
        "lemma9" => suite_lemma9(config),
        "lemma10" => suite_lemma10(config),
        "thm12" => suite_thm12(config),
        "thm13" => suite_thm13(config),
        "cor14" => suite_cor14(config),
        "thm15" => suite_thm15(config),
        "thm16" => suite_thm16(config),
        "thm20" => suite_thm20(config),
        "tower27" => suite_tower27(config),
        "descent" => suite_descent(config),
        "restricted" => suite_restricted(config),
        "oracles" => suite_oracles(config),
        _ => Err(format!(
            "unknown suite \"{name}\"; available: {}",
            SUITE_NAMES.join(", ")
        )),
    }
}

/// Pass/fail accumulator with a first-failure witness.
struct Tally {
    total: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { total: 0, failures: 0, first: None }
    }

    fn pass(&mut self) {
        self.total += 1;
    }

    fn fail(&mut self, witness: String) {
        self.total += 1;
        self.failures += 1;
        if self.first.is_none() {
            self.first = Some(witness);
        }
    }

    fn check<F: FnOnce() -> String>(&mut self, outcome: hahnlog_core::Result<bool>, context: F) {
        match outcome {
            Ok(true) => self.pass(),
            Ok(false) => self.fail(format!("{}: check returned false", context())),
            Err(e) => self.fail(format!("{}: {e}", context())),
        }
    }

    fn expect<F: FnOnce() -> String>(&mut self, ok: bool, context: F) {
        if ok {
            self.pass();
        } else {
            self.fail(context());
        }
    }

    fn finish(self, mut section: Section) -> Section {
        section.push("checked", self.total.to_string());
        section.push("failures", self.failures.to_string());
        if let Some(w) = self.first {
            section.push("first_failure", w);
        }
        let pass = self.failures == 0 && self.total > 0;
        section.verdict(pass);
        section
    }
}

fn residue_mode(config: &RunConfig) -> ResidueLogMode {
    match config.mode {
        ModeChoice::Monic => ResidueLogMode::Monic,
        ModeChoice::Interval => ResidueLogMode::Interval { width: config.interval_width.clone() },
    }
}

fn policy_of(config: &RunConfig) -> Result<PrecisionPolicy, String> {
    PrecisionPolicy::new(config.taylor_order).map_err(|e| e.to_string())
}

fn assembled(config: &RunConfig, u: &Universe) -> Result<LogComponents, String> {
    Ok(assemble_log(u, residue_mode(config), policy_of(config)?))
}

fn standard_universe(size: usize) -> Result<Universe, String> {
    Ok(OrderTypeSpec::standard(size).map_err(|e| e.to_string())?.into_universe())
}

fn render<T: Display>(x: &T) -> String {
    format!("{x}")
}

/// Strong triple inequality: `a > n log a` certified channel by channel on
/// sampled positive infinite monic-iterable inputs.
fn suite_strong(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let l = assembled(config, &u)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("strong triple inequality");
    let mut tally = Tally::new();
    for i in 0..config.samples {
        let a = sampler.positive_infinite();
        if i == 0 {
            section.push("sample_0", render(&a));
        }
        tally.check(check_strong(&l, &a), || format!("a = {a}"));
    }
    Ok(vec![tally.finish(section)])
}

/// Unit-law fixed point: for infinitesimal `b`, the gap `b - log(1+b)` sits
/// strictly above `v(b)`, exactly at `2 v(b)` once the Taylor order sees
/// the quadratic term.
fn suite_t1(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let l = assembled(config, &u)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("unit law");
    section.push("taylor_order", config.taylor_order.to_string());
    let mut tally = Tally::new();
    let want_doubled = config.taylor_order >= 2;
    for i in 0..config.samples {
        let b = sampler.infinitesimal();
        if i == 0 {
            section.push("sample_0", render(&b));
        }
        match check_unit_law(&l, &b) {
            Ok(rep) => {
                let doubled_ok = if want_doubled {
                    rep.doubled == Some(true)
                } else {
                    rep.doubled.is_none()
                };
                tally.expect(rep.strict && doubled_ok, || {
                    format!("b = {b}: strict={} doubled={:?}", rep.strict, rep.doubled)
                });
            }
            Err(e) => tally.fail(format!("b = {b}: {e}")),
        }
    }
    Ok(vec![tally.finish(section)])
}

/// Growth law: `a > n log a` for n up to 10 on sampled positive infinite
/// inputs.
fn suite_growth(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let l = assembled(config, &u)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("growth law");
    section.push("max_n", "10");
    let mut tally = Tally::new();
    for _ in 0..config.samples {
        let a = sampler.positive_infinite();
        for n in 1..=10u32 {
            tally.check(check_growth(&l, &a, n), || format!("a = {a}, n = {n}"));
        }
    }
    Ok(vec![tally.finish(section)])
}

/// Log-equivalence classes are the labels: the valuation-label route and
/// the iterated-logarithm witness search agree on sampled basis monomials.
fn suite_lemma9(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let l = assembled(config, &u)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("log equivalence classes");
    section.push("witness_bound", "8");
    let mut tally = Tally::new();
    let mut same_class = 0usize;
    let mut cross_class = 0usize;
    for i in 0..config.samples {
        let a = Series::monomial(sampler.negative_basis_exponent(), rat_i(1));
        let b = Series::monomial(sampler.negative_basis_exponent(), rat_i(1));
        let outcome = (|| -> hahnlog_core::Result<bool> {
            let class = log_equiv_class(&a, &b)?;
            let witness = log_equiv_witness(&l, &a, &b, 8)?;
            if class {
                same_class += 1;
            } else {
                cross_class += 1;
            }
            Ok(witness.is_some() == class)
        })();
        tally.check(outcome, || format!("a = {a}, b = {b}"));

        // An iterated log of a is always in a's class, with a small witness.
        let k = (i % 3 + 1) as u32;
        let outcome = (|| -> hahnlog_core::Result<bool> {
            let c = iterate_log_value(&l, &a, k)?;
            let class = log_equiv_class(&a, &c)?;
            let witness = log_equiv_witness(&l, &a, &c, 8)?;
            Ok(class && matches!(witness, Some(n) if n <= k))
        })();
        tally.check(outcome, || format!("a = {a}, k = {k}"));
    }
    section.push("same_class_pairs", same_class.to_string());
    section.push("cross_class_pairs", cross_class.to_string());
    Ok(vec![tally.finish(section)])
}

/// Archimedean equivalence refines log equivalence: pairs whose valuations
/// share a leading point are log-equivalent with witness at most 1.
fn suite_lemma10(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let l = assembled(config, &u)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let section = Section::new("archimedean pairs are log equivalent");
    let mut tally = Tally::new();
    for _ in 0..config.samples {
        let p = sampler.point();
        let g1 = sampler.negative_monic_exponent_at(p);
        let g2 = sampler.negative_monic_exponent_at(p);
        let a = Series::monomial(g1, rat_i(1));
        let b = Series::monomial(g2, rat_i(1));
        let outcome = (|| -> hahnlog_core::Result<bool> {
            let class = log_equiv_class(&a, &b)?;
            let witness = log_equiv_witness(&l, &a, &b, 8)?;
            Ok(class && matches!(witness, Some(n) if n <= 1))
        })();
        tally.check(outcome, || format!("a = {a}, b = {b}"));
    }
    Ok(vec![tally.finish(section)])
}

/// Compatible final segments are exactly the contraction-closed ones, over
/// every chain with up to four labels; each cut gets a verified violation
/// witness through both the group route and the series route.
fn suite_thm12(config: &RunConfig) -> Result<Vec<Section>, String> {
    let mut section = Section::new("compatible segments are the closed ones");
    let mut tally = Tally::new();
    let window = config.window_range();
    for size in 1..=4usize {
        let u = standard_universe(size)?;
        let l = assembled(config, &u)?;
        let zeta = ZetaMap::new(&u);
        let segments = enumerate_segments(&u, window.clone()).map_err(|e| e.to_string())?;
        section.push(format!("size_{size}_segments"), segments.len().to_string());
        for seg in &segments {
            let outcome = (|| -> hahnlog_core::Result<bool> {
                let compatible = seg.is_compatible(window.clone())?;
                if compatible != seg.is_zeta_closed() {
                    return Ok(false);
                }
                match seg.violation_witness()? {
                    None => Ok(compatible),
                    Some(w) => {
                        if compatible {
                            return Ok(false);
                        }
                        Ok(witness_violates(seg, &l, &zeta, &w)?)
                    }
                }
            })();
            tally.check(outcome, || format!("size {size}, segment {seg}"));
        }
    }
    Ok(vec![tally.finish(section)])
}

/// Confirms a violation witness: positive infinite, its valuation class
/// survives the coarse projection while the contraction image dies, and the
/// series logarithm lands where the group contraction says it must.
fn witness_violates(
    seg: &FinalSegment,
    l: &LogComponents,
    zeta: &ZetaMap,
    w: &Series<GroupElement>,
) -> hahnlog_core::Result<bool> {
    if w.try_sign()? != std::cmp::Ordering::Greater {
        return Ok(false);
    }
    let va = match w.valuation()? {
        ExtValue::Finite(g) => g,
        ExtValue::Infinity => return Ok(false),
    };
    // Group route: pi(v a) is nonzero negative while pi(chi(v a)) vanishes.
    if seg.project_residual(&va)?.sign() != std::cmp::Ordering::Less {
        return Ok(false);
    }
    let chi = zeta.chi(&va)?;
    if seg.project_residual(&chi)?.sign() != std::cmp::Ordering::Equal {
        return Ok(false);
    }
    // Series route: the valuation of log w agrees with chi and also dies.
    let out = l.full_log(w)?;
    let vl = match out.infinite.valuation()? {
        ExtValue::Finite(g) => g,
        ExtValue::Infinity => return Ok(false),
    };
    Ok(vl == chi && seg.project_residual(&vl)?.sign() == std::cmp::Ordering::Equal)
}

/// The exponential rank is order-isomorphic to the chain of closed
/// segments, and its principal variant reproduces the label order type.
fn suite_thm13(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let zeta = ZetaMap::new(&u);
    let mut section = Section::new("exponential rank structure");
    let mut tally = Tally::new();

    let rank = exponential_rank(&u);
    let closed = zeta_closed_segments(&u);
    section.push("rank_entries", rank.len().to_string());
    tally.expect(rank.len() == u.len() && closed.len() == u.len(), || {
        format!("expected {} entries, rank has {}, closed has {}", u.len(), rank.len(), closed.len())
    });

    for (i, q) in rank.iter().enumerate() {
        tally.expect(q.preimage() == closed[i], || {
            format!("rank entry {i} ({q}) does not sit over closed segment {}", closed[i])
        });
        tally.expect(closed[i].quotient_image() == *q, || {
            format!("closed segment {} does not project onto rank entry {i}", closed[i])
        });
    }

    // Ascending by inclusion: minima strictly descend the label chain.
    for w in rank.windows(2) {
        tally.expect(w[0].min_label() > w[1].min_label(), || {
            format!("rank entries {} and {} are out of order", w[0], w[1])
        });
    }
    for i in 0..rank.len() {
        for j in 0..rank.len() {
            let included = (0..u.len())
                .all(|t| !rank[i].contains_label(t) || rank[j].contains_label(t));
            tally.expect(included == (i <= j), || {
                format!("inclusion of rank entries {i} and {j} disagrees with their order")
            });
        }
    }

    let principal = principal_exponential_rank(&u);
    section.push("principal_labels", principal.labels().join(","));
    tally.expect(principal.labels() == u.labels(), || {
        format!("principal rank labels {:?} differ from the chain labels", principal.labels())
    });
    tally.expect(principal.labels() == zeta.quotient_order_type().labels(), || {
        "principal rank disagrees with the contraction quotient".to_string()
    });

    Ok(vec![tally.finish(section)])
}

/// No closed segment is principal: checked exhaustively for chains of up to
/// five labels and for the configured chain.
fn suite_cor14(config: &RunConfig) -> Result<Vec<Section>, String> {
    let mut section = Section::new("closed segments are never principal");
    let mut tally = Tally::new();
    let window = config.window_range();
    for size in 1..=5usize {
        let u = standard_universe(size)?;
        tally.check(
            corollary14_check(&u, window.clone()),
            || format!("chain of {size} labels"),
        );
    }
    let u = config.universe()?;
    tally.check(corollary14_check(&u, window.clone()), || {
        format!("configured chain {}", u.labels().join(","))
    });
    section.push("sizes", "1..=5 and configured");
    Ok(vec![tally.finish(section)])
}

/// Coarse comparison: for each proper closed segment, sampled positive
/// infinite elements outside the coarse ring route consistently through the
/// group contraction and the series logarithm, landing outside the segment.
fn suite_thm15(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let l = assembled(config, &u)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("coarse comparison");
    let mut tally = Tally::new();
    let mut skipped = 0usize;
    for seg in zeta_closed_segments(&u) {
        let boundary = match seg.kind() {
            SegmentKind::AboveLabel(t) => *t,
            // The whole chain puts every element in its coarse ring, so no
            // sample can satisfy the hypotheses; nothing to check.
            SegmentKind::All => {
                skipped += 1;
                continue;
            }
            SegmentKind::Cut(_) => continue,
        };
        let mut samples = Vec::with_capacity(config.samples);
        for _ in 0..config.samples {
            samples.push(sampler.positive_infinite_leading_label(boundary));
        }
        tally.check(theorem15_check(&seg, &l, &samples), || format!("segment {seg}"));
    }
    section.push("segments_skipped", format!("{skipped} (the whole chain has an empty test set)"));
    if tally.total == 0 {
        // A one-label chain has only the whole-chain segment.
        section.push("note", "no proper closed segments in a one-label chain");
        section.verdict(true);
        return Ok(vec![section]);
    }
    Ok(vec![tally.finish(section)])
}

/// Decomposition and assembly of logarithms are mutually inverse: the
/// probed action is the successor map, modes round-trip exactly, and the
/// rebuilt logarithm agrees with the original on fresh samples.
fn suite_thm16(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let zeta = ZetaMap::new(&u);
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let section = Section::new("log decomposition round trip");
    let mut tally = Tally::new();
    let window = config.window_range();
    let window_points = u.len() * (config.window.1 - config.window.0 + 1).max(0) as usize;
    let max_order = config.taylor_order.max(1);
    for i in 0..config.samples {
        let mode = if i % 2 == 0 {
            ResidueLogMode::Monic
        } else {
            let denom = rat_i((i % 3 + 1) as i64);
            ResidueLogMode::Interval { width: config.interval_width.clone() / denom }
        };
        let policy = PrecisionPolicy::new(1 + (i as u32 % max_order)).map_err(|e| e.to_string())?;
        let l = assemble_log(&u, mode.clone(), policy.clone());
        let probe_inf = sampler.positive_infinite();
        let probe_unit = sampler.one_unit();
        let outcome = (|| -> hahnlog_core::Result<bool> {
            let d = decompose_log(&l, window.clone(), &policy)?;
            if d.mode != mode || d.zeta_action.len() != window_points {
                return Ok(false);
            }
            for &(p, q) in &d.zeta_action {
                if zeta.apply(p)? != q {
                    return Ok(false);
                }
            }
            let rebuilt = d.assemble(&u, policy.clone())?;
            for probe in [&probe_inf, &probe_unit] {
                let before = l.full_log(probe)?;
                let after = rebuilt.full_log(probe)?;
                if before.infinite != after.infinite
                    || before.residue != after.residue
                    || before.small != after.small
                {
                    return Ok(false);
                }
            }
            Ok(decompose_log(&rebuilt, window.clone(), &policy)? == d)
        })();
        tally.check(outcome, || format!("round {i}, probe {probe_inf}"));
    }
    Ok(vec![tally.finish(section)])
}

/// The principal exponential rank reproduces the label order type, for
/// chains of up to five labels and the configured one; the contraction is
/// strictly increasing and invertible on the window.
fn suite_thm20(config: &RunConfig) -> Result<Vec<Section>, String> {
    let mut section = Section::new("principal rank is the label chain");
    let mut tally = Tally::new();
    let mut universes: Vec<Universe> = Vec::new();
    for size in 1..=5usize {
        universes.push(standard_universe(size)?);
    }
    universes.push(config.universe()?);
    for u in &universes {
        let zeta = ZetaMap::new(u);
        let principal = principal_exponential_rank(u);
        tally.expect(principal.labels() == u.labels(), || {
            format!(
                "chain {}: principal rank came out as {}",
                u.labels().join(","),
                principal.labels().join(",")
            )
        });
        tally.expect(
            zeta.quotient_order_type().labels() == u.labels(),
            || format!("chain {}: quotient order type mismatch", u.labels().join(",")),
        );
        let outcome = (|| -> hahnlog_core::Result<bool> {
            for label in 0..u.len() {
                for offset in config.window_range() {
                    let p = IndexPoint::new(u, label, offset)?;
                    let q = zeta.apply(p)?;
                    if !(q > p) || zeta.unapply(q)? != p {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        })();
        tally.check(outcome, || {
            format!("chain {}: contraction action on the window", u.labels().join(","))
        });
    }
    section.push("chains", "1..=5 labels and configured");
    Ok(vec![tally.finish(section)])
}

/// The lift-beats-its-argument invariant at every stage of the tower.
fn suite_tower27(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let tower = StageTower::build(&u, config.depth).map_err(|e| e.to_string())?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("lift beats its argument");
    section.push("depth", config.depth.to_string());
    let mut tally = Tally::new();
    for stage in 0..=config.depth {
        for _ in 0..config.samples {
            let x = sampler.negative_stage(stage);
            tally.check(tower.check27(&x), || format!("stage {stage}, x = {x}"));
        }
    }
    Ok(vec![tally.finish(section)])
}

/// Iterated logs of stage-n elements ground within n steps, and each stage
/// strictly widens the exponential domain via a canonical witness.
fn suite_descent(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let tower = StageTower::build(&u, config.depth).map_err(|e| e.to_string())?;
    let mode = residue_mode(config);
    let policy = policy_of(config)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("logarithmic descent");
    section.push("depth", config.depth.to_string());
    let mut tally = Tally::new();

    for stage in 0..=config.depth {
        for _ in 0..config.samples {
            let a = sampler.stage_positive_infinite(stage);
            match tower.log_descends(&a, &mode, &policy) {
                Ok(k) => tally.expect(k <= stage, || {
                    format!("stage {stage}: a = {a} needed {k} logs")
                }),
                Err(e) => tally.fail(format!("stage {stage}: a = {a}: {e}")),
            }
        }
    }

    // Canonical witnesses: t^x with a two-direction leaf fails exp at each
    // stage below its own, then succeeds once embedded one stage up.
    let half = rat(-1, 2);
    let g_bad = GroupElement::from_terms(
        &u,
        [
            (IndexPoint::new(&u, 0, 0).map_err(|e| e.to_string())?, half.clone()),
            (IndexPoint::new(&u, 0, 1).map_err(|e| e.to_string())?, half),
        ],
    )
    .map_err(|e| e.to_string())?;
    let mut exponent = StageElement::ground(g_bad);
    for stage in 1..=config.depth {
        let b = Series::monomial(exponent.clone(), rat_i(1));
        let below = tower.exp(stage - 1, &b, &mode, &policy);
        tally.expect(matches!(below, Err(Error::NotInImage(_))), || {
            format!("stage {stage} witness was already exponentiable at stage {}", stage - 1)
        });
        let lifted = embed_series1(&b).map_err(|e| e.to_string())?;
        let above = tower.exp(stage, &lifted, &mode, &policy);
        match above {
            Ok(out) => tally.expect(out.monomial.terms().len() == 1, || {
                format!("stage {stage} witness exponential is not a monomial")
            }),
            Err(e) => tally.fail(format!("stage {stage} witness failed above: {e}")),
        }
        section.push(
            format!("stage_{stage}_witness"),
            format!("exp of {b} fails at stage {}, widens at stage {stage}", stage - 1),
        );
        exponent = StageElement::lift_from_terms(&u, stage, [(exponent, rat_i(-1))])
            .map_err(|e| e.to_string())?;
    }

    Ok(vec![tally.finish(section)])
}

/// On arguments with no purely infinite part, the stage exponential
/// collapses to the restricted exponential of the infinitesimal part.
fn suite_restricted(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let tower = StageTower::build(&u, config.depth).map_err(|e| e.to_string())?;
    let mode = residue_mode(config);
    let policy = policy_of(config)?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("restricted exponential agreement");
    section.push("mode", config.mode.to_string());
    let mut tally = Tally::new();
    for stage in 0..=config.depth {
        for i in 0..config.samples {
            let mut a = sampler.stage_infinitesimal(stage);
            if matches!(mode, ResidueLogMode::Interval { .. }) && i % 2 == 1 {
                let c = Series::constant_from(&StageElement::zero(&u, stage), sampler.coefficient());
                a = match a.checked_add(&c) {
                    Ok(s) => s,
                    Err(e) => {
                        tally.fail(format!("stage {stage}: building sample: {e}"));
                        continue;
                    }
                };
            }
            tally.check(
                tower.restricted_exp_agreement(&a, &mode, &policy),
                || format!("stage {stage}, a = {a}"),
            );
        }
    }
    Ok(vec![tally.finish(section)])
}

/// Series arithmetic against a brute-force convolution oracle on small
/// exact inputs, plus the inversion identity.
fn suite_oracles(config: &RunConfig) -> Result<Vec<Section>, String> {
    let u = config.universe()?;
    let mut sampler = Sampler::new(&u, config.seed, config.window);
    let mut section = Section::new("convolution oracle");
    section.push("max_terms", "5");
    let mut tally = Tally::new();
    let one = Series::one_from(&GroupElement::zero(&u));
    for _ in 0..config.samples {
        let a = sampler.exact_series(5);
        let b = sampler.exact_series(5);
        let outcome = (|| -> hahnlog_core::Result<bool> {
            let sum = a.checked_add(&b)?;
            if !matches_model(&sum, &model_add(&a, &b)?) {
                return Ok(false);
            }
            let prod = a.mul(&b)?;
            if !matches_model(&prod, &model_mul(&a, &b)?) {
                return Ok(false);
            }
            if !a.terms().is_empty() {
                let inv = a.invert(config.taylor_order.max(2))?;
                if !a.mul(&inv)?.indistinguishable(&one)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        tally.check(outcome, || format!("a = {a}, b = {b}"));
    }
    Ok(vec![tally.finish(section)])
}

fn model_add(
    a: &Series<GroupElement>,
    b: &Series<GroupElement>,
) -> hahnlog_core::Result<BTreeMap<GroupElement, Rational>> {
    let mut m: BTreeMap<GroupElement, Rational> = BTreeMap::new();
    for (g, q) in a.terms().iter().chain(b.terms()) {
        accumulate(&mut m, g.clone(), q.clone());
    }
    m.retain(|_, q| *q != rat_i(0));
    Ok(m)
}

fn model_mul(
    a: &Series<GroupElement>,
    b: &Series<GroupElement>,
) -> hahnlog_core::Result<BTreeMap<GroupElement, Rational>> {
    let mut m: BTreeMap<GroupElement, Rational> = BTreeMap::new();
    for (ga, qa) in a.terms() {
        for (gb, qb) in b.terms() {
            accumulate(&mut m, ga.checked_add(gb)?, qa.clone() * qb.clone());
        }
    }
    m.retain(|_, q| *q != rat_i(0));
    Ok(m)
}

fn accumulate(m: &mut BTreeMap<GroupElement, Rational>, g: GroupElement, q: Rational) {
    match m.remove(&g) {
        Some(old) => {
            m.insert(g, old + q);
        }
        None => {
            m.insert(g, q);
        }
    }
}

fn matches_model(s: &Series<GroupElement>, m: &BTreeMap<GroupElement, Rational>) -> bool {
    s.terms().len() == m.len() && s.terms().iter().all(|(g, q)| m.get(g) == Some(q))
}
