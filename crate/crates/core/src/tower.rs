//! The staged tower of exponent groups: each stage's exponents are the
//! purely infinite series of the stage below, so the lift that feeds the
//! logarithm becomes a plain re-tagging and automatically extends the lift
//! of every earlier stage.
//!
//! The payoff is a partial exponential whose domain strictly grows with
//! the stage, together with a descent count: how many logarithms it takes
//! to land an element's purely infinite part back in the ground stage.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::contraction::ZetaMap;
use crate::error::{Error, Result};
use crate::explog::{
    exp_interval, full_exp_with, full_log_with, rexp, CrossSection, ExpOutput, FactorTerm,
    LogOutput, PrecisionPolicy, ResidueLogMode,
};
use crate::group::GroupElement;
use crate::order_type::{same_universe, Universe};
use crate::rational::{merge_add, normalize_terms, sign_of, Rational};
use crate::series::{parse_series_with, render_series, Exponent, ExtValue, Series};
use crate::text::Cursor;

/// Largest tower depth the engine will build; nested exponent trees grow
/// quickly past this.
pub const STAGE_DEPTH_CAP: usize = 3;

/// Exponent at one stage of the tower: stage 0 wraps a chain group
/// element, stage n >= 1 is a finite sum of monomials whose exponents are
/// strictly negative stage-(n-1) elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageElement {
    u: Universe,
    stage: usize,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Ground(GroupElement),
    // Sorted ascending by exponent, nonzero coefficients, exponents one
    // stage down and strictly negative.
    Lift(Vec<(StageElement, Rational)>),
}

impl StageElement {
    /// Wraps a chain group element as the stage-0 exponent it is.
    pub fn ground(g: GroupElement) -> Self {
        StageElement { u: g.universe().clone(), stage: 0, repr: Repr::Ground(g) }
    }

    /// The zero element of the given stage.
    pub fn zero(u: &Universe, stage: usize) -> Self {
        if stage == 0 {
            Self::ground(GroupElement::zero(u))
        } else {
            StageElement { u: u.clone(), stage, repr: Repr::Lift(Vec::new()) }
        }
    }

    /// Builds a stage n >= 1 element from monomial terms; validates stage,
    /// universe, and strict negativity of every exponent.
    pub fn lift_from_terms(
        u: &Universe,
        stage: usize,
        terms: impl IntoIterator<Item = (StageElement, Rational)>,
    ) -> Result<Self> {
        if stage == 0 {
            return Err(Error::InvalidConstruction(
                "stage 0 elements are ground elements, not lifts".to_string(),
            ));
        }
        let terms: Vec<(StageElement, Rational)> = terms.into_iter().collect();
        for (e, _) in &terms {
            if !same_universe(u, &e.u) {
                return Err(Error::MismatchedUniverse);
            }
            if e.stage != stage - 1 {
                return Err(Error::MismatchedStage);
            }
            if e.sign() != Ordering::Less {
                return Err(Error::InvalidConstruction(
                    "tower exponents must be strictly negative".to_string(),
                ));
            }
        }
        Ok(StageElement { u: u.clone(), stage, repr: Repr::Lift(normalize_terms(terms)) })
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// The wrapped group element, at stage 0.
    pub fn as_ground(&self) -> Option<&GroupElement> {
        match &self.repr {
            Repr::Ground(g) => Some(g),
            Repr::Lift(_) => None,
        }
    }

    /// The monomial terms, at stages >= 1.
    pub fn lift_terms(&self) -> Option<&[(StageElement, Rational)]> {
        match &self.repr {
            Repr::Ground(_) => None,
            Repr::Lift(ts) => Some(ts),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Ground(g) => g.is_zero(),
            Repr::Lift(ts) => ts.is_empty(),
        }
    }

    /// Sign against zero: the sign of the leading coefficient.
    pub fn sign(&self) -> Ordering {
        match &self.repr {
            Repr::Ground(g) => g.sign(),
            Repr::Lift(ts) => match ts.first() {
                None => Ordering::Equal,
                Some((_, q)) => sign_of(q),
            },
        }
    }

    /// Sum, rejecting mismatched universes or stages.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_universe(&self.u, &other.u) {
            return Err(Error::MismatchedUniverse);
        }
        if self.stage != other.stage {
            return Err(Error::MismatchedStage);
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Ground(a), Repr::Ground(b)) => Repr::Ground(a.checked_add(b)?),
            (Repr::Lift(a), Repr::Lift(b)) => Repr::Lift(merge_add(a, b)),
            _ => return Err(Error::MismatchedStage),
        };
        Ok(StageElement { u: self.u.clone(), stage: self.stage, repr })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.negated())
    }

    pub fn negated(&self) -> Self {
        let repr = match &self.repr {
            Repr::Ground(g) => Repr::Ground(g.negated()),
            Repr::Lift(ts) => Repr::Lift(ts.iter().map(|(e, q)| (e.clone(), -q)).collect()),
        };
        StageElement { u: self.u.clone(), stage: self.stage, repr }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.u, self.stage);
        }
        let repr = match &self.repr {
            Repr::Ground(g) => Repr::Ground(g.scale(q)),
            Repr::Lift(ts) => Repr::Lift(ts.iter().map(|(e, c)| (e.clone(), c * q)).collect()),
        };
        StageElement { u: self.u.clone(), stage: self.stage, repr }
    }

    /// Order comparison, rejecting mismatched universes or stages.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.sign())
    }

    /// Parses the stage grammar, e.g. `s1{ -t^{ s0{ -e(a,0) } } }`.
    pub fn parse(u: &Universe, s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let x = parse_stage_element(u, &mut cur)?;
        cur.skip_ws();
        cur.expect_end()?;
        Ok(x)
    }
}

// Total order within one universe and stage; mixing either is a programmer
// error, guarded by `compatible` at the series boundary.
impl PartialOrd for StageElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StageElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("compared stage elements of different stages or universes")
    }
}

impl Exponent for StageElement {
    fn plus(&self, other: &Self) -> Self {
        self.checked_add(other).expect("added stage elements of different stages or universes")
    }

    fn negated(&self) -> Self {
        StageElement::negated(self)
    }

    fn sign(&self) -> Ordering {
        StageElement::sign(self)
    }

    fn compatible(&self, other: &Self) -> bool {
        same_universe(&self.u, &other.u) && self.stage == other.stage
    }
}

/// One-stage lift: sends a stage-n element to the stage-(n+1) exponent it
/// canonically becomes. On the ground stage this is the monomial lift of
/// the chain; higher stages re-tag exponent-wise. Order and sign are
/// preserved, so term lists stay normalized without re-sorting.
pub fn embed1(x: &StageElement) -> Result<StageElement> {
    let repr = match &x.repr {
        Repr::Ground(g) => {
            let zeta = ZetaMap::new(&x.u);
            let mut terms = Vec::with_capacity(g.terms().len());
            for (p, q) in g.terms() {
                let img = zeta.apply(*p)?;
                let key = StageElement::ground(GroupElement::basis(&x.u, img)?.negated());
                terms.push((key, q.clone()));
            }
            Repr::Lift(terms)
        }
        Repr::Lift(ts) => {
            let mut terms = Vec::with_capacity(ts.len());
            for (e, q) in ts {
                terms.push((embed1(e)?, q.clone()));
            }
            Repr::Lift(terms)
        }
    };
    Ok(StageElement { u: x.u.clone(), stage: x.stage + 1, repr })
}

/// Decides membership in the image of [`embed1`] and inverts it; the
/// obstruction lives at the ground stage, where every exponent must be a
/// negated basis direction.
pub fn try_unembed1(x: &StageElement) -> Result<StageElement> {
    let ts = match &x.repr {
        Repr::Ground(_) => {
            return Err(Error::InvalidConstruction("stage 0 has no lower stage".to_string()))
        }
        Repr::Lift(ts) => ts,
    };
    if x.stage == 1 {
        let zeta = ZetaMap::new(&x.u);
        let mut terms = Vec::with_capacity(ts.len());
        for (e, q) in ts {
            let g = e.as_ground().expect("stage-0 exponents are ground elements");
            let p = match g.terms() {
                [(p, c)] if *c == -Rational::one() => *p,
                _ => {
                    return Err(Error::NotInImage(format!(
                        "exponent {e} is not a negated basis direction"
                    )))
                }
            };
            terms.push((zeta.unapply(p)?, q.clone()));
        }
        Ok(StageElement::ground(GroupElement::from_terms(&x.u, terms)?))
    } else {
        let mut terms = Vec::with_capacity(ts.len());
        for (e, q) in ts {
            terms.push((try_unembed1(e)?, q.clone()));
        }
        StageElement::lift_from_terms(&x.u, x.stage - 1, terms)
    }
}

/// Iterates [`embed1`] up to the requested stage.
pub fn embed_to(x: &StageElement, stage: usize) -> Result<StageElement> {
    if stage < x.stage {
        return Err(Error::InvalidConstruction(format!(
            "cannot embed stage {} down to stage {stage}",
            x.stage
        )));
    }
    let mut cur = x.clone();
    while cur.stage < stage {
        cur = embed1(&cur)?;
    }
    Ok(cur)
}

/// Iterates [`try_unembed1`] down to the requested stage.
pub fn try_unembed_to(x: &StageElement, stage: usize) -> Result<StageElement> {
    if stage > x.stage {
        return Err(Error::InvalidConstruction(format!(
            "cannot unembed stage {} up to stage {stage}",
            x.stage
        )));
    }
    let mut cur = x.clone();
    while cur.stage > stage {
        cur = try_unembed1(&cur)?;
    }
    Ok(cur)
}

/// Exponent-wise lift of a whole series one stage up; floors lift along.
pub fn embed_series1(a: &Series<StageElement>) -> Result<Series<StageElement>> {
    let terms: Vec<(StageElement, Rational)> = a
        .terms()
        .iter()
        .map(|(e, q)| Ok((embed1(e)?, q.clone())))
        .collect::<Result<_>>()?;
    let floor = match a.floor() {
        ExtValue::Infinity => ExtValue::Infinity,
        ExtValue::Finite(g) => ExtValue::Finite(embed1(g)?),
    };
    Series::from_terms(terms, floor)
}

/// Stage of a series read off its exponents; `None` for the bare exact
/// zero, which belongs to every stage.
pub fn series_stage(a: &Series<StageElement>) -> Option<usize> {
    a.exponent_witness().map(|e| e.stage())
}

/// Cross-section at a fixed stage: the lift and its partial inverse, fed
/// to the generic logarithm and exponential.
#[derive(Debug, Clone)]
pub struct StageSection {
    u: Universe,
    stage: usize,
}

impl StageSection {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }
}

impl CrossSection for StageSection {
    type Exp = StageElement;

    fn zero_exp(&self) -> StageElement {
        StageElement::zero(&self.u, self.stage)
    }

    fn lift(&self, g: &StageElement) -> Result<Series<StageElement>> {
        if !same_universe(&self.u, &g.u) {
            return Err(Error::MismatchedUniverse);
        }
        if g.stage != self.stage {
            return Err(Error::MismatchedStage);
        }
        let up = embed1(g)?;
        match up.repr {
            Repr::Lift(terms) => Series::from_terms(terms, ExtValue::Infinity),
            Repr::Ground(_) => unreachable!("embed1 always produces a lift"),
        }
    }

    fn unlift(&self, infinite: &Series<StageElement>) -> Result<StageElement> {
        if !infinite.is_exact() {
            return Err(Error::PrecisionInsufficient);
        }
        if infinite.terms().is_empty() {
            return Ok(self.zero_exp());
        }
        let candidate = StageElement::lift_from_terms(
            &self.u,
            self.stage + 1,
            infinite.terms().iter().cloned(),
        )?;
        try_unembed1(&candidate)
    }
}

/// A finite ladder of stages over one label universe.
#[derive(Clone, Debug)]
pub struct StageTower {
    u: Universe,
    depth: usize,
}

impl StageTower {
    /// Builds a tower with stages `0..=depth`; depth is capped.
    pub fn build(u: &Universe, depth: usize) -> Result<Self> {
        if depth > STAGE_DEPTH_CAP {
            return Err(Error::DepthExceeded { requested: depth, cap: STAGE_DEPTH_CAP });
        }
        Ok(StageTower { u: u.clone(), depth })
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn check_stage(&self, stage: usize) -> Result<()> {
        if stage > self.depth {
            return Err(Error::StageOutOfRange { stage, depth: self.depth });
        }
        Ok(())
    }

    /// The cross-section at a stage of this tower.
    pub fn section(&self, stage: usize) -> Result<StageSection> {
        self.check_stage(stage)?;
        Ok(StageSection { u: self.u.clone(), stage })
    }

    /// Wraps a ground series into stage-0 exponents.
    pub fn ground_series(&self, a: &Series<GroupElement>) -> Result<Series<StageElement>> {
        let terms: Vec<(StageElement, Rational)> = a
            .terms()
            .iter()
            .map(|(e, q)| (StageElement::ground(e.clone()), q.clone()))
            .collect();
        let floor = match a.floor() {
            ExtValue::Infinity => ExtValue::Infinity,
            ExtValue::Finite(g) => ExtValue::Finite(StageElement::ground(g.clone())),
        };
        Series::from_terms(terms, floor)
    }

    /// Unwraps a stage-0 series back to the ground grammar.
    pub fn to_ground_series(&self, a: &Series<StageElement>) -> Result<Series<GroupElement>> {
        let unwrap = |e: &StageElement| -> Result<GroupElement> {
            match e.as_ground() {
                Some(g) => Ok(g.clone()),
                None => Err(Error::MismatchedStage),
            }
        };
        let terms: Vec<(GroupElement, Rational)> = a
            .terms()
            .iter()
            .map(|(e, q)| Ok((unwrap(e)?, q.clone())))
            .collect::<Result<_>>()?;
        let floor = match a.floor() {
            ExtValue::Infinity => ExtValue::Infinity,
            ExtValue::Finite(g) => ExtValue::Finite(unwrap(g)?),
        };
        Series::from_terms(terms, floor)
    }

    /// Embeds a series upward to the requested stage through the chain of
    /// canonical inclusions.
    pub fn embed_series(&self, a: &Series<StageElement>, to_stage: usize) -> Result<Series<StageElement>> {
        self.check_stage(to_stage)?;
        let mut cur = a.clone();
        if let Some(s) = series_stage(&cur) {
            if s > to_stage {
                return Err(Error::InvalidConstruction(format!(
                    "cannot embed a stage-{s} series down to stage {to_stage}"
                )));
            }
        }
        while series_stage(&cur).is_some_and(|s| s < to_stage) {
            cur = embed_series1(&cur)?;
        }
        Ok(cur)
    }

    /// The stage-n logarithm.
    pub fn log(
        &self,
        stage: usize,
        a: &Series<StageElement>,
        mode: &ResidueLogMode,
        policy: &PrecisionPolicy,
    ) -> Result<LogOutput<StageElement>> {
        let section = self.section(stage)?;
        if let Some(s) = series_stage(a) {
            if s != stage {
                return Err(Error::MismatchedStage);
            }
        }
        full_log_with(&section, a, mode, policy)
    }

    /// The stage-n partial exponential.
    pub fn exp(
        &self,
        stage: usize,
        b: &Series<StageElement>,
        mode: &ResidueLogMode,
        policy: &PrecisionPolicy,
    ) -> Result<ExpOutput<StageElement>> {
        let section = self.section(stage)?;
        if let Some(s) = series_stage(b) {
            if s != stage {
                return Err(Error::MismatchedStage);
            }
        }
        full_exp_with(&section, b, mode, policy)
    }

    /// The lift-beats-its-argument invariant: for strictly negative g, the
    /// valuation of the lifted series exceeds g in the stage order.
    pub fn check27(&self, g: &StageElement) -> Result<bool> {
        self.check_stage(g.stage())?;
        if g.sign() != Ordering::Less {
            return Err(Error::NonNegative);
        }
        let lifted = self.section(g.stage())?.lift(g)?;
        match lifted.valuation()? {
            ExtValue::Finite(v) => Ok(v.try_cmp(g)? == Ordering::Greater),
            ExtValue::Infinity => Ok(false),
        }
    }

    /// Least number of logarithms after which the purely infinite part
    /// lands in the embedded ground stage; bounded by depth + 1.
    pub fn log_descends(
        &self,
        a: &Series<StageElement>,
        mode: &ResidueLogMode,
        policy: &PrecisionPolicy,
    ) -> Result<usize> {
        if a.try_sign()? != Ordering::Greater {
            return Err(Error::NonPositive);
        }
        let stage = match series_stage(a) {
            Some(s) => s,
            None => return Err(Error::ZeroArgument),
        };
        self.check_stage(stage)?;
        let mut x = a.clone();
        for k in 0..=self.depth + 1 {
            let infinite = x.decompose_add()?.infinite;
            let mut grounded = true;
            for (e, _) in infinite.terms() {
                match try_unembed_to(e, 0) {
                    Ok(_) => {}
                    Err(Error::NotInImage(_)) => {
                        grounded = false;
                        break;
                    }
                    Err(err) => return Err(err),
                }
            }
            if grounded {
                return Ok(k);
            }
            if k <= self.depth {
                x = self.log(stage, &x, mode, policy)?.exact_total()?;
            }
        }
        Err(Error::NoDescent)
    }

    /// On arguments without a purely infinite part, the exponential must
    /// collapse to the restricted exponential of the infinitesimal part
    /// times the out-of-band constant factor.
    pub fn restricted_exp_agreement(
        &self,
        a: &Series<StageElement>,
        mode: &ResidueLogMode,
        policy: &PrecisionPolicy,
    ) -> Result<bool> {
        let stage = series_stage(a).unwrap_or(0);
        self.check_stage(stage)?;
        let d = a.decompose_add()?;
        if !d.infinite.terms().is_empty() {
            return Err(Error::InvalidConstruction(
                "restricted exponential needs a value without infinite part".to_string(),
            ));
        }
        let out = self.exp(stage, a, mode, policy)?;
        let zero = StageElement::zero(&self.u, stage);
        let direct = rexp(&d.infinitesimal, &zero, policy)?;
        if !out.monomial.indistinguishable(&Series::one_from(&zero))? {
            return Ok(false);
        }
        if !out.unit.indistinguishable(&direct)? {
            return Ok(false);
        }
        match (&out.factor, mode) {
            (FactorTerm::One, _) => Ok(d.constant.is_zero()),
            (FactorTerm::ExpInterval { lo, hi }, ResidueLogMode::Interval { width }) => {
                let (elo, ehi) = exp_interval(&d.constant, width)?;
                Ok(*lo == elo && *hi == ehi)
            }
            (FactorTerm::ExpInterval { .. }, ResidueLogMode::Monic) => Ok(false),
        }
    }
}

impl fmt::Display for StageElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}{{ ", self.stage)?;
        match &self.repr {
            Repr::Ground(g) => write!(f, "{g}")?,
            Repr::Lift(ts) => {
                if ts.is_empty() {
                    write!(f, "0")?;
                }
                for (i, (e, q)) in ts.iter().enumerate() {
                    let negq = q.is_negative();
                    if i == 0 {
                        if negq {
                            write!(f, "-")?;
                        }
                    } else if negq {
                        write!(f, " - ")?;
                    } else {
                        write!(f, " + ")?;
                    }
                    let a = q.abs();
                    if a.is_one() {
                        write!(f, "t^{{ {e} }}")?;
                    } else {
                        write!(f, "{a}*t^{{ {e} }}")?;
                    }
                }
            }
        }
        write!(f, " }}")
    }
}

/// Parses one stage element at the cursor; used by the element grammar and
/// the stage series grammar.
pub(crate) fn parse_stage_element(u: &Universe, cur: &mut Cursor) -> Result<StageElement> {
    cur.skip_ws();
    cur.expect('s')?;
    let stage = cur.uint()?;
    cur.expect('{')?;
    cur.skip_ws();
    let x = if stage == 0 {
        StageElement::ground(crate::group::parse_body(u, cur)?)
    } else {
        let mut terms: Vec<(StageElement, Rational)> = Vec::new();
        if cur.eat('0') {
            // Zero lift: no terms.
        } else {
            let mut negate = false;
            loop {
                cur.skip_ws();
                let mut coeff = if negate { -Rational::one() } else { Rational::one() };
                if cur.eat('-') {
                    coeff = -coeff;
                    cur.skip_ws();
                }
                if matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                    coeff *= cur.rational()?;
                    cur.skip_ws();
                    cur.expect('*')?;
                }
                cur.skip_ws();
                cur.expect('t')?;
                cur.expect('^')?;
                cur.expect('{')?;
                let e = parse_stage_element(u, cur)?;
                cur.skip_ws();
                cur.expect('}')?;
                terms.push((e, coeff));
                cur.skip_ws();
                if cur.eat('+') {
                    negate = false;
                } else if cur.eat('-') {
                    negate = true;
                } else {
                    break;
                }
            }
        }
        StageElement::lift_from_terms(u, stage, terms)?
    };
    cur.skip_ws();
    cur.expect('}')?;
    Ok(x)
}

impl fmt::Display for Series<StageElement> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_series(f, self, &|e: &StageElement| alloc::format!("{e}"))
    }
}

/// Parses a series over stage-`stage` exponents; the stage pins down the
/// exponent of constant terms.
pub fn parse_stage_series(u: &Universe, stage: usize, s: &str) -> Result<Series<StageElement>> {
    let mut cur = Cursor::new(s);
    let parse_exp = |cur: &mut Cursor| -> Result<StageElement> {
        let e = parse_stage_element(u, cur)?;
        if e.stage() != stage {
            return cur.err("stage tag does not match the series stage");
        }
        Ok(e)
    };
    let zero_exp = || Ok(StageElement::zero(u, stage));
    let ser = parse_series_with(&mut cur, &parse_exp, &zero_exp)?;
    cur.skip_ws();
    cur.expect_end()?;
    Ok(ser)
}
