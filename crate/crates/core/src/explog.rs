//! Logarithms and exponentials compatible with the contraction structure.
//!
//! A full logarithm splits a positive series `a = c * t^g * (1 + eps)` into
//! three independent contributions: a purely infinite part obtained by
//! lifting `-g` through the cross-section, the logarithm of the positive
//! rational residue `c`, and the Mercator series of the 1-unit. Residue
//! logarithms are irrational for `c != 1`, so they never enter the series:
//! monic mode rejects them, interval mode carries them out of band as exact
//! rational enclosures of fixed width. Exponentials run the same three
//! channels in reverse.
//!
//! The cross-section is a trait so the ground field and every tower stage
//! share one implementation of the full maps.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::contraction::ZetaMap;
use crate::error::{Error, Result};
use crate::group::{GroupElement, IndexPoint};
use crate::order_type::Universe;
use crate::rational::{factorial, rat, rat_i, Rational};
use crate::series::{Exponent, ExtValue, Series};

/// Truncation depth for the Taylor channels (Mercator, exponential,
/// geometric). Floors record the truncation error, so any order is sound;
/// higher orders just know more terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    taylor_order: u32,
}

impl PrecisionPolicy {
    pub const DEFAULT_ORDER: u32 = 3;

    pub fn new(taylor_order: u32) -> Result<Self> {
        if taylor_order == 0 {
            return Err(Error::InvalidPolicy("taylor order must be at least 1".to_string()));
        }
        Ok(PrecisionPolicy { taylor_order })
    }

    pub fn taylor_order(&self) -> u32 {
        self.taylor_order
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { taylor_order: Self::DEFAULT_ORDER }
    }
}

/// How the logarithm treats a positive rational residue other than 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueLogMode {
    /// Only residue 1 passes through the log (and constant 0 through exp).
    Monic,
    /// Any positive residue passes; its log travels out of band as a
    /// rational interval of exactly this width.
    Interval { width: Rational },
}

/// Out-of-band contribution of the residue to a logarithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueTerm {
    /// The residue was 1; its log is exactly zero.
    Zero,
    /// Exact rational enclosure of the residue's log.
    LogInterval { lo: Rational, hi: Rational },
}

/// Out-of-band contribution of the constant term to an exponential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorTerm {
    /// The constant term was 0; the factor is exactly 1.
    One,
    /// Exact rational enclosure of the constant's exponential.
    ExpInterval { lo: Rational, hi: Rational },
}

/// The three channels of a full logarithm.
#[derive(Clone, Debug)]
pub struct LogOutput<E: Exponent> {
    /// Lift of the negated valuation: purely infinite, exact.
    pub infinite: Series<E>,
    /// Log of the rational residue, out of band.
    pub residue: ResidueTerm,
    /// Mercator series of the 1-unit: infinitesimal.
    pub small: Series<E>,
}

impl<E: Exponent> LogOutput<E> {
    /// The series-valued channels summed; omits the residue contribution.
    pub fn in_band(&self) -> Result<Series<E>> {
        self.infinite.checked_add(&self.small)
    }

    /// The whole logarithm as one series; fails unless the residue channel
    /// is exactly zero.
    pub fn exact_total(&self) -> Result<Series<E>> {
        match &self.residue {
            ResidueTerm::Zero => self.in_band(),
            ResidueTerm::LogInterval { .. } => Err(Error::InexactConstant),
        }
    }
}

/// The three channels of a full exponential.
#[derive(Clone, Debug)]
pub struct ExpOutput<E: Exponent> {
    /// Exponential of the purely infinite part: an exact monomial.
    pub monomial: Series<E>,
    /// Exponential of the constant term, out of band.
    pub factor: FactorTerm,
    /// Exponential of the infinitesimal part: a 1-unit.
    pub unit: Series<E>,
}

impl<E: Exponent> ExpOutput<E> {
    /// The series-valued channels multiplied; omits the factor contribution.
    pub fn in_band(&self) -> Result<Series<E>> {
        self.monomial.mul(&self.unit)
    }

    /// The whole exponential as one series; fails unless the factor channel
    /// is exactly one.
    pub fn exact_total(&self) -> Result<Series<E>> {
        match &self.factor {
            FactorTerm::One => self.in_band(),
            FactorTerm::ExpInterval { .. } => Err(Error::InexactConstant),
        }
    }
}

/// Monomial lift connecting an exponent group to its series field: the
/// structure a logarithm needs besides the Taylor channels.
pub trait CrossSection {
    type Exp: Exponent;

    /// The group's zero exponent, for building constants.
    fn zero_exp(&self) -> Self::Exp;

    /// The lift: order-preserving, purely infinite on nonzero input, with
    /// `v(lift(g))` depending only on the archimedean class of `g`.
    fn lift(&self, g: &Self::Exp) -> Result<Series<Self::Exp>>;

    /// Inverse of the lift on exact purely infinite series; rejects series
    /// outside the image, which bounds the exponential's domain.
    fn unlift(&self, infinite: &Series<Self::Exp>) -> Result<Self::Exp>;
}

/// Ground cross-section: `g` lifts to the series `sum of q * t^(-e_(zeta p))`
/// over the terms `q * e_p` of `g`.
#[derive(Clone, Debug)]
pub struct LogCrossSection {
    u: Universe,
    zeta: ZetaMap,
}

impl LogCrossSection {
    pub fn new(u: &Universe) -> Self {
        LogCrossSection { u: u.clone(), zeta: ZetaMap::new(u) }
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    pub fn zeta(&self) -> &ZetaMap {
        &self.zeta
    }
}

impl CrossSection for LogCrossSection {
    type Exp = GroupElement;

    fn zero_exp(&self) -> GroupElement {
        GroupElement::zero(&self.u)
    }

    fn lift(&self, g: &GroupElement) -> Result<Series<GroupElement>> {
        let mut terms = Vec::with_capacity(g.terms().len());
        for (p, q) in g.terms() {
            let x = GroupElement::basis(&self.u, self.zeta.apply(*p)?)?.negated();
            terms.push((x, q.clone()));
        }
        Series::from_terms(terms, ExtValue::Infinity)
    }

    fn unlift(&self, infinite: &Series<GroupElement>) -> Result<GroupElement> {
        if !infinite.is_exact() {
            return Err(Error::PrecisionInsufficient);
        }
        let mut terms = Vec::with_capacity(infinite.terms().len());
        for (x, q) in infinite.terms() {
            let image_point = match x.terms() {
                [(p, c)] if *c == -Rational::one() => *p,
                _ => return Err(Error::NotInImage(alloc::format!("t^{{{x}}}"))),
            };
            terms.push((self.zeta.unapply(image_point)?, q.clone()));
        }
        GroupElement::from_terms(&self.u, terms)
    }
}

/// Mercator series `eps - eps^2/2 + ...` up to the policy order, with the
/// truncation recorded in the floor. Assumes `v(eps) > 0`.
fn mercator<E: Exponent>(eps: &Series<E>, zero: &E, p: &PrecisionPolicy) -> Result<Series<E>> {
    let n = p.taylor_order();
    let mut sum = Series::exact_zero();
    let mut pow = Series::one_from(zero);
    for i in 1..=n {
        pow = pow.mul(eps)?;
        let c = if i % 2 == 1 { rat(1, i as i64) } else { rat(-1, i as i64) };
        sum = sum.checked_add(&pow.scale(&c))?;
    }
    Ok(sum.with_floor_capped(eps.valuation_bound().times(n + 1)))
}

/// Restricted logarithm of a 1-unit (leading term exactly 1 at exponent 0).
pub fn rlog<E: Exponent>(one_unit: &Series<E>, p: &PrecisionPolicy) -> Result<Series<E>> {
    let (zero, eps) = match one_unit.terms().first() {
        Some((e, q)) if e.is_zero() && q.is_one() => {
            let zero = e.clone();
            let tail: Vec<(E, Rational)> =
                one_unit.terms()[1..].iter().map(|(e, q)| (e.clone(), q.clone())).collect();
            (zero.clone(), Series::from_terms(tail, one_unit.floor().clone())?)
        }
        Some(_) => return Err(Error::NotAOneUnit),
        None => {
            return match one_unit.floor() {
                ExtValue::Infinity => Err(Error::NotAOneUnit),
                ExtValue::Finite(f) if f.sign() == Ordering::Greater => Err(Error::NotAOneUnit),
                ExtValue::Finite(_) => Err(Error::PrecisionInsufficient),
            }
        }
    };
    mercator(&eps, &zero, p)
}

/// Restricted exponential of an infinitesimal. `zero` is an exponent
/// witness for building the constant term (an exact zero input carries no
/// exponent of its own).
pub fn rexp<E: Exponent>(eps: &Series<E>, zero: &E, p: &PrecisionPolicy) -> Result<Series<E>> {
    match eps.valuation_bound() {
        ExtValue::Infinity => {}
        ExtValue::Finite(v) if v.sign() == Ordering::Greater => {}
        ExtValue::Finite(_) => {
            return if eps.terms().is_empty() {
                Err(Error::PrecisionInsufficient)
            } else {
                Err(Error::InvalidConstruction(
                    "restricted exponential needs an infinitesimal argument".to_string(),
                ))
            }
        }
    }
    let n = p.taylor_order();
    let mut sum = Series::one_from(zero);
    let mut pow = Series::one_from(zero);
    for i in 1..=n {
        pow = pow.mul(eps)?;
        sum = sum.checked_add(&pow.scale(&(Rational::one() / factorial(i))))?;
    }
    Ok(sum.with_floor_capped(eps.valuation_bound().times(n + 1)))
}

fn residue_log(c: &Rational, mode: &ResidueLogMode) -> Result<ResidueTerm> {
    if c.is_one() {
        return Ok(ResidueTerm::Zero);
    }
    match mode {
        ResidueLogMode::Monic => Err(Error::NonMonicResidue(c.clone())),
        ResidueLogMode::Interval { width } => {
            let (lo, hi) = log_interval(c, width)?;
            Ok(ResidueTerm::LogInterval { lo, hi })
        }
    }
}

fn constant_exp(c: &Rational, mode: &ResidueLogMode) -> Result<FactorTerm> {
    if c.is_zero() {
        return Ok(FactorTerm::One);
    }
    match mode {
        ResidueLogMode::Monic => Err(Error::NonMonicResidue(c.clone())),
        ResidueLogMode::Interval { width } => {
            let (lo, hi) = exp_interval(c, width)?;
            Ok(FactorTerm::ExpInterval { lo, hi })
        }
    }
}

/// Full logarithm of a provably positive series over any cross-section.
pub fn full_log_with<CS: CrossSection>(
    cs: &CS,
    a: &Series<CS::Exp>,
    mode: &ResidueLogMode,
    p: &PrecisionPolicy,
) -> Result<LogOutput<CS::Exp>> {
    if a.try_sign()? != Ordering::Greater {
        return Err(Error::NonPositive);
    }
    let dec = a.decompose_mul()?;
    let infinite = cs.lift(&dec.exponent.negated())?;
    let residue = residue_log(&dec.residue, mode)?;
    let small = mercator(&dec.tail, &cs.zero_exp(), p)?;
    Ok(LogOutput { infinite, residue, small })
}

/// Full exponential over any cross-section; the domain is bounded by which
/// purely infinite parts the cross-section can unlift.
pub fn full_exp_with<CS: CrossSection>(
    cs: &CS,
    b: &Series<CS::Exp>,
    mode: &ResidueLogMode,
    p: &PrecisionPolicy,
) -> Result<ExpOutput<CS::Exp>> {
    let d = b.decompose_add()?;
    let g = cs.unlift(&d.infinite)?.negated();
    let monomial = if g.is_zero() {
        Series::one_from(&cs.zero_exp())
    } else {
        Series::monomial(g, Rational::one())
    };
    let factor = constant_exp(&d.constant, mode)?;
    let unit = rexp(&d.infinitesimal, &cs.zero_exp(), p)?;
    Ok(ExpOutput { monomial, factor, unit })
}

/// A logarithm on the ground field, seen only through its outputs; the
/// decomposition probes work against this interface.
pub trait Logarithm {
    fn universe(&self) -> &Universe;
    fn log(&self, a: &Series<GroupElement>) -> Result<LogOutput<GroupElement>>;
}

/// The standard assembled logarithm: ground cross-section plus residue mode
/// plus Taylor policy.
#[derive(Clone, Debug)]
pub struct LogComponents {
    section: LogCrossSection,
    mode: ResidueLogMode,
    policy: PrecisionPolicy,
}

impl LogComponents {
    pub fn new(u: &Universe, mode: ResidueLogMode, policy: PrecisionPolicy) -> Self {
        LogComponents { section: LogCrossSection::new(u), mode, policy }
    }

    pub fn section(&self) -> &LogCrossSection {
        &self.section
    }

    pub fn mode(&self) -> &ResidueLogMode {
        &self.mode
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn full_log(&self, a: &Series<GroupElement>) -> Result<LogOutput<GroupElement>> {
        full_log_with(&self.section, a, &self.mode, &self.policy)
    }

    pub fn full_exp(&self, b: &Series<GroupElement>) -> Result<ExpOutput<GroupElement>> {
        full_exp_with(&self.section, b, &self.mode, &self.policy)
    }

    /// Logarithm as one series; requires the residue channel to vanish.
    pub fn log_value(&self, a: &Series<GroupElement>) -> Result<Series<GroupElement>> {
        self.full_log(a)?.exact_total()
    }

    /// Exponential as one series; requires the factor channel to be 1.
    pub fn exp_value(&self, b: &Series<GroupElement>) -> Result<Series<GroupElement>> {
        self.full_exp(b)?.exact_total()
    }
}

impl Logarithm for LogComponents {
    fn universe(&self) -> &Universe {
        self.section.universe()
    }

    fn log(&self, a: &Series<GroupElement>) -> Result<LogOutput<GroupElement>> {
        self.full_log(a)
    }
}

/// Builds the logarithm determined by a residue mode and Taylor policy over
/// the given universe (the converse direction of the decomposition).
pub fn assemble_log(u: &Universe, mode: ResidueLogMode, policy: PrecisionPolicy) -> LogComponents {
    LogComponents::new(u, mode, policy)
}

/// Structural data recovered from a logarithm by probing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposedLog {
    /// Action induced on index points, for every point in the probe window.
    pub zeta_action: Vec<(IndexPoint, IndexPoint)>,
    /// Residue mode, with the interval width recovered exactly.
    pub mode: ResidueLogMode,
}

impl DecomposedLog {
    /// Rebuilds a logarithm from the recovered data: the recorded action
    /// must be the chain successor, the only contraction this engine
    /// realizes, and the residue mode is carried over as recovered.
    pub fn assemble(&self, u: &Universe, policy: PrecisionPolicy) -> Result<LogComponents> {
        let zeta = ZetaMap::new(u);
        for &(p, q) in &self.zeta_action {
            if zeta.apply(p)? != q {
                return Err(Error::IncompatibleLog(alloc::format!(
                    "recovered action sends ({}) to ({}), not its successor",
                    p.rendered(u),
                    q.rendered(u)
                )));
            }
        }
        Ok(LogComponents::new(u, self.mode.clone(), policy))
    }
}

/// Probes a logarithm on monomials, constants, and 1-units over the given
/// offset window; recovers its structural data and verifies the
/// compatibility laws on the probes.
pub fn decompose_log(
    l: &dyn Logarithm,
    window: core::ops::RangeInclusive<i64>,
    policy: &PrecisionPolicy,
) -> Result<DecomposedLog> {
    let u = l.universe().clone();
    let mut zeta_action = Vec::new();
    for label in 0..u.len() {
        for offset in window.clone() {
            let p = IndexPoint::new(&u, label, offset)?;
            let a = Series::monomial(GroupElement::basis(&u, p)?.negated(), Rational::one());
            let out = l.log(&a)?;
            if out.residue != ResidueTerm::Zero || !out.small.terms().is_empty() {
                return Err(Error::IncompatibleLog(alloc::format!(
                    "monomial probe t^{{-e({})}} produced residue or unit channels",
                    p.rendered(&u)
                )));
            }
            let q = match out.infinite.terms() {
                [(x, c)] if c.is_one() => match x.terms() {
                    [(q, xc)] if *xc == -Rational::one() => *q,
                    _ => {
                        return Err(Error::IncompatibleLog(alloc::format!(
                            "log of t^{{-e({})}} is not a lifted monomial",
                            p.rendered(&u)
                        )))
                    }
                },
                _ => {
                    return Err(Error::IncompatibleLog(alloc::format!(
                        "log of t^{{-e({})}} is not a single monomial",
                        p.rendered(&u)
                    )))
                }
            };
            // The induced point map must move strictly down the chain.
            if q <= p {
                return Err(Error::IncompatibleLog(alloc::format!(
                    "induced map does not contract at e({})",
                    p.rendered(&u)
                )));
            }
            zeta_action.push((p, q));
        }
    }
    // Monotone in the probe order (sorted by label then offset).
    for w in zeta_action.windows(2) {
        if w[0].0 < w[1].0 && w[0].1 >= w[1].1 {
            return Err(Error::IncompatibleLog("induced map is not strictly increasing".into()));
        }
    }

    // Residue mode: probe the constant 2.
    let two = Series::constant_in(&u, rat_i(2));
    let mode = match l.log(&two) {
        Err(Error::NonMonicResidue(_)) => ResidueLogMode::Monic,
        Err(e) => return Err(e),
        Ok(out) => {
            if !out.infinite.terms().is_empty() || !out.small.terms().is_empty() {
                return Err(Error::IncompatibleLog(
                    "constant probe leaked into series channels".into(),
                ));
            }
            match out.residue {
                ResidueTerm::LogInterval { lo, hi } => ResidueLogMode::Interval { width: hi - lo },
                ResidueTerm::Zero => {
                    return Err(Error::IncompatibleLog("log 2 reported as exactly zero".into()))
                }
            }
        }
    };

    // Unit probe: the unit channel alone must answer, with the right lead.
    let e00 = GroupElement::basis(&u, IndexPoint::new(&u, 0, 0)?)?;
    let eps = Series::monomial(e00.clone(), Rational::one());
    let one_plus = Series::constant_in(&u, rat_i(1)).checked_add(&eps)?;
    let out = l.log(&one_plus)?;
    if !out.infinite.terms().is_empty() || out.residue != ResidueTerm::Zero {
        return Err(Error::IncompatibleLog("unit probe leaked outside the unit channel".into()));
    }
    match out.small.terms().first() {
        Some((x, c)) if *x == e00 && c.is_one() => {}
        _ => {
            return Err(Error::IncompatibleLog(
                "unit channel does not agree with the Mercator lead".into(),
            ))
        }
    }

    // Multiplicativity spot check: log(a * u1) = log(a) + log(u1) in band.
    let a = Series::monomial(e00.negated(), Rational::one());
    let prod = a.mul(&one_plus)?;
    let lhs = l.log(&prod)?;
    let rhs = l.log(&a)?.in_band()?.checked_add(&out.in_band()?)?;
    if lhs.residue != ResidueTerm::Zero || !lhs.in_band()?.indistinguishable(&rhs)? {
        return Err(Error::IncompatibleLog("log is not multiplicative on probes".into()));
    }
    let _ = policy;
    Ok(DecomposedLog { zeta_action, mode })
}

/// Group contraction induced by a logarithm: the valuation of `log(t^g)`
/// for negative `g`, which depends only on the archimedean class of `g`.
pub fn chi_from_log(l: &dyn Logarithm, g: &GroupElement) -> Result<GroupElement> {
    if g.sign() != Ordering::Less {
        return Err(Error::NonNegative);
    }
    let a = Series::monomial(g.clone(), Rational::one());
    let out = l.log(&a)?;
    let (x, _) = out.infinite.leading()?;
    Ok(x.clone())
}

/// Point map recovered from a group contraction: `chi(-e_p)` must be a
/// negated basis element, whose index is the image of `p`.
pub fn zeta_from_chi<F>(u: &Universe, chi: F, p: IndexPoint) -> Result<IndexPoint>
where
    F: Fn(&GroupElement) -> Result<GroupElement>,
{
    let c = chi(&GroupElement::basis(u, p)?.negated())?;
    match c.terms() {
        [(q, coeff)] if *coeff == -Rational::one() => Ok(*q),
        _ => Err(Error::NotInImage(alloc::format!("{c}"))),
    }
}

/// The strengthened valuation law on one sample: a positive infinite `a`
/// must satisfy `v(a) < v(log a)`.
pub fn check_strong(l: &dyn Logarithm, a: &Series<GroupElement>) -> Result<bool> {
    if a.try_sign()? != Ordering::Greater {
        return Err(Error::NonPositive);
    }
    let va = a.valuation()?;
    match &va {
        ExtValue::Finite(g) if g.sign() == Ordering::Less => {}
        _ => {
            return Err(Error::InvalidConstruction(
                "strengthened-law check needs a positive infinite input".to_string(),
            ))
        }
    }
    let out = l.log(a)?;
    // The infinite channel alone fixes v(log a): the other channels sit at
    // valuation >= 0.
    let vla = out.infinite.valuation()?;
    Ok(va < vla)
}

/// Report of the unit-channel fixed-point law on one sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitLawReport {
    /// `v(b - log(1 + b)) > v(b)` was certified.
    pub strict: bool,
    /// With Taylor order >= 2: whether the gap valuation equals `2 v(b)`
    /// exactly (absent at order 1, where the gap is below the floor).
    pub doubled: Option<bool>,
}

/// The unit-channel fixed-point law: for infinitesimal nonzero `b`, the gap
/// `b - log(1 + b)` sits strictly above `b`, at exactly `2 v(b)` in
/// characteristic zero.
pub fn check_unit_law(l: &dyn Logarithm, b: &Series<GroupElement>) -> Result<UnitLawReport> {
    let (vb, _) = b.leading()?;
    let vb = vb.clone();
    if vb.sign() != Ordering::Greater {
        return Err(Error::InvalidConstruction(
            "unit-law check needs a nonzero infinitesimal input".to_string(),
        ));
    }
    let one_plus = Series::constant_in(l.universe(), rat_i(1)).checked_add(b)?;
    let out = l.log(&one_plus)?;
    if out.residue != ResidueTerm::Zero {
        return Err(Error::IncompatibleLog("1-unit produced a residue term".into()));
    }
    let gap = b.checked_sub(&out.in_band()?)?;
    let bound = gap.valuation_bound();
    let strict = ExtValue::Finite(vb.clone()) < bound;
    let doubled = gap.terms().first().map(|(g, _)| *g == vb.plus(&vb));
    Ok(UnitLawReport { strict, doubled })
}

/// The growth law on one sample: a positive infinite `a` exceeds `n log a`.
/// In interval mode the residue enclosure decides the comparison; a window
/// too wide to decide reports insufficient precision.
pub fn check_growth(l: &dyn Logarithm, a: &Series<GroupElement>, n: u32) -> Result<bool> {
    if a.try_sign()? != Ordering::Greater {
        return Err(Error::NonPositive);
    }
    let out = l.log(a)?;
    let scaled = out.in_band()?.scale(&rat_i(n as i64));
    let diff = a.checked_sub(&scaled)?;
    match &out.residue {
        ResidueTerm::Zero => Ok(diff.try_sign()? == Ordering::Greater),
        ResidueTerm::LogInterval { lo, hi } => {
            let shift_lo = Series::constant_in(l.universe(), rat_i(n as i64) * lo);
            let shift_hi = Series::constant_in(l.universe(), rat_i(n as i64) * hi);
            let s_lo = diff.checked_sub(&shift_lo)?.try_sign()?;
            let s_hi = diff.checked_sub(&shift_hi)?.try_sign()?;
            if s_lo == s_hi {
                Ok(s_lo == Ordering::Greater)
            } else {
                Err(Error::PrecisionInsufficient)
            }
        }
    }
}

/// Iterates `log` as a series map; requires the residue channel to vanish
/// at every step.
pub fn iterate_log_value(
    l: &dyn Logarithm,
    a: &Series<GroupElement>,
    n: u32,
) -> Result<Series<GroupElement>> {
    let mut x = a.clone();
    for _ in 0..n {
        x = l.log(&x)?.exact_total()?;
    }
    Ok(x)
}

/// Class-level log equivalence of two positive infinite elements: their
/// valuations share an archimedean label.
pub fn log_equiv_class(a: &Series<GroupElement>, b: &Series<GroupElement>) -> Result<bool> {
    let class_of = |x: &Series<GroupElement>| -> Result<usize> {
        if x.try_sign()? != Ordering::Greater {
            return Err(Error::NonPositive);
        }
        let vx = match x.valuation()? {
            ExtValue::Finite(v) => v,
            ExtValue::Infinity => return Err(Error::ZeroArgument),
        };
        if vx.sign() != Ordering::Less {
            return Err(Error::InvalidConstruction(
                "log equivalence needs infinite elements".into(),
            ));
        }
        Ok(vx.arch_class()?.label)
    };
    Ok(class_of(a)? == class_of(b)?)
}

/// Searches for a shared iteration count `n <= bound` with `log^n a <= b`
/// and `log^n b <= a`, witnessing that the two elements lie in the same
/// log equivalence class. Both must be positive infinite and stay in the
/// log domain along the way.
pub fn log_equiv_witness(
    l: &dyn Logarithm,
    a: &Series<GroupElement>,
    b: &Series<GroupElement>,
    bound: u32,
) -> Result<Option<u32>> {
    for x in [a, b] {
        if x.try_sign()? != Ordering::Greater {
            return Err(Error::NonPositive);
        }
    }
    let mut la = a.clone();
    let mut lb = b.clone();
    for n in 0..=bound {
        let a_below = la.try_cmp(b)? != Ordering::Greater;
        let b_below = lb.try_cmp(a)? != Ordering::Greater;
        if a_below && b_below {
            return Ok(Some(n));
        }
        if n < bound {
            la = l.log(&la)?.exact_total()?;
            lb = l.log(&lb)?.exact_total()?;
        }
    }
    Ok(None)
}

/// Exact rational enclosure of `ln c` for positive rational `c`, returned
/// with width exactly `width` so the width itself round-trips through
/// decomposition probes.
pub fn log_interval(c: &Rational, width: &Rational) -> Result<(Rational, Rational)> {
    if !c.is_positive() {
        return Err(Error::NonPositive);
    }
    if !width.is_positive() {
        return Err(Error::InvalidConstruction("interval width must be positive".to_string()));
    }
    let half = width / rat_i(2);
    let (lo, hi) = if *c >= Rational::one() {
        ln_bounds_at_least_one(c, &half)
    } else {
        let (lo, hi) = ln_bounds_at_least_one(&(Rational::one() / c), &half);
        (-hi, -lo)
    };
    let mid = (lo + hi) / rat_i(2);
    Ok((&mid - &half, mid + half))
}

/// Tight bounds on `ln c` for `c >= 1`, gap at most `budget`: halve into
/// `[1, 2)`, bound `ln 2` and the remainder by the inverse hyperbolic
/// tangent series.
fn ln_bounds_at_least_one(c: &Rational, budget: &Rational) -> (Rational, Rational) {
    let two = rat_i(2);
    let mut m = c.clone();
    let mut k: i64 = 0;
    while m >= two {
        m /= &two;
        k += 1;
    }
    let (mut lo, mut hi) = atanh_ln_bounds(&m, &(budget / rat_i(2)));
    if k > 0 {
        let (l2, h2) = atanh_ln_bounds(&two, &(budget / rat_i(2 * k)));
        lo += rat_i(k) * l2;
        hi += rat_i(k) * h2;
    }
    (lo, hi)
}

/// Bounds on `ln x` for `x` in `[1, 2]` via `2 * atanh((x-1)/(x+1))`; the
/// argument stays at most 1/3, so terms shrink ninefold.
fn atanh_ln_bounds(x: &Rational, budget: &Rational) -> (Rational, Rational) {
    let z = (x - Rational::one()) / (x + Rational::one());
    if z.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = Rational::zero();
    let mut odd: i64 = 1;
    loop {
        sum += &term / rat_i(odd);
        // Remaining sum is below term * z^2 / ((odd + 2) * (1 - z^2)).
        let tail = &term * &z2 / (rat_i(odd + 2) * (Rational::one() - &z2));
        if rat_i(2) * &tail <= *budget {
            return (rat_i(2) * &sum, rat_i(2) * sum + rat_i(2) * tail);
        }
        term *= &z2;
        odd += 2;
    }
}

/// Exact rational enclosure of `exp c`, width exactly `width`.
pub fn exp_interval(c: &Rational, width: &Rational) -> Result<(Rational, Rational)> {
    if !width.is_positive() {
        return Err(Error::InvalidConstruction("interval width must be positive".to_string()));
    }
    let half = width / rat_i(2);
    let (lo, hi) = if c.is_negative() {
        // exp(c) = 1 / exp(-c); bounds of exp(-c) exceed 1, so the
        // reciprocal gap is no wider than the original.
        let (lo, hi) = exp_bounds_nonneg(&-c, &half);
        (Rational::one() / hi, Rational::one() / lo)
    } else {
        exp_bounds_nonneg(c, &half)
    };
    let mid = (lo + hi) / rat_i(2);
    Ok((&mid - &half, mid + half))
}

/// Tight Taylor bounds on `exp c` for `c >= 0`, gap at most `budget`.
fn exp_bounds_nonneg(c: &Rational, budget: &Rational) -> (Rational, Rational) {
    let mut term = Rational::one();
    let mut sum = Rational::one();
    let mut i: i64 = 1;
    loop {
        term = term * c / rat_i(i);
        sum += &term;
        // Remaining sum is a geometric tail once c < i + 1.
        let ratio = c / rat_i(i + 1);
        if ratio < Rational::one() {
            let tail = &term * &ratio / (Rational::one() - &ratio);
            if tail <= *budget {
                return (sum.clone(), sum + tail);
            }
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order_type::OrderTypeSpec;

    fn u2() -> Universe {
        OrderTypeSpec::new(["a", "b"]).unwrap().into_universe()
    }

    fn standard_log(u: &Universe) -> LogComponents {
        LogComponents::new(u, ResidueLogMode::Monic, PrecisionPolicy::default())
    }

    fn s(u: &Universe, src: &str) -> Series<GroupElement> {
        Series::parse(u, src).unwrap()
    }

    #[test]
    fn log_of_big_monomial_steps_the_index() {
        let u = u2();
        let l = standard_log(&u);
        let a = s(&u, "t^{-e(a,0)} (exact)");
        let out = l.full_log(&a).unwrap();
        assert_eq!(out.exact_total().unwrap(), s(&u, "t^{-e(a,1)} (exact)"));
    }

    #[test]
    fn rexp_frozen_quadratic() {
        let u = u2();
        let eps = s(&u, "t^{e(a,0)} (exact)");
        let p = PrecisionPolicy::new(2).unwrap();
        let got = rexp(&eps, &GroupElement::zero(&u), &p).unwrap();
        assert_eq!(got, s(&u, "1 + t^{e(a,0)} + 1/2*t^{2*e(a,0)} (mod t^{3*e(a,0)})"));
    }

    #[test]
    fn rlog_inverts_rexp_to_precision() {
        let u = u2();
        let p = PrecisionPolicy::default();
        let eps = s(&u, "t^{e(b,0)} - 2*t^{e(b,1)} (exact)");
        let unit = rexp(&eps, &GroupElement::zero(&u), &p).unwrap();
        let back = rlog(&unit, &p).unwrap();
        assert!(back.indistinguishable(&eps).unwrap());
    }

    #[test]
    fn full_log_splits_channels() {
        let u = u2();
        let l = standard_log(&u);
        let a = s(&u, "t^{-e(a,0)} + t^{e(b,0)} (exact)");
        let out = l.full_log(&a).unwrap();
        assert_eq!(out.infinite, s(&u, "t^{-e(a,1)} (exact)"));
        assert_eq!(out.residue, ResidueTerm::Zero);
        // Unit tail is t^{e(a,0) + e(b,0)}; Mercator lead matches.
        assert_eq!(
            out.small.terms().first().map(|(e, q)| (alloc::format!("{e}"), q.clone())),
            Some(("e(a,0) + e(b,0)".to_string(), rat_i(1)))
        );
    }

    #[test]
    fn monic_mode_rejects_other_residues() {
        let u = u2();
        let l = standard_log(&u);
        let a = s(&u, "2*t^{-e(a,0)} (exact)");
        assert_eq!(l.full_log(&a).unwrap_err(), Error::NonMonicResidue(rat_i(2)));
    }

    #[test]
    fn interval_mode_carries_residue_out_of_band() {
        let u = u2();
        let w = rat(1, 1000);
        let l = LogComponents::new(
            &u,
            ResidueLogMode::Interval { width: w.clone() },
            PrecisionPolicy::default(),
        );
        let a = s(&u, "2*t^{-e(a,0)} (exact)");
        let out = l.full_log(&a).unwrap();
        match &out.residue {
            ResidueTerm::LogInterval { lo, hi } => {
                assert_eq!(hi - lo, w);
                // ln 2 = 0.6931...: check the enclosure against coarse bounds.
                assert!(*lo > rat(693, 1000) - &w);
                assert!(*hi < rat(694, 1000) + &w);
            }
            other => panic!("expected interval, got {other:?}"),
        }
        assert_eq!(out.exact_total().unwrap_err(), Error::InexactConstant);
    }

    #[test]
    fn full_exp_round_trips_full_log() {
        let u = u2();
        let l = standard_log(&u);
        let a = s(&u, "t^{-e(a,0)} + 1/2*t^{e(b,0)} (exact)");
        let b = l.log_value(&a).unwrap();
        let back = l.exp_value(&b).unwrap();
        assert!(back.indistinguishable(&a).unwrap());
    }

    #[test]
    fn exp_rejects_unliftable_infinite_parts() {
        let u = u2();
        let l = standard_log(&u);
        // Exponent -(1/2)e(a,0) - (1/2)e(b,0) is not a negated basis element.
        let b = s(&u, "t^{-1/2*e(a,0) - 1/2*e(b,0)} (exact)");
        assert!(matches!(l.full_exp(&b).unwrap_err(), Error::NotInImage(_)));
        // Its double integral sibling with a plain basis exponent lifts fine.
        let ok = s(&u, "t^{-e(a,0)} (exact)");
        assert!(l.full_exp(&ok).is_ok());
    }

    #[test]
    fn chi_from_log_matches_group_contraction() {
        let u = u2();
        let l = standard_log(&u);
        let z = ZetaMap::new(&u);
        let g = GroupElement::parse(&u, "-7*e(a,0) + e(b,2)").unwrap();
        let via_log = chi_from_log(&l, &g).unwrap();
        assert_eq!(via_log, GroupElement::parse(&u, "-e(a,1)").unwrap());
        assert_eq!(via_log, z.chi(&g).unwrap());
        let p = zeta_from_chi(&u, |x| z.chi(x), IndexPoint::new(&u, 1, 4).unwrap()).unwrap();
        assert_eq!(p, IndexPoint::new(&u, 1, 5).unwrap());
    }

    #[test]
    fn laws_hold_on_a_sample() {
        let u = u2();
        let l = standard_log(&u);
        let a = s(&u, "t^{-e(a,0)} + t^{-e(b,3)} (exact)");
        assert!(check_strong(&l, &a).unwrap());
        for n in 0..6 {
            assert!(check_growth(&l, &a, n).unwrap());
        }
        let b = s(&u, "1/2*t^{e(b,0)} (exact)");
        let rep = check_unit_law(&l, &b).unwrap();
        assert!(rep.strict);
        assert_eq!(rep.doubled, Some(true));
    }

    #[test]
    fn decompose_recovers_assembled_structure() {
        let u = u2();
        let p = PrecisionPolicy::default();
        for mode in [ResidueLogMode::Monic, ResidueLogMode::Interval { width: rat(1, 64) }] {
            let l = assemble_log(&u, mode.clone(), p.clone());
            let d = decompose_log(&l, -2..=2, &p).unwrap();
            assert_eq!(d.mode, mode);
            for (from, to) in d.zeta_action {
                assert_eq!(to, IndexPoint::new(&u, from.label, from.offset + 1).unwrap());
            }
        }
    }

    #[test]
    fn decompose_rejects_non_contracting_maps() {
        struct Shifted(LogComponents);
        impl Logarithm for Shifted {
            fn universe(&self) -> &Universe {
                self.0.universe()
            }
            fn log(&self, a: &Series<GroupElement>) -> Result<LogOutput<GroupElement>> {
                // Sabotage: negate the unit channel, breaking multiplicativity
                // against the Mercator lead.
                let out = self.0.log(a)?;
                Ok(LogOutput {
                    infinite: out.infinite,
                    residue: out.residue,
                    small: out.small.negated(),
                })
            }
        }
        let u = u2();
        let l = Shifted(standard_log(&u));
        let p = PrecisionPolicy::default();
        assert!(matches!(decompose_log(&l, 0..=1, &p).unwrap_err(), Error::IncompatibleLog(_)));
    }

    #[test]
    fn interval_endpoints_have_exact_width() {
        let w = rat(1, 1 << 20);
        let (lo, hi) = log_interval(&rat(7, 5), &w).unwrap();
        assert_eq!(&hi - &lo, w);
        // ln(1.4) = 0.33647...
        assert!(lo < rat(3365, 10000) && hi > rat(3364, 10000));
        let (lo, hi) = log_interval(&rat(5, 7), &w).unwrap();
        assert!(lo < Rational::zero() && hi < Rational::zero());
        let (lo, hi) = exp_interval(&rat(-3, 2), &w).unwrap();
        assert_eq!(&hi - &lo, w);
        // exp(-1.5) = 0.22313...
        assert!(lo < rat(2232, 10000) && hi > rat(2231, 10000));
        let (lo, hi) = exp_interval(&rat_i(3), &w).unwrap();
        // exp(3) = 20.0855...
        assert!(lo < rat(200856, 10000) && hi > rat(200855, 10000));
    }
}
