//! Hahn series with explicit precision floors.
//!
//! A series is a finite sorted list of (exponent, coefficient) terms together
//! with a *floor*: either `Infinity` (the stored terms are the whole value)
//! or a finite exponent `f` meaning the value is known only modulo terms of
//! exponent at least `f`. Every operation propagates floors soundly, so a
//! stored term is always a true term of the value. Queries that the stored
//! data cannot certify (sign of an empty inexact series, comparisons decided
//! below a floor) fail loudly instead of guessing.
//!
//! The exponent type is generic so the same arithmetic serves the ground
//! field and every stage of the exponential closure tower.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::order_type::Universe;
use crate::rational::{merge_add, normalize_terms, sign_of, Rational};
use crate::text::Cursor;

/// Exponent domain for series: an ordered abelian group element.
///
/// Arithmetic methods may assume compatibility (checked by callers through
/// [`Exponent::compatible`]); mixing incompatible exponents is a caller bug.
pub trait Exponent: Clone + Ord + fmt::Debug {
    fn plus(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    /// Sign against the group zero.
    fn sign(&self) -> Ordering;
    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    /// True when the two exponents may appear in one series.
    fn compatible(&self, other: &Self) -> bool;
}

impl Exponent for GroupElement {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn negated(&self) -> Self {
        GroupElement::negated(self)
    }
    fn sign(&self) -> Ordering {
        GroupElement::sign(self)
    }
    fn compatible(&self, other: &Self) -> bool {
        crate::order_type::same_universe(self.universe(), other.universe())
    }
}

/// An exponent extended with a top element, used for valuations and floors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtValue<E> {
    Finite(E),
    Infinity,
}

impl<E: Exponent> ExtValue<E> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValue::Infinity)
    }

    pub fn finite(&self) -> Option<&E> {
        match self {
            ExtValue::Finite(e) => Some(e),
            ExtValue::Infinity => None,
        }
    }

    /// Adds a finite exponent; infinity absorbs.
    pub fn plus_exp(&self, e: &E) -> Self {
        match self {
            ExtValue::Finite(f) => ExtValue::Finite(f.plus(e)),
            ExtValue::Infinity => ExtValue::Infinity,
        }
    }

    /// Sum of two extended values; infinity absorbs.
    pub fn plus(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a.plus(b)),
            _ => ExtValue::Infinity,
        }
    }

    /// Minimum of two extended values.
    pub fn min_with(self, other: Self) -> Self {
        match (&self, &other) {
            (ExtValue::Infinity, _) => other,
            (_, ExtValue::Infinity) => self,
            (ExtValue::Finite(a), ExtValue::Finite(b)) => {
                if a <= b {
                    self
                } else {
                    other
                }
            }
        }
    }

    /// `n`-fold sum of a finite value with itself; infinity absorbs.
    pub fn times(&self, n: u32) -> Self {
        match self {
            ExtValue::Infinity => ExtValue::Infinity,
            ExtValue::Finite(e) => {
                let mut acc = e.clone();
                for _ in 1..n {
                    acc = acc.plus(e);
                }
                if n == 0 {
                    ExtValue::Finite(e.minus(e))
                } else {
                    ExtValue::Finite(acc)
                }
            }
        }
    }
}

/// Hahn series: sorted nonzero terms plus a precision floor.
///
/// Structural equality ([`PartialEq`]) compares stored data, including the
/// floor; it says two descriptions coincide, not that two values are provably
/// equal. For value comparisons use [`Series::try_cmp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<E: Exponent> {
    terms: Vec<(E, Rational)>,
    floor: ExtValue<E>,
}

impl<E: Exponent> Series<E> {
    /// The exact zero series.
    pub fn exact_zero() -> Self {
        Series { terms: Vec::new(), floor: ExtValue::Infinity }
    }

    /// A series with no known terms below the given floor.
    pub fn unknown_below(floor: E) -> Self {
        Series { terms: Vec::new(), floor: ExtValue::Finite(floor) }
    }

    /// The exact monomial `q * t^e` (exact zero when `q = 0`).
    pub fn monomial(e: E, q: Rational) -> Self {
        if q.is_zero() {
            return Series::exact_zero();
        }
        Series { terms: alloc::vec![(e, q)], floor: ExtValue::Infinity }
    }

    /// The exact constant `q`, built from any exponent witness of the group.
    pub fn constant_from(witness: &E, q: Rational) -> Self {
        Series::monomial(witness.minus(witness), q)
    }

    /// The exact constant 1.
    pub fn one_from(witness: &E) -> Self {
        Series::constant_from(witness, Rational::one())
    }

    /// Builds a series from arbitrary terms and a floor: sorts, merges,
    /// drops zeros, and truncates stored terms at the floor.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (E, Rational)>,
        floor: ExtValue<E>,
    ) -> Result<Self> {
        let terms: Vec<(E, Rational)> = terms.into_iter().collect();
        let mut probe: Option<&E> = terms.first().map(|(e, _)| e);
        if probe.is_none() {
            probe = floor.finite();
        }
        if let Some(p) = probe {
            for (e, _) in &terms {
                if !p.compatible(e) {
                    return Err(Error::MismatchedUniverse);
                }
            }
            if let Some(f) = floor.finite() {
                if !p.compatible(f) {
                    return Err(Error::MismatchedUniverse);
                }
            }
        }
        Ok(Series { terms: normalize_terms(terms), floor }.truncated())
    }

    /// Drops stored terms at or above the floor (restores the invariant).
    fn truncated(mut self) -> Self {
        if let ExtValue::Finite(f) = &self.floor {
            self.terms.retain(|(e, _)| e < f);
        }
        self
    }

    pub fn terms(&self) -> &[(E, Rational)] {
        &self.terms
    }

    pub fn floor(&self) -> &ExtValue<E> {
        &self.floor
    }

    /// True when the series is the exact zero.
    pub fn is_known_zero(&self) -> bool {
        self.terms.is_empty() && self.floor.is_infinite()
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_infinite()
    }

    /// Any exponent stored in the series or its floor, for constructing
    /// constants in the same group.
    pub fn exponent_witness(&self) -> Option<&E> {
        self.terms.first().map(|(e, _)| e).or_else(|| self.floor.finite())
    }

    /// Valuation of the value: minimal stored exponent, infinity for the
    /// exact zero. Fails when an empty stored part sits under a finite floor.
    pub fn valuation(&self) -> Result<ExtValue<E>> {
        match (self.terms.first(), &self.floor) {
            (Some((e, _)), _) => Ok(ExtValue::Finite(e.clone())),
            (None, ExtValue::Infinity) => Ok(ExtValue::Infinity),
            (None, ExtValue::Finite(_)) => Err(Error::IndeterminateValuation),
        }
    }

    /// Valuation bound used by floor calculus: the valuation when stored
    /// terms exist, otherwise the floor itself (a sound lower bound).
    pub(crate) fn valuation_bound(&self) -> ExtValue<E> {
        match self.terms.first() {
            Some((e, _)) => ExtValue::Finite(e.clone()),
            None => self.floor.clone(),
        }
    }

    /// Leading (minimal-exponent) term of a provably nonzero series.
    pub fn leading(&self) -> Result<(&E, &Rational)> {
        match (self.terms.first(), &self.floor) {
            (Some((e, q)), _) => Ok((e, q)),
            (None, ExtValue::Infinity) => Err(Error::ZeroArgument),
            (None, ExtValue::Finite(_)) => Err(Error::IndeterminateValuation),
        }
    }

    /// Sign of the value: the sign of the leading coefficient. Exact zero
    /// compares equal; an empty inexact series cannot be signed.
    pub fn try_sign(&self) -> Result<Ordering> {
        match (self.terms.first(), &self.floor) {
            (Some((_, q)), _) => Ok(sign_of(q)),
            (None, ExtValue::Infinity) => Ok(Ordering::Equal),
            (None, ExtValue::Finite(_)) => Err(Error::PrecisionInsufficient),
        }
    }

    /// Order comparison of values; fails when the floors hide the deciding
    /// term (two identical inexact descriptions are not provably equal).
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        self.checked_sub(other)?.try_sign()
    }

    /// True when the two values agree on every term above the combined
    /// floor: the strongest equality the stored precision can certify.
    pub fn indistinguishable(&self, other: &Self) -> Result<bool> {
        Ok(self.checked_sub(other)?.terms().is_empty())
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.exponent_witness(), other.exponent_witness()) {
            if !a.compatible(b) {
                return Err(Error::MismatchedUniverse);
            }
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let floor = self.floor.clone().min_with(other.floor.clone());
        Ok(Series { terms: merge_add(&self.terms, &other.terms), floor }.truncated())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.negated())
    }

    pub fn negated(&self) -> Self {
        Series {
            terms: self.terms.iter().map(|(e, q)| (e.clone(), -q)).collect(),
            floor: self.floor.clone(),
        }
    }

    /// Scalar multiple; the floor is unchanged (scaling by zero leaves an
    /// empty series at the same precision).
    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Series { terms: Vec::new(), floor: self.floor.clone() };
        }
        Series {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect(),
            floor: self.floor.clone(),
        }
    }

    /// Product. The floor is the best sound bound from the stored parts:
    /// with `a = A + O(t^fa)` and `b = B + O(t^fb)` the unknown part of the
    /// product lies in `O(t^m)` for `m = min(v(A)+fb, fa+v(B), fa+fb)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let mut floor = self.floor.clone().plus(&other.floor);
        if !self.terms.is_empty() {
            floor = floor.min_with(self.valuation_bound().plus(&other.floor));
        }
        if !other.terms.is_empty() {
            floor = floor.min_with(self.floor.clone().plus(&other.valuation_bound()));
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, qa) in &self.terms {
            for (eb, qb) in &other.terms {
                raw.push((ea.plus(eb), qa * qb));
            }
        }
        Ok(Series { terms: normalize_terms(raw), floor }.truncated())
    }

    /// Adds `by` to every exponent and to the floor.
    pub fn shift(&self, by: &E) -> Result<Self> {
        if let Some(w) = self.exponent_witness() {
            if !w.compatible(by) {
                return Err(Error::MismatchedUniverse);
            }
        }
        Ok(Series {
            terms: self.terms.iter().map(|(e, q)| (e.plus(by), q.clone())).collect(),
            floor: self.floor.plus_exp(by),
        })
    }

    /// Forgets information: lowers the floor to at most `f` and truncates.
    pub fn with_floor_capped(&self, f: ExtValue<E>) -> Self {
        Series { terms: self.terms.clone(), floor: self.floor.clone().min_with(f) }.truncated()
    }

    /// Multiplicative decomposition `a = residue * t^g * (1 + tail)` with
    /// `v(tail) > 0`; requires a provably positive input.
    pub fn decompose_mul(&self) -> Result<MulDecomposition<E>> {
        if self.try_sign()? != Ordering::Greater {
            return Err(Error::NonPositive);
        }
        self.leading_factorization()
    }

    /// Sign-agnostic form of the multiplicative decomposition, for inversion.
    fn leading_factorization(&self) -> Result<MulDecomposition<E>> {
        let (g, c) = self.leading()?;
        let (g, c) = (g.clone(), c.clone());
        let inv_c = Rational::one() / &c;
        let tail_terms: Vec<(E, Rational)> =
            self.terms[1..].iter().map(|(e, q)| (e.minus(&g), q * &inv_c)).collect();
        let tail = Series { terms: tail_terms, floor: self.floor.plus_exp(&g.negated()) };
        Ok(MulDecomposition { exponent: g, residue: c, tail })
    }

    /// Additive decomposition into purely infinite part (exponents < 0),
    /// constant term, and infinitesimal part (exponents > 0). Requires the
    /// floor to be strictly positive, so the first two parts are exact.
    pub fn decompose_add(&self) -> Result<AddDecomposition<E>> {
        match &self.floor {
            ExtValue::Infinity => {}
            ExtValue::Finite(f) if f.sign() == Ordering::Greater => {}
            ExtValue::Finite(_) => return Err(Error::PrecisionInsufficient),
        }
        let mut infinite = Vec::new();
        let mut constant = Rational::zero();
        let mut small = Vec::new();
        for (e, q) in &self.terms {
            match e.sign() {
                Ordering::Less => infinite.push((e.clone(), q.clone())),
                Ordering::Equal => constant = q.clone(),
                Ordering::Greater => small.push((e.clone(), q.clone())),
            }
        }
        Ok(AddDecomposition {
            infinite: Series { terms: infinite, floor: ExtValue::Infinity },
            constant,
            infinitesimal: Series { terms: small, floor: self.floor.clone() },
        })
    }

    /// Multiplicative inverse via the geometric series, summed to the given
    /// order. The floor records both the input precision and the truncation
    /// error `O(t^((order+1) * v(tail)))`.
    pub fn invert(&self, order: u32) -> Result<Self> {
        let dec = self.leading_factorization()?;
        let unit_inv = one_unit_inverse(&dec.tail, &dec.exponent, order)?;
        let inv_c = Rational::one() / &dec.residue;
        unit_inv.shift(&dec.exponent.negated()).map(|s| s.scale(&inv_c))
    }

    /// Integer power; negative exponents go through [`Series::invert`].
    pub fn pow(&self, n: i32, order: u32) -> Result<Self> {
        if n == 0 {
            // A zero power needs a provably nonzero base to return 1.
            let (g, _) = self.leading()?;
            return Ok(Series::one_from(&g.clone()));
        }
        let base = if n < 0 { self.invert(order)? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..n.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }
}

/// `(1 + tail)^{-1}` truncated after `order` geometric terms. `anchor` is an
/// exponent witness for building the constant 1.
fn one_unit_inverse<E: Exponent>(tail: &Series<E>, anchor: &E, order: u32) -> Result<Series<E>> {
    let one = Series::one_from(anchor);
    let neg = tail.negated();
    let mut sum = one.clone();
    let mut pow = one;
    for _ in 1..=order {
        pow = pow.mul(&neg)?;
        sum = sum.checked_add(&pow)?;
    }
    // Geometric tail beyond the truncation: O(t^((order+1) * v(tail))).
    let cap = tail.valuation_bound().times(order + 1);
    Ok(sum.with_floor_capped(cap))
}

/// `a = residue * t^exponent * (1 + tail)`.
#[derive(Clone, Debug)]
pub struct MulDecomposition<E: Exponent> {
    pub exponent: E,
    pub residue: Rational,
    pub tail: Series<E>,
}

/// `a = infinite + constant + infinitesimal`.
#[derive(Clone, Debug)]
pub struct AddDecomposition<E: Exponent> {
    pub infinite: Series<E>,
    pub constant: Rational,
    pub infinitesimal: Series<E>,
}

/// Renders a series with a caller-chosen exponent renderer; shared by the
/// ground grammar and the tower grammar.
pub(crate) fn render_series<E: Exponent>(
    f: &mut fmt::Formatter<'_>,
    s: &Series<E>,
    render_exp: &dyn Fn(&E) -> String,
) -> fmt::Result {
    if s.terms.is_empty() {
        write!(f, "0")?;
    }
    for (i, (e, q)) in s.terms.iter().enumerate() {
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
        if e.is_zero() {
            write!(f, "{a}")?;
        } else if a.is_one() {
            write!(f, "t^{{{}}}", render_exp(e))?;
        } else {
            write!(f, "{a}*t^{{{}}}", render_exp(e))?;
        }
    }
    match &s.floor {
        ExtValue::Infinity => write!(f, " (exact)"),
        ExtValue::Finite(g) => write!(f, " (mod t^{{{}}})", render_exp(g)),
    }
}

/// Parses a series with a caller-chosen exponent sub-parser. `zero_exp`
/// builds the exponent of a constant term. A missing floor marker means
/// exact.
pub(crate) fn parse_series_with<E: Exponent>(
    cur: &mut Cursor,
    parse_exp: &dyn Fn(&mut Cursor) -> Result<E>,
    zero_exp: &dyn Fn() -> Result<E>,
) -> Result<Series<E>> {
    cur.skip_ws();
    let mut terms: Vec<(E, Rational)> = Vec::new();
    if cur.eat('0') {
        // Bare zero: no terms.
    } else {
        let mut negate = false;
        loop {
            cur.skip_ws();
            let mut coeff = if negate { -Rational::one() } else { Rational::one() };
            let mut have_coeff = false;
            if cur.eat('-') {
                coeff = -coeff;
                cur.skip_ws();
            }
            if matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                coeff *= cur.rational()?;
                have_coeff = true;
                cur.skip_ws();
            }
            if have_coeff && !cur.eat('*') {
                // A bare rational is a constant term.
                terms.push((zero_exp()?, coeff));
            } else {
                cur.skip_ws();
                cur.expect('t')?;
                cur.expect('^')?;
                cur.expect('{')?;
                let e = parse_exp(cur)?;
                cur.skip_ws();
                cur.expect('}')?;
                terms.push((e, coeff));
            }
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
    cur.skip_ws();
    let floor = if cur.eat('(') {
        if cur.eat_str("exact") {
            cur.skip_ws();
            cur.expect(')')?;
            ExtValue::Infinity
        } else if cur.eat_str("mod") {
            cur.skip_ws();
            cur.expect('t')?;
            cur.expect('^')?;
            cur.expect('{')?;
            let g = parse_exp(cur)?;
            cur.skip_ws();
            cur.expect('}')?;
            cur.skip_ws();
            cur.expect(')')?;
            ExtValue::Finite(g)
        } else {
            return cur.err("expected 'exact' or 'mod'");
        }
    } else {
        ExtValue::Infinity
    };
    Series::from_terms(terms, floor)
}

impl fmt::Display for Series<GroupElement> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_series(f, self, &|e: &GroupElement| alloc::format!("{e}"))
    }
}

impl Series<GroupElement> {
    /// Parses the ground grammar `q*t^{<group>} + ... (exact|mod t^{g})`.
    pub fn parse(u: &Universe, s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let got = parse_series_with(
            &mut cur,
            &|c: &mut Cursor| crate::group::parse_body(u, c),
            &|| Ok(GroupElement::zero(u)),
        )?;
        cur.expect_end()?;
        Ok(got)
    }

    /// The exact constant `q` in the given universe.
    pub fn constant_in(u: &Universe, q: Rational) -> Self {
        Series::monomial(GroupElement::zero(u), q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::IndexPoint;
    use crate::order_type::OrderTypeSpec;
    use crate::rational::{rat, rat_i};

    fn u2() -> Universe {
        OrderTypeSpec::new(["a", "b"]).unwrap().into_universe()
    }

    fn e(u: &Universe, l: usize, n: i64) -> GroupElement {
        GroupElement::basis(u, IndexPoint::new(u, l, n).unwrap()).unwrap()
    }

    fn s(u: &Universe, src: &str) -> Series<GroupElement> {
        Series::parse(u, src).unwrap()
    }

    #[test]
    fn add_takes_min_floor_and_truncates() {
        let u = u2();
        let a = s(&u, "1 + t^{e(a,0)} (mod t^{2*e(a,0)})");
        let b = s(&u, "t^{e(a,0)} + t^{3*e(a,0)} (exact)");
        let sum = a.checked_add(&b).unwrap();
        assert_eq!(sum, s(&u, "1 + 2*t^{e(a,0)} (mod t^{2*e(a,0)})"));
    }

    #[test]
    fn mul_floor_from_stored_parts() {
        let u = u2();
        // (1 + O(t^f)) * (t^g exact): unknown part is O(t^(f+g)).
        let a = s(&u, "1 (mod t^{e(b,0)})");
        let b = s(&u, "t^{e(a,0)} (exact)");
        let p = a.mul(&b).unwrap();
        assert_eq!(p, s(&u, "t^{e(a,0)} (mod t^{e(a,0) + e(b,0)})"));
    }

    #[test]
    fn mul_exact_is_exact() {
        let u = u2();
        let a = s(&u, "1 + t^{e(b,0)} (exact)");
        let b = s(&u, "1 - t^{e(b,0)} (exact)");
        let p = a.mul(&b).unwrap();
        assert_eq!(p, s(&u, "1 - t^{2*e(b,0)} (exact)"));
    }

    #[test]
    fn invert_geometric() {
        let u = u2();
        let a = s(&u, "1 - t^{e(b,0)} (exact)");
        let inv = a.invert(3).unwrap();
        assert_eq!(
            inv,
            s(&u, "1 + t^{e(b,0)} + t^{2*e(b,0)} + t^{3*e(b,0)} (mod t^{4*e(b,0)})")
        );
        // Certify a * inv = 1 up to the floor.
        let prod = a.mul(&inv).unwrap();
        let one = Series::constant_in(&u, rat_i(1));
        let diff = prod.checked_sub(&one).unwrap();
        assert!(diff.terms().is_empty());
        assert_eq!(diff.floor(), &ExtValue::Finite(e(&u, 1, 0).scale(&rat_i(4))));
    }

    #[test]
    fn invert_monomial_is_exact() {
        let u = u2();
        let a = s(&u, "2*t^{-e(a,0)} (exact)");
        assert_eq!(a.invert(3).unwrap(), s(&u, "1/2*t^{e(a,0)} (exact)"));
    }

    #[test]
    fn invert_coarse_floor_from_empty_tail() {
        let u = u2();
        // a = t^g + O(t^f) with nothing else known: 1/a = t^-g + O(t^(f-2g)).
        let a = s(&u, "t^{-e(a,0)} (mod t^{e(a,0)})");
        let inv = a.invert(3).unwrap();
        assert_eq!(inv, s(&u, "t^{e(a,0)} (mod t^{3*e(a,0)})"));
    }

    #[test]
    fn sign_and_cmp_respect_floors() {
        let u = u2();
        let a = s(&u, "t^{-e(a,0)} (exact)");
        let b = s(&u, "t^{-e(a,0)} (mod t^{e(b,0)})");
        assert_eq!(a.try_sign().unwrap(), Ordering::Greater);
        // a and b agree on stored terms; the difference is hidden below b's floor.
        assert_eq!(a.try_cmp(&b), Err(Error::PrecisionInsufficient));
        let c = s(&u, "t^{-e(a,0)} - 1 (exact)");
        assert_eq!(a.try_cmp(&c).unwrap(), Ordering::Greater);
    }

    #[test]
    fn decompose_add_needs_positive_floor() {
        let u = u2();
        let a = s(&u, "t^{-e(a,0)} + 3 + t^{e(b,0)} (mod t^{2*e(b,0)})");
        let d = a.decompose_add().unwrap();
        assert_eq!(d.infinite, s(&u, "t^{-e(a,0)} (exact)"));
        assert_eq!(d.constant, rat_i(3));
        assert_eq!(d.infinitesimal, s(&u, "t^{e(b,0)} (mod t^{2*e(b,0)})"));
        let bad = s(&u, "t^{-e(a,0)} (mod t^{0})");
        assert_eq!(bad.decompose_add().unwrap_err(), Error::PrecisionInsufficient);
    }

    #[test]
    fn decompose_mul_round_trips() {
        let u = u2();
        let a = s(&u, "2*t^{-e(a,0)} + 3 + t^{e(b,0)} (exact)");
        let d = a.decompose_mul().unwrap();
        assert_eq!(d.exponent, e(&u, 0, 0).negated());
        assert_eq!(d.residue, rat_i(2));
        assert_eq!(d.tail.try_sign().unwrap(), Ordering::Greater);
        let back = Series::monomial(d.exponent.clone(), d.residue.clone())
            .mul(&Series::one_from(&d.exponent).checked_add(&d.tail).unwrap())
            .unwrap();
        assert_eq!(back, a);
        let neg = s(&u, "-t^{-e(a,0)} (exact)");
        assert_eq!(neg.decompose_mul().unwrap_err(), Error::NonPositive);
        assert!(neg.invert(2).is_ok());
    }

    #[test]
    fn grammar_round_trip() {
        let u = u2();
        for src in [
            "0 (exact)",
            "0 (mod t^{e(a,0)})",
            "-1/2 (exact)",
            "t^{-e(a,0)} - 1/2 + 3*t^{e(b,2)} (mod t^{7/2*e(b,2)})",
            "-t^{-2*e(a,0) + e(b,-1)} (exact)",
        ] {
            let parsed = s(&u, src);
            assert_eq!(alloc::format!("{parsed}"), src);
        }
        // Missing floor marker parses as exact but prints with one.
        assert_eq!(alloc::format!("{}", s(&u, "1 + t^{e(b,0)}")), "1 + t^{e(b,0)} (exact)");
    }

    #[test]
    fn scale_keeps_floor() {
        let u = u2();
        let a = s(&u, "1 (mod t^{e(b,0)})");
        let z = a.scale(&rat(0, 1));
        assert_eq!(z, s(&u, "0 (mod t^{e(b,0)})"));
    }
}
