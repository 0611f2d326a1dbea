//! The value group: a Hahn sum of rationals over index points `(label, offset)`.
//!
//! Index points are ordered lexicographically by label position then offset.
//! A group element is a finite sorted association list from index points to
//! nonzero rationals; the order is lexicographic from the *smallest* index in
//! the support, so elements supported on smaller indices dominate. The
//! archimedean class of a nonzero element is its minimal support index.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::order_type::{same_universe, Universe};
use crate::rational::{merge_add, normalize_terms, sign_of, Rational};
use crate::text::Cursor;

/// Offsets are kept well inside `i64` so successor maps and window arithmetic
/// can never overflow.
pub const OFFSET_BOUND: i64 = 1 << 40;

/// One point of the index chain: a label position and an integer offset
/// within that label's copy of the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexPoint {
    /// Position of the label in the order type (not the label text).
    pub label: usize,
    /// Offset within the label's integer copy.
    pub offset: i64,
}

impl IndexPoint {
    /// A validated index point for the given universe.
    pub fn new(u: &Universe, label: usize, offset: i64) -> Result<Self> {
        if label >= u.len() {
            return Err(Error::UnknownLabel(alloc::format!("#{label}")));
        }
        if offset.abs() > OFFSET_BOUND {
            return Err(Error::OffsetOutOfRange(offset));
        }
        Ok(IndexPoint { label, offset })
    }

    /// Renders as `label,offset` using the universe's label text.
    pub fn rendered(&self, u: &Universe) -> String {
        alloc::format!("{},{}", u.label(self.label), self.offset)
    }
}

/// Element of the value group: finite support, rational coefficients.
#[derive(Clone, Debug)]
pub struct GroupElement {
    u: Universe,
    terms: Vec<(IndexPoint, Rational)>,
}

impl GroupElement {
    /// The zero element.
    pub fn zero(u: &Universe) -> Self {
        GroupElement { u: u.clone(), terms: Vec::new() }
    }

    /// The basis element `e_p` (coefficient 1 at `p`).
    pub fn basis(u: &Universe, p: IndexPoint) -> Result<Self> {
        let p = IndexPoint::new(u, p.label, p.offset)?;
        Ok(GroupElement { u: u.clone(), terms: alloc::vec![(p, Rational::one())] })
    }

    /// Builds an element from arbitrary terms: validates points, sorts,
    /// merges duplicates, drops zeros.
    pub fn from_terms(
        u: &Universe,
        terms: impl IntoIterator<Item = (IndexPoint, Rational)>,
    ) -> Result<Self> {
        let terms: Vec<(IndexPoint, Rational)> = terms.into_iter().collect();
        for (p, _) in &terms {
            IndexPoint::new(u, p.label, p.offset)?;
        }
        Ok(GroupElement { u: u.clone(), terms: normalize_terms(terms) })
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    pub fn terms(&self) -> &[(IndexPoint, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term: the minimal support index and its coefficient.
    pub fn leading(&self) -> Option<(IndexPoint, &Rational)> {
        self.terms.first().map(|(p, q)| (*p, q))
    }

    /// Sign against zero: the sign of the coefficient at the minimal index.
    pub fn sign(&self) -> Ordering {
        match self.terms.first() {
            None => Ordering::Equal,
            Some((_, q)) => sign_of(q),
        }
    }

    /// Sum, rejecting mismatched universes.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_universe(&self.u, &other.u) {
            return Err(Error::MismatchedUniverse);
        }
        Ok(GroupElement { u: self.u.clone(), terms: merge_add(&self.terms, &other.terms) })
    }

    /// Difference, rejecting mismatched universes.
    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.negated())
    }

    pub fn negated(&self) -> Self {
        GroupElement {
            u: self.u.clone(),
            terms: self.terms.iter().map(|(p, q)| (*p, -q)).collect(),
        }
    }

    /// Scalar multiple; scaling by zero gives the zero element.
    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return GroupElement::zero(&self.u);
        }
        GroupElement {
            u: self.u.clone(),
            terms: self.terms.iter().map(|(p, c)| (*p, c * q)).collect(),
        }
    }

    /// Total lexicographic comparison, rejecting mismatched universes.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        if !same_universe(&self.u, &other.u) {
            return Err(Error::MismatchedUniverse);
        }
        Ok(lex_cmp(&self.terms, &other.terms))
    }

    /// Archimedean class: the minimal support index. Rejects zero.
    pub fn arch_class(&self) -> Result<IndexPoint> {
        match self.terms.first() {
            Some((p, _)) => Ok(*p),
            None => Err(Error::ZeroArgument),
        }
    }

    /// True when both nonzero elements share an archimedean class.
    pub fn arch_equiv(&self, other: &Self) -> Result<bool> {
        if !same_universe(&self.u, &other.u) {
            return Err(Error::MismatchedUniverse);
        }
        Ok(self.arch_class()? == other.arch_class()?)
    }

    /// Parses the grammar `q*e(label,n) + ... | 0` (see crate docs).
    pub fn parse(u: &Universe, s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let g = parse_body(u, &mut cur)?;
        cur.expect_end()?;
        Ok(g)
    }
}

/// Compare two sorted term lists lexicographically: the sign of the
/// difference at the smallest index where they differ.
fn lex_cmp(a: &[(IndexPoint, Rational)], b: &[(IndexPoint, Rational)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some((_, qa)), None) => return sign_of(qa),
            (None, Some((_, qb))) => return sign_of(qb).reverse(),
            (Some((pa, qa)), Some((pb, qb))) => match pa.cmp(pb) {
                Ordering::Less => return sign_of(qa),
                Ordering::Greater => return sign_of(qb).reverse(),
                Ordering::Equal => match qa.cmp(qb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            },
        }
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.u, &other.u) && self.terms == other.terms
    }
}

impl Eq for GroupElement {}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    /// Panics on mismatched universes; use [`GroupElement::try_cmp`] at
    /// trust boundaries.
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparing group elements from different universes")
    }
}

impl core::ops::Add for &GroupElement {
    type Output = GroupElement;
    /// Panics on mismatched universes; use `checked_add` at trust boundaries.
    fn add(self, rhs: &GroupElement) -> GroupElement {
        self.checked_add(rhs).expect("adding group elements from different universes")
    }
}

impl core::ops::Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        self.checked_sub(rhs).expect("subtracting group elements from different universes")
    }
}

impl core::ops::Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        self.negated()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = q.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "e({})", p.rendered(&self.u))?;
        }
        Ok(())
    }
}

/// Parses a group-element body without requiring end of input (used inside
/// the series grammar, which continues after the closing brace).
pub(crate) fn parse_body(u: &Universe, cur: &mut Cursor) -> Result<GroupElement> {
    cur.skip_ws();
    // Bare zero.
    if cur.eat('0') {
        return GroupElement::from_terms(u, Vec::new());
    }
    let mut terms: Vec<(IndexPoint, Rational)> = Vec::new();
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
            cur.skip_ws();
        }
        cur.expect('e')?;
        cur.expect('(')?;
        cur.skip_ws();
        let label = cur.ident()?;
        let Some(label_ix) = u.index_of(&label) else {
            return cur.err(alloc::format!("unknown label {label:?}"));
        };
        cur.skip_ws();
        cur.expect(',')?;
        cur.skip_ws();
        let offset = cur.int()?;
        cur.skip_ws();
        cur.expect(')')?;
        let p = match IndexPoint::new(u, label_ix, offset) {
            Ok(p) => p,
            Err(Error::OffsetOutOfRange(n)) => {
                return cur.err(alloc::format!("offset {n} out of range"))
            }
            Err(e) => return Err(e),
        };
        terms.push((p, coeff));
        cur.skip_ws();
        if cur.eat('+') {
            negate = false;
        } else if cur.eat('-') {
            negate = true;
        } else {
            break;
        }
    }
    GroupElement::from_terms(u, terms)
}
