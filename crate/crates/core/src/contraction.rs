//! The successor contraction on the index chain and its induced maps.
//!
//! The map `zeta` sends `(label, n)` to `(label, n+1)`: strictly increasing
//! toward smaller elements of the group, with every label's copy of the
//! integers closed under it. Composing with the cross-section `s(p) = -e_p`
//! yields the group contraction `chi(g) = -e_{zeta(arch_class(g))}` on
//! negative elements; two elements are `chi`-equivalent exactly when their
//! archimedean classes share a label.

use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::group::{GroupElement, IndexPoint, OFFSET_BOUND};
use crate::order_type::Universe;

/// The successor map on index points.
#[derive(Clone, Debug)]
pub struct ZetaMap {
    u: Universe,
}

impl ZetaMap {
    pub fn new(u: &Universe) -> Self {
        ZetaMap { u: u.clone() }
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    /// `(label, n)` becomes `(label, n+1)`.
    pub fn apply(&self, p: IndexPoint) -> Result<IndexPoint> {
        IndexPoint::new(&self.u, p.label, p.offset + 1)
    }

    /// Inverse of [`ZetaMap::apply`]; total because each integer copy is
    /// closed under predecessor too.
    pub fn unapply(&self, p: IndexPoint) -> Result<IndexPoint> {
        IndexPoint::new(&self.u, p.label, p.offset - 1)
    }

    /// Two points are equivalent under iterated `zeta` exactly when they
    /// share a label.
    pub fn equiv(&self, p: IndexPoint, q: IndexPoint) -> bool {
        p.label == q.label
    }

    /// A witness for equivalence: `(k, m)` with `zeta^k(p) = zeta^m(q)`.
    pub fn equiv_witness(&self, p: IndexPoint, q: IndexPoint) -> Option<(u64, u64)> {
        if p.label != q.label {
            return None;
        }
        let d = p.offset - q.offset;
        // Always within 2*OFFSET_BOUND, far from overflow.
        if d >= 0 {
            Some((0, d as u64))
        } else {
            Some(((-d) as u64, 0))
        }
    }

    /// The order type of the quotient chain (one class per label).
    pub fn quotient_order_type(&self) -> Universe {
        self.u.clone()
    }

    /// The group contraction on strictly negative elements:
    /// `chi(g) = -e_{zeta(arch_class(g))}`.
    pub fn chi(&self, g: &GroupElement) -> Result<GroupElement> {
        if g.sign() != Ordering::Less {
            return Err(Error::NonNegative);
        }
        let p = self.apply(g.arch_class()?)?;
        Ok(GroupElement::basis(&self.u, p)?.negated())
    }

    /// Two negative elements have a common iterated-`chi` value exactly when
    /// their archimedean classes share a label.
    pub fn chi_equiv(&self, a: &GroupElement, b: &GroupElement) -> Result<bool> {
        if a.sign() != Ordering::Less || b.sign() != Ordering::Less {
            return Err(Error::NonNegative);
        }
        Ok(a.arch_class()?.label == b.arch_class()?.label)
    }

    /// A witness for [`ZetaMap::chi_equiv`]: `(k, m)` with
    /// `chi^k(a) = chi^m(b)`, both at least 1 so the iterates are defined
    /// even when an input is not a basis image.
    pub fn chi_equiv_witness(
        &self,
        a: &GroupElement,
        b: &GroupElement,
    ) -> Result<Option<(u64, u64)>> {
        if !self.chi_equiv(a, b)? {
            return Ok(None);
        }
        let pa = a.arch_class()?;
        let pb = b.arch_class()?;
        // After one step both are -e_{(label, offset+1)}; further steps add 1
        // to the offset each time, so align the larger offset.
        let d = pa.offset - pb.offset;
        if d >= 0 {
            Ok(Some((1, 1 + d as u64)))
        } else {
            Ok(Some((1 + (-d) as u64, 1)))
        }
    }
}

/// The group cross-section `s(p) = -e_p`, picking one negative
/// representative per archimedean class.
#[derive(Clone, Debug)]
pub struct GroupCrossSection {
    u: Universe,
}

impl GroupCrossSection {
    pub fn new(u: &Universe) -> Self {
        GroupCrossSection { u: u.clone() }
    }

    /// `s(p) = -e_p`.
    pub fn apply(&self, p: IndexPoint) -> Result<GroupElement> {
        Ok(GroupElement::basis(&self.u, p)?.negated())
    }

    /// `s(zeta(p)) = -e_{zeta(p)}`: the map the monomial lift realizes on
    /// valuations.
    pub fn compose_zeta(&self, zeta: &ZetaMap, p: IndexPoint) -> Result<GroupElement> {
        self.apply(zeta.apply(p)?)
    }
}

/// Bound on iterated applications implied by the offset range; useful for
/// callers sizing search loops.
pub const MAX_ZETA_ITER: u64 = (2 * OFFSET_BOUND) as u64;
