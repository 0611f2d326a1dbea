//! Final segments of the index chain, the coarsened valuations they induce,
//! and the rank invariants computed from them.
//!
//! A final segment selects the "small" archimedean classes; the group
//! elements supported inside it form a convex subgroup, so every segment
//! yields a coarsening of the valuation. Compatibility of that coarsening
//! with the logarithm is a structural property of the segment alone, and
//! this module decides it three independent ways, cross-checking them
//! against each other.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::RangeInclusive;

use crate::contraction::ZetaMap;
use crate::error::{Error, Result};
use crate::explog::Logarithm;
use crate::group::{GroupElement, IndexPoint};
use crate::order_type::{same_universe, OrderTypeSpec, Universe};
use crate::series::{ExtValue, Series};

/// Shape of a nonempty final segment of the index chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    /// The whole chain.
    All,
    /// Indices whose label is strictly greater than the given one.
    AboveLabel(usize),
    /// Indices lexicographically at or above a point; has a minimum.
    Cut(IndexPoint),
}

/// A nonempty final segment of the index chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalSegment {
    u: Universe,
    kind: SegmentKind,
}

impl FinalSegment {
    /// The improper segment: the whole chain.
    pub fn all(u: &Universe) -> Self {
        FinalSegment { u: u.clone(), kind: SegmentKind::All }
    }

    /// Indices with label strictly above `label`; rejects the last label,
    /// which would leave the segment empty.
    pub fn above_label(u: &Universe, label: usize) -> Result<Self> {
        if label + 1 >= u.len() {
            return Err(Error::InvalidConstruction(format!(
                "no labels above index {label}"
            )));
        }
        Ok(FinalSegment { u: u.clone(), kind: SegmentKind::AboveLabel(label) })
    }

    /// Indices with label at or above `label`; the whole chain for label 0.
    pub fn from_label(u: &Universe, label: usize) -> Result<Self> {
        if label >= u.len() {
            return Err(Error::InvalidConstruction(format!(
                "label index {label} out of range"
            )));
        }
        if label == 0 {
            Ok(Self::all(u))
        } else {
            Self::above_label(u, label - 1)
        }
    }

    /// Indices lexicographically at or above `p`.
    pub fn cut(u: &Universe, p: IndexPoint) -> Result<Self> {
        let p = IndexPoint::new(u, p.label, p.offset)?;
        Ok(FinalSegment { u: u.clone(), kind: SegmentKind::Cut(p) })
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    pub fn kind(&self) -> &SegmentKind {
        &self.kind
    }

    /// Membership of an index point.
    pub fn contains(&self, p: IndexPoint) -> bool {
        match self.kind {
            SegmentKind::All => true,
            SegmentKind::AboveLabel(t) => p.label > t,
            SegmentKind::Cut(q) => p >= q,
        }
    }

    /// The minimum point, when one exists.
    pub fn min_point(&self) -> Option<IndexPoint> {
        match self.kind {
            SegmentKind::Cut(q) => Some(q),
            _ => None,
        }
    }

    /// A segment is principal when it has a minimum.
    pub fn is_principal(&self) -> bool {
        self.min_point().is_some()
    }

    /// Smallest contraction-closed final segment containing this one: a cut
    /// absorbs its whole label, the other shapes are already closed.
    pub fn zeta_closure(&self) -> FinalSegment {
        match self.kind {
            SegmentKind::Cut(q) => {
                if q.label == 0 {
                    Self::all(&self.u)
                } else {
                    FinalSegment { u: self.u.clone(), kind: SegmentKind::AboveLabel(q.label - 1) }
                }
            }
            _ => self.clone(),
        }
    }

    /// Whether the complement is closed under the contraction successor.
    pub fn is_zeta_closed(&self) -> bool {
        !matches!(self.kind, SegmentKind::Cut(_))
    }

    /// Image in the label quotient: the set of labels the segment meets.
    pub fn quotient_image(&self) -> QuotientSegment {
        let start = match self.kind {
            SegmentKind::All => 0,
            SegmentKind::AboveLabel(t) => t + 1,
            SegmentKind::Cut(q) => q.label,
        };
        QuotientSegment { u: self.u.clone(), start }
    }

    /// Kills the coordinates supported inside the segment, leaving the
    /// canonical representative of the coarse-group coset.
    pub fn project_residual(&self, g: &GroupElement) -> Result<GroupElement> {
        if !same_universe(&self.u, g.universe()) {
            return Err(Error::MismatchedUniverse);
        }
        GroupElement::from_terms(
            &self.u,
            g.terms().iter().filter(|(p, _)| !self.contains(*p)).cloned(),
        )
    }

    /// Membership in the coarse valuation ring induced by the segment.
    pub fn in_coarse_ring(&self, a: &Series<GroupElement>) -> Result<bool> {
        Ok(w_data(a, self)?.in_ring)
    }

    /// Decides compatibility with the logarithm by three independent routes
    /// and insists they agree: the structural shape test, a windowed scan of
    /// the complement under the successor, and the contraction acting on
    /// group elements. Disagreement is an engine bug and fails loudly.
    pub fn is_compatible(&self, window: RangeInclusive<i64>) -> Result<bool> {
        let structural = self.is_zeta_closed();

        let zeta = ZetaMap::new(&self.u);
        let mut scan: Vec<IndexPoint> = Vec::new();
        for label in 0..self.u.len() {
            for offset in window.clone() {
                scan.push(IndexPoint::new(&self.u, label, offset)?);
            }
        }
        if let SegmentKind::Cut(q) = self.kind {
            for offset in q.offset - 1..=q.offset + 1 {
                scan.push(IndexPoint::new(&self.u, q.label, offset)?);
            }
        }

        let mut successor_scan = true;
        for &p in &scan {
            if !self.contains(p) && self.contains(zeta.apply(p)?) {
                successor_scan = false;
            }
        }

        let mut contraction_scan = true;
        for &p in &scan {
            if self.contains(p) {
                continue;
            }
            let single = GroupElement::basis(&self.u, p)?.negated();
            let succ = IndexPoint::new(&self.u, p.label, p.offset + 1)?;
            let wide = GroupElement::from_terms(
                &self.u,
                [
                    (p, crate::rational::rat_i(-2)),
                    (succ, crate::rational::rat_i(1)),
                ],
            )?;
            for g in [single, wide] {
                let class = zeta.chi(&g)?.arch_class()?;
                if self.contains(class) {
                    contraction_scan = false;
                }
            }
        }

        if structural != successor_scan || structural != contraction_scan {
            return Err(Error::RouteDisagreement(format!(
                "segment {self}: structural={structural} successor={successor_scan} contraction={contraction_scan}"
            )));
        }
        Ok(structural)
    }

    /// For an incompatible segment, a positive infinite element whose
    /// valuation class sits just below the cut while its contraction image
    /// lands inside the segment. Compatible segments have no witness.
    pub fn violation_witness(&self) -> Result<Option<Series<GroupElement>>> {
        match self.kind {
            SegmentKind::Cut(q) => {
                let below = IndexPoint::new(&self.u, q.label, q.offset - 1)?;
                let g = GroupElement::basis(&self.u, below)?.negated();
                Ok(Some(Series::monomial(g, crate::rational::rat_i(1))))
            }
            _ => Ok(None),
        }
    }
}

impl fmt::Display for FinalSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SegmentKind::All => write!(f, "all"),
            SegmentKind::AboveLabel(t) => write!(f, "above({})", self.u.label(t)),
            SegmentKind::Cut(q) => write!(f, "cut({})", q.rendered(&self.u)),
        }
    }
}

/// A nonempty final segment of the label quotient: a suffix of the labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSegment {
    u: Universe,
    start: usize,
}

impl QuotientSegment {
    /// The suffix of labels starting at `start`.
    pub fn new(u: &Universe, start: usize) -> Result<Self> {
        if start >= u.len() {
            return Err(Error::InvalidConstruction(format!(
                "label index {start} out of range"
            )));
        }
        Ok(QuotientSegment { u: u.clone(), start })
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    /// Index of the first label in the suffix.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Every label suffix has a minimum: its first label.
    pub fn min_label(&self) -> usize {
        self.start
    }

    pub fn contains_label(&self, label: usize) -> bool {
        label >= self.start
    }

    /// The contraction-closed segment of the chain lying over this suffix.
    pub fn preimage(&self) -> FinalSegment {
        if self.start == 0 {
            FinalSegment::all(&self.u)
        } else {
            FinalSegment { u: self.u.clone(), kind: SegmentKind::AboveLabel(self.start - 1) }
        }
    }
}

impl fmt::Display for QuotientSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, label) in self.u.labels()[self.start..].iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{label}")?;
        }
        write!(f, "}}")
    }
}

/// All contraction-closed final segments, ascending by inclusion.
pub fn zeta_closed_segments(u: &Universe) -> Vec<FinalSegment> {
    let mut out = Vec::with_capacity(u.len());
    for label in (0..u.len().saturating_sub(1)).rev() {
        out.push(FinalSegment { u: u.clone(), kind: SegmentKind::AboveLabel(label) });
    }
    out.push(FinalSegment::all(u));
    out
}

/// Closed segments plus every cut whose offset falls in the window; the
/// finite sample of segments the exhaustive checks run over.
pub fn enumerate_segments(u: &Universe, window: RangeInclusive<i64>) -> Result<Vec<FinalSegment>> {
    let mut out = zeta_closed_segments(u);
    for label in 0..u.len() {
        for offset in window.clone() {
            out.push(FinalSegment::cut(u, IndexPoint::new(u, label, offset)?)?);
        }
    }
    Ok(out)
}

/// The exponential rank: all nonempty label suffixes, ascending by
/// inclusion.
pub fn exponential_rank(u: &Universe) -> Vec<QuotientSegment> {
    let mut out = Vec::with_capacity(u.len());
    for start in (0..u.len()).rev() {
        out.push(QuotientSegment { u: u.clone(), start });
    }
    out
}

/// The principal exponential rank: the rank entries all have minima, and
/// the chain of those minima reproduces the label order type.
pub fn principal_exponential_rank(u: &Universe) -> OrderTypeSpec {
    let mut minima: Vec<usize> = exponential_rank(u).iter().map(|q| q.min_label()).collect();
    minima.sort_unstable();
    let labels: Vec<String> = minima.iter().map(|&i| u.label(i).to_string()).collect();
    OrderTypeSpec::new(labels).expect("labels of a valid universe remain valid")
}

/// Description of the principal rank: the cuts ordered by inclusion, which
/// reverses the lexicographic order of their minima.
#[derive(Clone, Debug)]
pub struct PrincipalRank {
    u: Universe,
}

impl PrincipalRank {
    pub fn new(u: &Universe) -> Self {
        PrincipalRank { u: u.clone() }
    }

    /// Labels in rank order: the reverse of the chain order.
    pub fn labels_in_rank_order(&self) -> Vec<&str> {
        self.u.labels().iter().rev().map(|s| s.as_str()).collect()
    }

    /// Spot-checks on a window that inclusion of cuts reverses the
    /// lexicographic order of their minima.
    pub fn reversal_check(&self, window: RangeInclusive<i64>) -> Result<bool> {
        let mut points = Vec::new();
        for label in 0..self.u.len() {
            for offset in window.clone() {
                points.push(IndexPoint::new(&self.u, label, offset)?);
            }
        }
        let scan = points.clone();
        for &p in &points {
            let sp = FinalSegment::cut(&self.u, p)?;
            for &q in &points {
                let sq = FinalSegment::cut(&self.u, q)?;
                let included = scan.iter().all(|&r| !sp.contains(r) || sq.contains(r));
                if included != (q <= p) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for PrincipalRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cuts ordered by inclusion: labels ")?;
        for (i, label) in self.labels_in_rank_order().iter().enumerate() {
            if i > 0 {
                write!(f, " < ")?;
            }
            write!(f, "{label}")?;
        }
        write!(f, ", each carrying a copy of the integers")
    }
}

/// The principal rank of the chain, cuts ordered by inclusion.
pub fn principal_rank(u: &Universe) -> PrincipalRank {
    PrincipalRank::new(u)
}

/// Membership data for the coarse structures a segment induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WData {
    /// In the coarse valuation ring: coarse value at least zero.
    pub in_ring: bool,
    /// In the coarse maximal ideal: coarse value strictly positive.
    pub in_ideal: bool,
    /// A coarse unit: nonzero with coarse value exactly zero.
    pub in_units: bool,
    /// Canonical representative of the coarse valuation coset.
    pub coarse_valuation: GroupElement,
}

/// Computes coarse ring, ideal, and unit membership together with the
/// coarse valuation representative. Needs a determinable valuation.
pub fn w_data(a: &Series<GroupElement>, seg: &FinalSegment) -> Result<WData> {
    match a.valuation()? {
        ExtValue::Infinity => Ok(WData {
            in_ring: true,
            in_ideal: true,
            in_units: false,
            coarse_valuation: GroupElement::zero(seg.universe()),
        }),
        ExtValue::Finite(va) => {
            let wa = seg.project_residual(&va)?;
            let sign = wa.sign();
            Ok(WData {
                in_ring: sign != Ordering::Less,
                in_ideal: sign == Ordering::Greater,
                in_units: sign == Ordering::Equal,
                coarse_valuation: wa,
            })
        }
    }
}

/// Whether a positive infinite element is cofinal in the subfield the
/// segment carves out: its archimedean label must be the least label the
/// segment's closure meets.
pub fn cofinality_class_check(a: &Series<GroupElement>, seg: &FinalSegment) -> Result<bool> {
    if a.try_sign()? != Ordering::Greater {
        return Err(Error::NonPositive);
    }
    let va = match a.valuation()? {
        ExtValue::Finite(v) => v,
        ExtValue::Infinity => return Err(Error::ZeroArgument),
    };
    if va.sign() != Ordering::Less {
        return Err(Error::InvalidConstruction(
            "cofinality check needs an infinite element".into(),
        ));
    }
    Ok(va.arch_class()?.label == seg.quotient_image().min_label())
}

/// Verifies that no segment in the windowed enumeration is both
/// contraction-closed and principal, checking downward endlessness of the
/// closed ones point by point.
pub fn corollary14_check(u: &Universe, window: RangeInclusive<i64>) -> Result<bool> {
    for seg in enumerate_segments(u, window.clone())? {
        if seg.is_zeta_closed() && seg.is_principal() {
            return Ok(false);
        }
        if seg.is_zeta_closed() {
            if seg.min_point().is_some() {
                return Ok(false);
            }
            for label in 0..u.len() {
                for offset in window.clone() {
                    let p = IndexPoint::new(u, label, offset)?;
                    if seg.contains(p) && !seg.contains(IndexPoint::new(u, label, offset - 1)?) {
                        return Ok(false);
                    }
                }
            }
        } else if seg.min_point().is_none() || seg.is_compatible(window.clone())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks, on positive infinite samples lying outside the coarse ring, that
/// the coarse valuation of the logarithm agrees with the contraction of the
/// coarse valuation, computed once on the group side and once through the
/// series logarithm, and that the induced successor action matches the
/// chain's own outside the segment.
pub fn theorem15_check(
    seg: &FinalSegment,
    log: &dyn Logarithm,
    samples: &[Series<GroupElement>],
) -> Result<bool> {
    if !seg.is_zeta_closed() {
        return Err(Error::InvalidConstruction(
            "coarse comparison needs a compatible segment".into(),
        ));
    }
    let u = seg.universe();
    if !same_universe(u, log.universe()) {
        return Err(Error::MismatchedUniverse);
    }
    let zeta = ZetaMap::new(u);
    for a in samples {
        if a.try_sign()? != Ordering::Greater {
            return Err(Error::NonPositive);
        }
        let va = match a.valuation()? {
            ExtValue::Finite(v) => v,
            ExtValue::Infinity => return Err(Error::ZeroArgument),
        };
        if w_data(a, seg)?.in_ring {
            return Err(Error::InvalidConstruction(
                "sample lies in the coarse ring".into(),
            ));
        }
        let group_route = seg.project_residual(&zeta.chi(&va)?)?;
        let out = log.log(a)?;
        let vla = match out.infinite.valuation()? {
            ExtValue::Finite(v) => v,
            ExtValue::Infinity => return Ok(false),
        };
        let series_route = seg.project_residual(&vla)?;
        if group_route != series_route || series_route.is_zero() {
            return Ok(false);
        }
        let p = va.arch_class()?;
        let q = zeta.apply(p)?;
        if seg.contains(q) || series_route.arch_class()? != q {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explog::{assemble_log, PrecisionPolicy, ResidueLogMode};
    use alloc::string::ToString;
    use alloc::vec;

    fn u2() -> Universe {
        OrderTypeSpec::new(vec!["a".to_string(), "b".to_string()]).unwrap().into_universe()
    }

    fn pt(u: &Universe, label: usize, offset: i64) -> IndexPoint {
        IndexPoint::new(u, label, offset).unwrap()
    }

    #[test]
    fn closure_absorbs_the_cut_label() {
        let u1 = OrderTypeSpec::standard(1).unwrap().into_universe();
        let c = FinalSegment::cut(&u1, pt(&u1, 0, 5)).unwrap();
        assert_eq!(c.zeta_closure(), FinalSegment::all(&u1));

        let u = u2();
        let c = FinalSegment::cut(&u, pt(&u, 1, 0)).unwrap();
        let closed = c.zeta_closure();
        assert_eq!(closed, FinalSegment::above_label(&u, 0).unwrap());
        assert!(closed.contains(pt(&u, 1, -7)));
        assert!(!closed.contains(pt(&u, 0, 3)));
    }

    #[test]
    fn compatibility_three_routes_agree() {
        let u = u2();
        assert!(FinalSegment::all(&u).is_compatible(-3..=3).unwrap());
        assert!(FinalSegment::above_label(&u, 0).unwrap().is_compatible(-3..=3).unwrap());
        let c = FinalSegment::cut(&u, pt(&u, 1, 0)).unwrap();
        assert!(!c.is_compatible(-3..=3).unwrap());
    }

    #[test]
    fn cut_witness_violates_the_coarse_law() {
        let u = u2();
        let seg = FinalSegment::cut(&u, pt(&u, 1, 0)).unwrap();
        let w = seg.violation_witness().unwrap().unwrap();
        let va = match w.valuation().unwrap() {
            ExtValue::Finite(v) => v,
            _ => panic!("witness must be nonzero"),
        };
        let p = va.arch_class().unwrap();
        assert!(!seg.contains(p));
        let chi = ZetaMap::new(&u).chi(&va).unwrap();
        assert!(seg.contains(chi.arch_class().unwrap()));
        assert!(FinalSegment::all(&u).violation_witness().unwrap().is_none());
    }

    #[test]
    fn w_data_frozen_examples() {
        let u = u2();
        let seg = FinalSegment::above_label(&u, 0).unwrap();
        let small = Series::parse(&u, "t^{e(b,0)} (exact)").unwrap();
        let d = w_data(&small, &seg).unwrap();
        assert!(d.in_ring && d.in_units && !d.in_ideal);
        assert!(d.coarse_valuation.is_zero());

        let big = Series::parse(&u, "t^{-e(a,0)} (exact)").unwrap();
        let d = w_data(&big, &seg).unwrap();
        assert!(!d.in_ring && !d.in_ideal && !d.in_units);
        assert_eq!(
            d.coarse_valuation,
            GroupElement::basis(&u, pt(&u, 0, 0)).unwrap().negated()
        );

        let zero = Series::exact_zero();
        let d = w_data(&zero, &seg).unwrap();
        assert!(d.in_ring && d.in_ideal && !d.in_units);
    }

    #[test]
    fn cofinality_frozen_examples() {
        let u = u2();
        let b_inf = Series::parse(&u, "t^{-e(b,0)} (exact)").unwrap();
        let a_inf = Series::parse(&u, "t^{-e(a,0)} (exact)").unwrap();
        let seg_b = FinalSegment::above_label(&u, 0).unwrap();
        let all = FinalSegment::all(&u);
        assert!(cofinality_class_check(&b_inf, &seg_b).unwrap());
        assert!(!cofinality_class_check(&b_inf, &all).unwrap());
        assert!(cofinality_class_check(&a_inf, &all).unwrap());
    }

    #[test]
    fn coarse_log_comparison_frozen_example() {
        let u = u2();
        let seg = FinalSegment::above_label(&u, 0).unwrap();
        let log = assemble_log(&u, ResidueLogMode::Monic, PrecisionPolicy::new(2).unwrap());
        let a = Series::parse(&u, "t^{-e(a,0)} (exact)").unwrap();
        let zeta = ZetaMap::new(&u);
        let va = match a.valuation().unwrap() {
            ExtValue::Finite(v) => v,
            _ => unreachable!(),
        };
        let expected = GroupElement::basis(&u, pt(&u, 0, 1)).unwrap().negated();
        assert_eq!(zeta.chi(&va).unwrap(), expected);
        assert!(theorem15_check(&seg, &log, &[a]).unwrap());

        let inside = Series::parse(&u, "t^{-e(b,0)} (exact)").unwrap();
        assert!(matches!(
            theorem15_check(&seg, &log, &[inside]),
            Err(Error::InvalidConstruction(_))
        ));
        let cut = FinalSegment::cut(&u, pt(&u, 1, 0)).unwrap();
        assert!(matches!(
            theorem15_check(&cut, &log, &[]),
            Err(Error::InvalidConstruction(_))
        ));
    }

    #[test]
    fn rank_ladders() {
        let u = u2();
        let rank = exponential_rank(&u);
        assert_eq!(rank.len(), 2);
        assert_eq!(rank[0].to_string(), "{b}");
        assert_eq!(rank[1].to_string(), "{a,b}");
        assert!(rank[0].preimage().is_zeta_closed());
        assert_eq!(rank[1].preimage(), FinalSegment::all(&u));
        assert_eq!(zeta_closed_segments(&u).len(), 2);

        let principal = principal_exponential_rank(&u);
        assert_eq!(principal.labels(), u.labels());

        let pr = principal_rank(&u);
        assert_eq!(pr.labels_in_rank_order(), vec!["b", "a"]);
        assert!(pr.reversal_check(-2..=2).unwrap());
    }

    #[test]
    fn quotient_round_trips() {
        let u = u2();
        for seg in zeta_closed_segments(&u) {
            assert_eq!(seg.quotient_image().preimage(), seg);
        }
        for q in exponential_rank(&u) {
            assert_eq!(q.preimage().quotient_image(), q);
        }
        let cut = FinalSegment::cut(&u, pt(&u, 1, 2)).unwrap();
        assert_eq!(cut.quotient_image().preimage(), cut.zeta_closure());
    }

    #[test]
    fn no_segment_is_closed_and_principal() {
        for n in 1..=3 {
            let u = OrderTypeSpec::standard(n).unwrap().into_universe();
            assert!(corollary14_check(&u, -3..=3).unwrap());
        }
    }

    #[test]
    fn segment_constructors_reject_empty_shapes() {
        let u = u2();
        assert!(FinalSegment::above_label(&u, 1).is_err());
        assert!(FinalSegment::from_label(&u, 2).is_err());
        assert_eq!(FinalSegment::from_label(&u, 0).unwrap(), FinalSegment::all(&u));
        assert!(QuotientSegment::new(&u, 2).is_err());
    }
}
