//! Seeded sample generation for the check suites. All draws go through one
//! ChaCha8 stream, so a (config, seed) pair fixes every sample exactly.
//!
//! Series samples keep support size small (at most 4), exponent offsets
//! inside the configured window, and coefficients in a fixed rational pool.
//! Elements meant to be logged repeatedly are built "monic iterable": the
//! series leads with coefficient 1 and its exponent tree carries -1 on the
//! whole leading spine, so every iterated log is again monic.

use hahnlog_core::{
    rat, rat_i, GroupElement, IndexPoint, Rational, Series, StageElement, Universe,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const POOL: [(i64, i64); 14] = [
    (1, 1),
    (-1, 1),
    (2, 1),
    (-2, 1),
    (1, 2),
    (-1, 2),
    (3, 1),
    (-3, 1),
    (1, 3),
    (-1, 3),
    (5, 2),
    (-5, 2),
    (2, 3),
    (-2, 3),
];

pub struct Sampler {
    rng: ChaCha8Rng,
    u: Universe,
    window: (i64, i64),
}

impl Sampler {
    pub fn new(u: &Universe, seed: u64, window: (i64, i64)) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), u: u.clone(), window }
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    pub fn coefficient(&mut self) -> Rational {
        let (n, d) = POOL[self.rng.gen_range(0..POOL.len())];
        rat(n, d)
    }

    pub fn positive_coefficient(&mut self) -> Rational {
        let (n, d) = POOL[self.rng.gen_range(0..POOL.len() / 2) * 2];
        rat(n, d)
    }

    pub fn point(&mut self) -> IndexPoint {
        let label = self.rng.gen_range(0..self.u.len());
        self.point_with_label(label)
    }

    pub fn point_with_label(&mut self, label: usize) -> IndexPoint {
        let offset = self.rng.gen_range(self.window.0..=self.window.1);
        IndexPoint::new(&self.u, label, offset).expect("window offsets are in range")
    }

    /// Any group element with at most `max_terms` support points.
    pub fn group_element(&mut self, max_terms: usize) -> GroupElement {
        let count = self.rng.gen_range(0..=max_terms);
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            terms.push((self.point(), self.coefficient()));
        }
        GroupElement::from_terms(&self.u, terms).expect("sampled points share the universe")
    }

    /// A strictly positive group element.
    pub fn positive_group(&mut self) -> GroupElement {
        loop {
            let g = self.group_element(3);
            match g.sign() {
                std::cmp::Ordering::Greater => return g,
                std::cmp::Ordering::Less => return g.negated(),
                std::cmp::Ordering::Equal => continue,
            }
        }
    }

    /// A strictly negative exponent whose leading coefficient is exactly -1,
    /// with an optional strictly smaller tail.
    pub fn negative_monic_exponent(&mut self) -> GroupElement {
        let lead = self.point();
        self.negative_monic_exponent_at(lead)
    }

    /// Same as `negative_monic_exponent`, but with the leading point fixed.
    pub fn negative_monic_exponent_at(&mut self, lead: IndexPoint) -> GroupElement {
        let mut terms = vec![(lead, rat_i(-1))];
        for _ in 0..self.rng.gen_range(0..=2usize) {
            let q = self.point();
            if q > lead {
                terms.push((q, self.coefficient()));
            }
        }
        GroupElement::from_terms(&self.u, terms).expect("sampled points share the universe")
    }

    /// A single negated basis direction `-e_p`.
    pub fn negative_basis_exponent(&mut self) -> GroupElement {
        let p = self.point();
        GroupElement::basis(&self.u, p)
            .expect("sampled point is in the universe")
            .negated()
    }

    /// Positive infinite with the valuation's leading label at most `max_label`.
    pub fn positive_infinite_leading_label(&mut self, max_label: usize) -> Series<GroupElement> {
        let label = self.rng.gen_range(0..=max_label.min(self.u.len() - 1));
        let lead = self.point_with_label(label);
        let g = self.negative_monic_exponent_at(lead);
        let mut s = Series::monomial(g.clone(), rat_i(1));
        for _ in 0..self.rng.gen_range(0..=2usize) {
            let e = g.checked_add(&self.positive_group()).expect("same universe");
            s = s
                .checked_add(&Series::monomial(e, self.coefficient()))
                .expect("same universe");
        }
        s
    }

    /// Positive infinite, monic iterable: leading term `1 * t^g` with the
    /// leading coefficient of `g` equal to -1.
    pub fn positive_infinite(&mut self) -> Series<GroupElement> {
        let g = self.negative_monic_exponent();
        let mut s = Series::monomial(g.clone(), rat_i(1));
        for _ in 0..self.rng.gen_range(0..=2usize) {
            let e = g.checked_add(&self.positive_group()).expect("same universe");
            s = s
                .checked_add(&Series::monomial(e, self.coefficient()))
                .expect("same universe");
        }
        s
    }

    /// Nonzero with every exponent strictly positive.
    pub fn infinitesimal(&mut self) -> Series<GroupElement> {
        loop {
            let count = self.rng.gen_range(1..=3usize);
            let mut terms = Vec::with_capacity(count);
            for _ in 0..count {
                terms.push((self.positive_group(), self.coefficient()));
            }
            let s = Series::from_terms(terms, hahnlog_core::ExtValue::Infinity)
                .expect("same universe");
            if !s.terms().is_empty() {
                return s;
            }
        }
    }

    pub fn one_unit(&mut self) -> Series<GroupElement> {
        let eps = self.infinitesimal();
        Series::one_from(&GroupElement::zero(&self.u))
            .checked_add(&eps)
            .expect("same universe")
    }

    /// An exact series with at most `max_terms` terms, any signs.
    pub fn exact_series(&mut self, max_terms: usize) -> Series<GroupElement> {
        let count = self.rng.gen_range(0..=max_terms);
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            terms.push((self.group_element(2), self.coefficient()));
        }
        Series::from_terms(terms, hahnlog_core::ExtValue::Infinity).expect("same universe")
    }

    /// A strictly negative stage element whose leading spine carries -1 at
    /// every level, so iterated logs of `t^x` stay monic.
    pub fn negative_stage(&mut self, stage: usize) -> StageElement {
        if stage == 0 {
            return StageElement::ground(self.negative_monic_exponent());
        }
        let count = self.rng.gen_range(1..=3usize);
        let mut keys = Vec::with_capacity(count);
        for _ in 0..count {
            keys.push(self.negative_stage(stage - 1));
        }
        keys.sort();
        keys.dedup();
        let mut terms = Vec::with_capacity(keys.len());
        for (ix, k) in keys.into_iter().enumerate() {
            let coeff = if ix == 0 { rat_i(-1) } else { self.coefficient() };
            terms.push((k, coeff));
        }
        StageElement::lift_from_terms(&self.u, stage, terms)
            .expect("keys are one stage down and strictly negative")
    }

    /// Positive infinite stage series, monic iterable.
    pub fn stage_positive_infinite(&mut self, stage: usize) -> Series<StageElement> {
        let x = self.negative_stage(stage);
        let mut s = Series::monomial(x.clone(), rat_i(1));
        if self.rng.gen_range(0..=1) == 1 {
            let bump = self.negative_stage(stage).negated();
            let e = x.checked_add(&bump).expect("same stage");
            s = s
                .checked_add(&Series::monomial(e, self.coefficient()))
                .expect("same stage");
        }
        s
    }

    /// Nonzero stage series with strictly positive exponents.
    pub fn stage_infinitesimal(&mut self, stage: usize) -> Series<StageElement> {
        loop {
            let count = self.rng.gen_range(1..=2usize);
            let mut terms = Vec::with_capacity(count);
            for _ in 0..count {
                terms.push((self.negative_stage(stage).negated(), self.coefficient()));
            }
            let s = Series::from_terms(terms, hahnlog_core::ExtValue::Infinity)
                .expect("same stage");
            if !s.terms().is_empty() {
                return s;
            }
        }
    }
}
