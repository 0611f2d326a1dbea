//! Exact rational coefficients and small helpers over them.
//!
//! All arithmetic in this crate is exact; floats never appear.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, the coefficient field everywhere.
pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`]. Panics if `d == 0`; intended for literals.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as a [`Rational`].
pub fn rat_i(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!` as a [`Rational`].
pub(crate) fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

/// Sign of a rational as an [`Ordering`](core::cmp::Ordering) against zero.
pub(crate) fn sign_of(q: &Rational) -> core::cmp::Ordering {
    if q.is_zero() {
        core::cmp::Ordering::Equal
    } else if q.is_positive() {
        core::cmp::Ordering::Greater
    } else {
        core::cmp::Ordering::Less
    }
}

/// Merge two sorted association lists, adding coefficients on equal keys
/// and dropping zero results. Keys must be comparable (same universe).
pub(crate) fn merge_add<K: Ord + Clone>(
    a: &[(K, Rational)],
    b: &[(K, Rational)],
) -> Vec<(K, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            core::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                let q = &a[i].1 + &b[j].1;
                if !q.is_zero() {
                    out.push((a[i].0.clone(), q));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sort an arbitrary term list, merge duplicate keys, drop zero coefficients.
pub(crate) fn normalize_terms<K: Ord>(mut terms: Vec<(K, Rational)>) -> Vec<(K, Rational)> {
    terms.sort_by(|x, y| x.0.cmp(&y.0));
    let mut out: Vec<(K, Rational)> = Vec::with_capacity(terms.len());
    for (k, q) in terms {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += q,
            _ => out.push((k, q)),
        }
        if let Some(last) = out.last() {
            if last.1.is_zero() {
                out.pop();
            }
        }
    }
    out
}
