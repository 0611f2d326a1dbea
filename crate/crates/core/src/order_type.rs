//! Finite order types: the ordered label lists that index everything else.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A finite linear order given by its labels, listed in increasing order.
///
/// Labels are identifiers (`[A-Za-z_][A-Za-z0-9_]*`) so that every element
/// grammar round-trips through text unambiguously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderTypeSpec {
    labels: Vec<String>,
}

/// Shared handle to an order type; elements carry one so that operations can
/// reject mixing universes.
pub type Universe = Arc<OrderTypeSpec>;

/// True when two handles denote the same order type (pointer fast path,
/// content equality otherwise, so separately parsed equal specs interoperate).
pub fn same_universe(a: &Universe, b: &Universe) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn valid_label(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl OrderTypeSpec {
    /// Builds an order type from labels in increasing order.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidOrderType("label list is empty".to_string()));
        }
        for l in &labels {
            if !valid_label(l) {
                return Err(Error::InvalidOrderType(alloc::format!(
                    "label {l:?} is not an identifier"
                )));
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidOrderType(alloc::format!("duplicate label {l:?}")));
            }
        }
        Ok(OrderTypeSpec { labels })
    }

    /// The standard `n`-element order type with labels `t0 < t1 < ...`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| alloc::format!("t{i}")))
    }

    /// Shared handle for this spec.
    pub fn into_universe(self) -> Universe {
        Arc::new(self)
    }

    /// Number of labels.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when there are no labels (never holds for a validated spec).
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels in increasing order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The label at position `ix`.
    pub fn label(&self, ix: usize) -> &str {
        &self.labels[ix]
    }

    /// Position of `label`, if present.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl fmt::Display for OrderTypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, " < ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
