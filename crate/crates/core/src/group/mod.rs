//! Finite groups: the unit upper-triangular groups U_n(p) and explicitly
//! enumerated groups given by a Cayley table.
//!
//! Every group implements [`FiniteGroup`]. Groups small enough to list
//! element by element also implement [`Enumerable`], which fixes a bijection
//! between elements and `0..size`. That index order is the ordering used as
//! the deterministic tie-breaker everywhere downstream (class and coset
//! representatives are always the least index).

mod modulus;
mod small;
mod unitriangular;

pub use modulus::Modulus;
pub use small::SmallGroup;
pub use unitriangular::{UnitTriangular, UnitriangularGroup};

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of elements any enumerating algorithm will visit.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 200_000;

/// A finite group with an element type.
///
/// The infallible operations assume both arguments belong to `self`; mixing
/// elements of different groups is a logic error and panics. The `try_*`
/// variants check membership first and report a domain error instead.
pub trait FiniteGroup: Clone + Send + Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn multiply(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inverse(&self, x: &Self::Elem) -> Self::Elem;

    /// Whether `x` is a well-formed element of this group.
    fn contains(&self, x: &Self::Elem) -> bool;

    /// Exact order, or `None` if it does not fit in a `u128`.
    fn order(&self) -> Option<u128>;

    /// Natural log of the order; always available.
    fn ln_order(&self) -> f64;

    /// Exactly uniform element.
    fn uniform_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Short human-readable label, e.g. `U_3(5)`.
    fn label(&self) -> String;

    /// `[x, y] = x⁻¹ y⁻¹ x y`.
    fn commutator(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let xi = self.inverse(x);
        let yi = self.inverse(y);
        let a = self.multiply(&xi, &yi);
        let b = self.multiply(&a, x);
        self.multiply(&b, y)
    }

    /// `u⁻¹ s u`.
    fn conjugate(&self, s: &Self::Elem, u: &Self::Elem) -> Self::Elem {
        let ui = self.inverse(u);
        let a = self.multiply(&ui, s);
        self.multiply(&a, u)
    }

    /// `x ← x · (u⁻¹ s u)`; groups with a cheaper update override this.
    fn mul_assign_conjugate(&self, x: &mut Self::Elem, s: &Self::Elem, u: &Self::Elem) {
        let jump = self.conjugate(s, u);
        *x = self.multiply(x, &jump);
    }

    /// Integer power, negative exponents allowed.
    fn pow(&self, x: &Self::Elem, exp: i64) -> Self::Elem {
        let base = if exp < 0 { self.inverse(x) } else { x.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.multiply(&sq, &sq);
            }
        }
        acc
    }

    fn check_member(&self, x: &Self::Elem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "element {x:?} does not belong to {}",
                self.label()
            )))
        }
    }

    fn try_multiply(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.multiply(x, y))
    }

    fn try_inverse(&self, x: &Self::Elem) -> Result<Self::Elem> {
        self.check_member(x)?;
        Ok(self.inverse(x))
    }

    fn try_commutator(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.commutator(x, y))
    }

    fn try_conjugate(&self, s: &Self::Elem, u: &Self::Elem) -> Result<Self::Elem> {
        self.check_member(s)?;
        self.check_member(u)?;
        Ok(self.conjugate(s, u))
    }
}

/// A group whose elements can be listed by index.
///
/// `index_of` and `element` are mutually inverse on `0..size()`, and index 0
/// is the identity.
pub trait Enumerable: FiniteGroup {
    fn index_of(&self, x: &Self::Elem) -> usize;
    fn element(&self, index: usize) -> Self::Elem;

    /// Number of elements, or a capacity error if above `limit`.
    fn enumerable_size(&self, limit: usize) -> Result<usize> {
        match self.order() {
            Some(m) if m <= limit as u128 => Ok(m as usize),
            Some(m) => Err(Error::Capacity {
                order: m.to_string(),
                limit,
            }),
            None => Err(Error::Capacity {
                order: format!("exp({:.3})", self.ln_order()),
                limit,
            }),
        }
    }

    fn multiply_index(&self, a: usize, b: usize) -> usize {
        self.index_of(&self.multiply(&self.element(a), &self.element(b)))
    }
}

/// A group element as written in a jump-law file: either a strictly-upper
/// entry list (row-major) or a Cayley-table index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Index(usize),
    Entries(Vec<i64>),
}

/// Groups whose elements can be read from an [`ElementSpec`].
pub trait ParseElement: FiniteGroup {
    fn parse_element(&self, spec: &ElementSpec) -> Result<Self::Elem>;
}
