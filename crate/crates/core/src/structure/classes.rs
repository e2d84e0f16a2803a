//! Conjugacy classes by exhaustive conjugation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::group::Enumerable;

/// Members of a conjugacy class: an explicit index list, or only the size
/// `base^exp` when the group is too large to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ClassMembers {
    Enumerated(Vec<usize>),
    Symbolic { base: u64, exp: u32 },
}

impl ClassMembers {
    /// Size as a float (exact when it fits in 53 bits).
    pub fn size_f64(&self) -> f64 {
        match self {
            ClassMembers::Enumerated(m) => m.len() as f64,
            ClassMembers::Symbolic { base, exp } => (*base as f64).powi(*exp as i32),
        }
    }

    pub fn size_exact(&self) -> Option<u128> {
        match self {
            ClassMembers::Enumerated(m) => Some(m.len() as u128),
            ClassMembers::Symbolic { base, exp } => (*base as u128).checked_pow(*exp),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClass<E> {
    /// Least member in the group's index order.
    pub representative: E,
    pub members: ClassMembers,
}

impl<E> ConjugacyClass<E> {
    pub fn indices(&self) -> Option<&[usize]> {
        match &self.members {
            ClassMembers::Enumerated(m) => Some(m),
            ClassMembers::Symbolic { .. } => None,
        }
    }

    pub fn len(&self) -> f64 {
        self.members.size_f64()
    }
}

/// Class indices of `s`, sorted.
pub(crate) fn class_indices<G: Enumerable>(group: &G, size: usize, s: &G::Elem) -> Vec<usize> {
    let mut members: Vec<usize> = (0..size)
        .into_par_iter()
        .map(|x| group.index_of(&group.conjugate(s, &group.element(x))))
        .collect();
    members.par_sort_unstable();
    members.dedup();
    members
}

/// `Cl(s) = {x⁻¹ s x : x ∈ G}`, enumerated.
pub fn conjugacy_class<G: Enumerable>(
    group: &G,
    s: &G::Elem,
    limit: usize,
) -> Result<ConjugacyClass<G::Elem>> {
    let size = group.enumerable_size(limit)?;
    group.check_member(s)?;
    let members = class_indices(group, size, s);
    Ok(ConjugacyClass {
        representative: group.element(members[0]),
        members: ClassMembers::Enumerated(members),
    })
}

/// All conjugacy classes, ordered by representative.
pub fn conjugacy_classes<G: Enumerable>(
    group: &G,
    limit: usize,
) -> Result<Vec<ConjugacyClass<G::Elem>>> {
    let size = group.enumerable_size(limit)?;
    let mut seen = vec![false; size];
    let mut out = Vec::new();
    for idx in 0..size {
        if seen[idx] {
            continue;
        }
        let members = class_indices(group, size, &group.element(idx));
        for &m in &members {
            seen[m] = true;
        }
        out.push(ConjugacyClass {
            representative: group.element(members[0]),
            members: ClassMembers::Enumerated(members),
        });
    }
    Ok(out)
}
