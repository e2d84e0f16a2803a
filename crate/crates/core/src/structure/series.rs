//! The lower central series `G = G_1 ⊵ G_2 ⊵ … ⊵ G_{L+1} = {id}` with
//! `G_{k+1} = [G_k, G]`, and coset representatives for each factor.

use super::subgroup::{commutator_subgroup, greedy_generators, is_normal, Subgroup};
use crate::error::{Error, Result};
use crate::group::Enumerable;

const NO_COSET: u32 = u32::MAX;

/// Cosets of `G_{ℓ+1}` inside `G_ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetMap {
    /// Ordering-least element of each coset, increasing.
    representatives: Vec<usize>,
    /// Coset ordinal of every element of `G_ℓ`, `NO_COSET` elsewhere.
    coset_of: Vec<u32>,
}

impl CosetMap {
    fn build<G: Enumerable>(group: &G, upper: &Subgroup, lower: &Subgroup) -> Self {
        let mut coset_of = vec![NO_COSET; upper.universe_size()];
        let mut representatives = Vec::new();
        let lower_elems: Vec<G::Elem> = lower.members().iter().map(|&h| group.element(h)).collect();
        for &x in upper.members() {
            if coset_of[x] != NO_COSET {
                continue;
            }
            let ordinal = representatives.len() as u32;
            representatives.push(x);
            let ex = group.element(x);
            for h in &lower_elems {
                coset_of[group.index_of(&group.multiply(h, &ex))] = ordinal;
            }
        }
        CosetMap {
            representatives,
            coset_of,
        }
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Coset ordinal of element `index`, if it lies in `G_ℓ`.
    pub fn coset_of(&self, index: usize) -> Option<usize> {
        match self.coset_of.get(index) {
            Some(&c) if c != NO_COSET => Some(c as usize),
            _ => None,
        }
    }
}

/// The lower central series of an enumerated nilpotent group.
#[derive(Debug, Clone)]
pub struct LowerCentralSeries {
    size: usize,
    /// `terms[k] = G_{k+1}`; the last term is trivial.
    terms: Vec<Subgroup>,
    /// `cosets[k]` describes `G_{k+1} / G_{k+2}`.
    cosets: Vec<CosetMap>,
}

impl LowerCentralSeries {
    /// Nilpotency class L.
    pub fn class(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn group_size(&self) -> usize {
        self.size
    }

    /// `G_ℓ` for `1 ≤ ℓ ≤ L + 1`.
    pub fn term(&self, level: usize) -> Result<&Subgroup> {
        if level == 0 || level > self.terms.len() {
            return Err(Error::InvalidArgument(format!(
                "series level {level} out of range 1..={}",
                self.terms.len()
            )));
        }
        Ok(&self.terms[level - 1])
    }

    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    /// Orders `|G_1|, …, |G_{L+1}|`.
    pub fn orders(&self) -> Vec<usize> {
        self.terms.iter().map(Subgroup::order).collect()
    }

    /// Cosets of `G_{ℓ+1}` in `G_ℓ`, `1 ≤ ℓ ≤ L`.
    pub fn cosets(&self, level: usize) -> Result<&CosetMap> {
        if level == 0 || level > self.cosets.len() {
            return Err(Error::InvalidArgument(format!(
                "coset level {level} out of range 1..={}",
                self.cosets.len()
            )));
        }
        Ok(&self.cosets[level - 1])
    }

    /// `R_ℓ`: one ordering-least element per coset of `G_{ℓ+1}` in `G_ℓ`.
    pub fn coset_representatives(&self, level: usize) -> Result<&[usize]> {
        Ok(self.cosets(level)?.representatives())
    }

    /// Whether `a` and `b` lie in the same coset of `G_level`.
    pub fn same_coset<G: Enumerable>(&self, group: &G, level: usize, a: &G::Elem, b: &G::Elem) -> Result<bool> {
        let sub = self.term(level)?;
        let d = group.multiply(a, &group.inverse(b));
        Ok(sub.contains(group.index_of(&d)))
    }
}

/// Compute the lower central series; errors if it stalls above `{id}`.
///
/// Each term is built as the normal closure of commutators of generators,
/// and normality of every term is re-checked afterwards.
pub fn lower_central_series<G: Enumerable>(group: &G, limit: usize) -> Result<LowerCentralSeries> {
    let size = group.enumerable_size(limit)?;
    let whole = Subgroup::full(size, greedy_generators(group, size));
    let group_gens = whole.generators().to_vec();
    let mut terms = vec![whole];
    loop {
        let current = terms.last().expect("series is nonempty");
        if current.is_trivial() {
            break;
        }
        let next = commutator_subgroup(group, size, current, &terms[0]);
        if next.order() == current.order() {
            return Err(Error::NotNilpotent {
                stalled_order: current.order(),
            });
        }
        if !is_normal(group, &next, &group_gens) {
            return Err(Error::Domain(format!(
                "internal: term {} of the lower central series is not normal",
                terms.len() + 1
            )));
        }
        terms.push(next);
    }
    let cosets = terms
        .windows(2)
        .map(|w| CosetMap::build(group, &w[0], &w[1]))
        .collect();
    Ok(LowerCentralSeries { size, terms, cosets })
}

/// `[G, G]` alone; defined for any enumerated group.
pub fn derived_subgroup<G: Enumerable>(group: &G, limit: usize) -> Result<Subgroup> {
    let size = group.enumerable_size(limit)?;
    let whole = Subgroup::full(size, greedy_generators(group, size));
    Ok(commutator_subgroup(group, size, &whole, &whole))
}
