//! Subgroups of enumerated groups, stored as index sets.

use std::collections::VecDeque;

use crate::group::Enumerable;

/// A subgroup of an enumerated group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: Vec<bool>,
    generators: Vec<usize>,
}

impl Subgroup {
    /// The whole group of the given size.
    pub(crate) fn full(size: usize, generators: Vec<usize>) -> Self {
        Subgroup {
            members: (0..size).collect(),
            mask: vec![true; size],
            generators,
        }
    }

    pub fn trivial(size: usize) -> Self {
        let mut mask = vec![false; size];
        mask[0] = true;
        Subgroup {
            members: vec![0],
            mask,
            generators: Vec::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Members in increasing index order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn contains(&self, index: usize) -> bool {
        self.mask.get(index).copied().unwrap_or(false)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Order of the ambient group.
    pub fn universe_size(&self) -> usize {
        self.mask.len()
    }
}

/// `⟨gens⟩` by breadth-first right multiplication until stable.
pub fn closure<G: Enumerable>(group: &G, size: usize, gens: &[usize]) -> Subgroup {
    let gen_elems: Vec<G::Elem> = gens.iter().map(|&g| group.element(g)).collect();
    let mut mask = vec![false; size];
    mask[0] = true;
    let mut members = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        let ea = group.element(a);
        for g in &gen_elems {
            let b = group.index_of(&group.multiply(&ea, g));
            if !mask[b] {
                mask[b] = true;
                members.push(b);
                queue.push_back(b);
            }
        }
    }
    members.sort_unstable();
    Subgroup {
        members,
        mask,
        generators: gens.to_vec(),
    }
}

/// Greedy generating set of the whole group: scan indices in order and keep
/// every element not already generated.
pub fn greedy_generators<G: Enumerable>(group: &G, size: usize) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut current = Subgroup::trivial(size);
    for idx in 1..size {
        if current.order() == size {
            break;
        }
        if !current.contains(idx) {
            gens.push(idx);
            current = closure(group, size, &gens);
        }
    }
    gens
}

/// Normal closure in G of the subgroup generated by `seeds`, where
/// `group_gens` generate G.
pub fn normal_closure<G: Enumerable>(
    group: &G,
    size: usize,
    seeds: &[usize],
    group_gens: &[usize],
) -> Subgroup {
    let mut gens: Vec<usize> = Vec::new();
    for &s in seeds {
        if s != 0 && !gens.contains(&s) {
            gens.push(s);
        }
    }
    let conj_by: Vec<G::Elem> = group_gens.iter().map(|&b| group.element(b)).collect();
    loop {
        let sub = closure(group, size, &gens);
        let mut added = false;
        let snapshot = gens.clone();
        for &c in &snapshot {
            let ec = group.element(c);
            for b in &conj_by {
                let conj = group.index_of(&group.conjugate(&ec, b));
                if !sub.contains(conj) && !gens.contains(&conj) {
                    gens.push(conj);
                    added = true;
                }
            }
        }
        if !added {
            return sub;
        }
    }
}

/// `[H, K]` for subgroups H, K with known generators (K must generate a
/// subgroup containing H for the normal-closure shortcut to apply; in the
/// lower central series K = G).
pub fn commutator_subgroup<G: Enumerable>(
    group: &G,
    size: usize,
    h: &Subgroup,
    k: &Subgroup,
) -> Subgroup {
    let hg: Vec<G::Elem> = h.generators().iter().map(|&x| group.element(x)).collect();
    let kg: Vec<G::Elem> = k.generators().iter().map(|&x| group.element(x)).collect();
    let mut seeds = Vec::new();
    for a in &hg {
        for b in &kg {
            seeds.push(group.index_of(&group.commutator(a, b)));
        }
    }
    normal_closure(group, size, &seeds, k.generators())
}

/// Whether `sub` is normal in the group generated by `group_gens`.
pub fn is_normal<G: Enumerable>(group: &G, sub: &Subgroup, group_gens: &[usize]) -> bool {
    sub.generators().iter().all(|&c| {
        let ec = group.element(c);
        group_gens.iter().all(|&b| {
            let conj = group.conjugate(&ec, &group.element(b));
            sub.contains(group.index_of(&conj))
        })
    })
}
