//! Exact counting checks of the structural facts used by the coupling
//! argument: uniformity of products of coset representatives, uniformity of
//! `G_{ℓ+1}[s, U]`, uniform sums of subgroups of `Z_p^m`, and bilinearity of
//! commutators modulo the next term of the lower central series.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::Enumerable;
use crate::rng::{blocks, stream, DEFAULT_BLOCK};
use crate::structure::{superdiagonal_coords, superdiagonal_index, LowerCentralSeries};

/// Which fact a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lemma {
    #[serde(rename = "lemma4")]
    ProductOfRepresentatives,
    #[serde(rename = "lemma5i")]
    CommutatorImage,
    #[serde(rename = "lemma5ii")]
    SubgroupSum,
    #[serde(rename = "prop3")]
    Bilinearity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum CountsSummary {
    Uniformity {
        /// Size of the target set.
        targets: usize,
        /// Targets with a positive count.
        support: usize,
        min: u64,
        max: u64,
        /// Hits that landed outside the set they must lie in.
        off_support: u64,
        total: u64,
        /// For subgroup images: whether the support is closed under the group law.
        #[serde(skip_serializing_if = "Option::is_none")]
        support_is_subgroup: Option<bool>,
    },
    Identities {
        checks: u64,
        failures: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        first_failure: Option<String>,
    },
}

/// Outcome of one exact check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub lemma: Lemma,
    pub group: String,
    pub params: BTreeMap<String, Value>,
    pub pass: bool,
    pub counts_summary: CountsSummary,
    /// Count per target element; not serialized.
    #[serde(skip)]
    pub counts: Vec<u64>,
}

pub type UniformityVerdict = Verdict;

fn uniformity_summary(counts: &[u64], off_support: u64, closed: Option<bool>) -> (bool, CountsSummary) {
    let hit: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    let min = hit.iter().copied().min().unwrap_or(0);
    let max = hit.iter().copied().max().unwrap_or(0);
    let pass = off_support == 0 && min == max && closed.unwrap_or(true);
    (
        pass,
        CountsSummary::Uniformity {
            targets: counts.len(),
            support: hit.len(),
            min,
            max,
            off_support,
            total: counts.iter().sum::<u64>() + off_support,
            support_is_subgroup: closed,
        },
    )
}

fn merge_tallies(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Count `Π_ℓ u_ℓ` over all `(u_1, …, u_L) ∈ R_1 × … × R_L`; passes iff
/// every element of G is hit exactly once.
pub fn verify_lemma4<G: Enumerable>(group: &G, series: &LowerCentralSeries) -> Result<Verdict> {
    let size = series.group_size();
    let reps: Vec<Vec<G::Elem>> = (1..=series.class())
        .map(|l| {
            series
                .coset_representatives(l)
                .map(|r| r.iter().map(|&i| group.element(i)).collect())
        })
        .collect::<Result<_>>()?;
    let tuples: usize = reps.iter().map(Vec::len).product::<usize>().max(1);
    let counts = (0..tuples)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut tally, mut code| {
                let mut g = group.identity();
                for level in &reps {
                    g = group.multiply(&g, &level[code % level.len()]);
                    code /= level.len();
                }
                tally[group.index_of(&g)] += 1;
                tally
            },
        )
        .reduce(|| vec![0u64; size], merge_tallies);
    let (uniform, summary) = uniformity_summary(&counts, 0, None);
    let pass = uniform && tuples == size && counts.iter().all(|&c| c == 1);
    let mut params = BTreeMap::new();
    params.insert("factor_orders".into(), json!(reps.iter().map(Vec::len).collect::<Vec<_>>()));
    params.insert("tuples".into(), json!(tuples));
    Ok(Verdict {
        lemma: Lemma::ProductOfRepresentatives,
        group: group.label(),
        params,
        pass,
        counts_summary: summary,
        counts,
    })
}

fn check_level(series: &LowerCentralSeries, level: usize) -> Result<()> {
    if level < 2 || level > series.class() {
        return Err(Error::InvalidArgument(format!(
            "level must lie in 2..={} for a group of class {}, got {level}",
            series.class(),
            series.class()
        )));
    }
    Ok(())
}

/// Count the cosets `G_{ℓ+1}[s, u]` for `u ∈ R_{ℓ−1}`; passes iff every
/// commutator lies in `G_ℓ`, the hit cosets form a subgroup of
/// `G_ℓ/G_{ℓ+1}`, and they are hit equally often.
pub fn verify_lemma5i<G: Enumerable>(
    group: &G,
    series: &LowerCentralSeries,
    s: &G::Elem,
    level: usize,
) -> Result<Verdict> {
    group.check_member(s)?;
    check_level(series, level)?;
    let cosets = series.cosets(level)?;
    let mut counts = vec![0u64; cosets.len()];
    let mut escaped = 0u64;
    for &u in series.coset_representatives(level - 1)? {
        let c = group.commutator(s, &group.element(u));
        match cosets.coset_of(group.index_of(&c)) {
            Some(k) => counts[k] += 1,
            None => escaped += 1,
        }
    }
    let image: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] > 0).collect();
    let reps = cosets.representatives();
    let closed = image.iter().all(|&a| {
        image.iter().all(|&b| {
            cosets
                .coset_of(group.multiply_index(reps[a], reps[b]))
                .is_some_and(|k| counts[k] > 0)
        })
    });
    let (pass, summary) = uniformity_summary(&counts, escaped, Some(closed));
    let mut params = BTreeMap::new();
    params.insert("s".into(), json!(format!("{s:?}")));
    params.insert("level".into(), json!(level));
    Ok(Verdict {
        lemma: Lemma::CommutatorImage,
        group: group.label(),
        params,
        pass,
        counts_summary: summary,
        counts,
    })
}

/// Run [`verify_lemma5i`] for every `s` in `elements` and every valid level.
pub fn verify_lemma5i_all<G: Enumerable>(
    group: &G,
    series: &LowerCentralSeries,
    elements: &[G::Elem],
) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for s in elements {
        for level in 2..=series.class() {
            out.push(verify_lemma5i(group, series, s, level)?);
        }
    }
    Ok(out)
}

const MAX_TORUS_STATES: usize = 1 << 20;

fn torus_span(p: u32, m: usize, gens: &[Vec<u32>]) -> Result<Vec<bool>> {
    let size = torus_size(p, m)?;
    if let Some(g) = gens.iter().find(|g| g.len() != m || g.iter().any(|&c| c >= p)) {
        return Err(Error::Domain(format!("{g:?} is not an element of Z_{p}^{m}")));
    }
    let mut member = vec![false; size];
    member[0] = true;
    let mut frontier = vec![vec![0u32; m]];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y: Vec<u32> = x.iter().zip(g).map(|(a, b)| (a + b) % p).collect();
            let k = superdiagonal_index(&y, p);
            if !member[k] {
                member[k] = true;
                frontier.push(y);
            }
        }
    }
    Ok(member)
}

fn torus_size(p: u32, m: usize) -> Result<usize> {
    if p < 2 || m == 0 {
        return Err(Error::InvalidArgument(format!("need p >= 2 and m >= 1, got p = {p}, m = {m}")));
    }
    (p as usize)
        .checked_pow(m as u32)
        .filter(|&s| s <= MAX_TORUS_STATES)
        .ok_or_else(|| Error::Capacity {
            order: format!("{p}^{m}"),
            limit: MAX_TORUS_STATES,
        })
}

/// Convolve the uniform laws on `H_i = ⟨generators[i]⟩ ≤ Z_p^m` by exact
/// tuple counting; passes iff the counts are constant on `H_1 + … + H_r`
/// and zero elsewhere.
pub fn verify_lemma5ii(p: u32, m: usize, generators: &[Vec<Vec<u32>>]) -> Result<Verdict> {
    let size = torus_size(p, m)?;
    let mut counts = vec![0u64; size];
    counts[0] = 1;
    let mut all_gens = Vec::new();
    for gens in generators {
        let h: Vec<usize> = torus_span(p, m, gens)?
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect();
        all_gens.extend(gens.iter().cloned());
        let mut next = vec![0u64; size];
        for (x, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
            let xv = superdiagonal_coords(x, p, m);
            for &y in &h {
                let yv = superdiagonal_coords(y, p, m);
                let z: Vec<u32> = xv.iter().zip(&yv).map(|(a, b)| (a + b) % p).collect();
                next[superdiagonal_index(&z, p)] += c;
            }
        }
        counts = next;
    }
    let target = torus_span(p, m, &all_gens)?;
    let off: u64 = counts.iter().zip(&target).filter(|(_, &t)| !t).map(|(&c, _)| c).sum();
    let on: Vec<u64> = counts.iter().zip(&target).filter(|(_, &t)| t).map(|(&c, _)| c).collect();
    let (pass, summary) = uniformity_summary(&on, off, None);
    let pass = pass && on.iter().all(|&c| c > 0);
    let mut params = BTreeMap::new();
    params.insert("p".into(), json!(p));
    params.insert("m".into(), json!(m));
    params.insert("generators".into(), json!(generators));
    Ok(Verdict {
        lemma: Lemma::SubgroupSum,
        group: format!("Z_{p}^{m}"),
        params,
        pass,
        counts_summary: summary,
        counts,
    })
}

/// A deterministic family of subgroup tuples in `Z_p^m`: every pair of
/// cyclic subgroups `(⟨v⟩, ⟨w⟩)` with `v ≤ w`, and for every `v` the triple
/// `(⟨v⟩, ⟨e_1⟩, ⟨v + e_1⟩)`; when `m ≥ 2` also `(⟨e_1, e_2⟩, ⟨v⟩)`.
pub fn lemma5ii_cases(p: u32, m: usize) -> Result<Vec<Vec<Vec<Vec<u32>>>>> {
    let size = torus_size(p, m)?;
    let vecs: Vec<Vec<u32>> = (1..size).map(|i| superdiagonal_coords(i, p, m)).collect();
    let mut e1 = vec![0u32; m];
    e1[0] = 1;
    let mut cases = Vec::new();
    for (i, v) in vecs.iter().enumerate() {
        for w in &vecs[i..] {
            cases.push(vec![vec![v.clone()], vec![w.clone()]]);
        }
        let sum: Vec<u32> = v.iter().zip(&e1).map(|(a, b)| (a + b) % p).collect();
        cases.push(vec![vec![v.clone()], vec![e1.clone()], vec![sum]]);
        if m >= 2 {
            let mut e2 = vec![0u32; m];
            e2[1] = 1;
            cases.push(vec![vec![e1.clone(), e2], vec![v.clone()]]);
        }
    }
    Ok(cases)
}

#[derive(Default)]
struct IdentityTally {
    checks: u64,
    failures: u64,
    /// `(ordinal, description)` of the earliest failure.
    first: Option<(u64, String)>,
}

impl IdentityTally {
    fn record(&mut self, ok: bool, ordinal: u64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.as_ref().is_none_or(|(o, _)| ordinal < *o) {
                self.first = Some((ordinal, what()));
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.checks += other.checks;
        self.failures += other.failures;
        self.first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Bilinearity checker at one level: elements are compared modulo `G_{ℓ+1}`
/// and commutators with `z ∈ G_{ℓ−1}` must land in `G_ℓ`.
struct LevelCheck<'a, G: Enumerable> {
    group: &'a G,
    series: &'a LowerCentralSeries,
    level: usize,
}

impl<G: Enumerable> LevelCheck<'_, G> {
    fn same(&self, a: &G::Elem, b: &G::Elem) -> bool {
        let upper = self.series.term(self.level).expect("level checked");
        upper.contains(self.group.index_of(a))
            && self
                .series
                .same_coset(self.group, self.level + 1, a, b)
                .expect("level checked")
    }

    fn antisymmetry(&self, x: &G::Elem, z: &G::Elem) -> bool {
        let g = self.group;
        self.same(&g.commutator(x, z), &g.inverse(&g.commutator(z, x)))
    }

    fn right_linear(&self, x: &G::Elem, z: &G::Elem, w: &G::Elem) -> bool {
        let g = self.group;
        let rhs = g.multiply(&g.commutator(x, z), &g.commutator(x, w));
        self.same(&g.commutator(x, &g.multiply(z, w)), &rhs)
    }

    fn left_linear(&self, x: &G::Elem, y: &G::Elem, z: &G::Elem) -> bool {
        let g = self.group;
        let rhs = g.multiply(&g.commutator(x, z), &g.commutator(y, z));
        self.same(&g.commutator(&g.multiply(x, y), z), &rhs)
    }

    fn powers(&self, x: &G::Elem, z: &G::Elem, i: i64, j: i64) -> bool {
        let g = self.group;
        let lhs = g.commutator(&g.pow(x, i), &g.pow(z, j));
        self.same(&lhs, &g.pow(&g.commutator(x, z), i * j))
    }
}

/// Exponents used for the power identity.
pub const EXPONENTS: std::ops::RangeInclusive<i64> = -3..=3;

/// Groups up to this order are checked exhaustively.
pub const EXHAUSTIVE_ORDER: usize = 64;

/// Check the four bilinearity identities of `(g, h) ↦ G_{ℓ+1}[g, h]` on
/// `G × G_{ℓ−1}` for every level `2 ≤ ℓ ≤ L`. Exhaustive over the variables
/// of each identity when `|G| ≤ 64`, else `trials` random draws.
pub fn verify_prop3<G: Enumerable>(
    group: &G,
    series: &LowerCentralSeries,
    trials: usize,
    seed: u64,
) -> Result<Verdict> {
    let size = series.group_size();
    let levels: Vec<usize> = (2..=series.class()).collect();
    let exhaustive = size <= EXHAUSTIVE_ORDER;
    let elems: Vec<G::Elem> = (0..size).map(|i| group.element(i)).collect();
    let mut tally = IdentityTally::default();
    for (li, &level) in levels.iter().enumerate() {
        let chk = LevelCheck { group, series, level };
        let lower: Vec<&G::Elem> = series.term(level - 1)?.members().iter().map(|&i| &elems[i]).collect();
        let base = (li as u64) << 48;
        let part = if exhaustive {
            (0..size)
                .into_par_iter()
                .map(|xi| {
                    let x = &elems[xi];
                    let mut t = IdentityTally::default();
                    let ord = base + ((xi as u64) << 24);
                    for (zi, z) in lower.iter().enumerate() {
                        t.record(chk.antisymmetry(x, z), ord, || format!("level {level}: [x,z] = [z,x]^-1 fails for x = {x:?}, z = {z:?}"));
                        for w in &lower {
                            t.record(chk.right_linear(x, z, w), ord + zi as u64, || {
                                format!("level {level}: [x,zw] fails for x = {x:?}, z = {z:?}, w = {w:?}")
                            });
                        }
                        for y in &elems {
                            t.record(chk.left_linear(x, y, z), ord + zi as u64, || {
                                format!("level {level}: [xy,z] fails for x = {x:?}, y = {y:?}, z = {z:?}")
                            });
                        }
                        for i in EXPONENTS {
                            for j in EXPONENTS {
                                t.record(chk.powers(x, z, i, j), ord + zi as u64, || {
                                    format!("level {level}: [x^{i},z^{j}] fails for x = {x:?}, z = {z:?}")
                                });
                            }
                        }
                    }
                    t
                })
                .reduce(IdentityTally::default, IdentityTally::merge)
        } else {
            IdentityTally::default()
        };
        tally = tally.merge(part);
    }
    if !exhaustive && !levels.is_empty() {
        let lowers: Vec<Vec<usize>> = levels
            .iter()
            .map(|&l| series.term(l - 1).map(|s| s.members().to_vec()))
            .collect::<Result<_>>()?;
        let part = blocks(trials, DEFAULT_BLOCK)
            .into_par_iter()
            .map(|(b, len)| {
                let mut rng = stream(seed, b);
                let mut t = IdentityTally::default();
                for k in 0..len {
                    let ord = b * DEFAULT_BLOCK as u64 + k as u64;
                    let li = rng.random_range(0..levels.len());
                    let level = levels[li];
                    let chk = LevelCheck { group, series, level };
                    let x = &elems[rng.random_range(0..size)];
                    let y = &elems[rng.random_range(0..size)];
                    let z = &elems[lowers[li][rng.random_range(0..lowers[li].len())]];
                    let w = &elems[lowers[li][rng.random_range(0..lowers[li].len())]];
                    let i = rng.random_range(EXPONENTS);
                    let j = rng.random_range(EXPONENTS);
                    let desc = || format!("trial {ord}, level {level}: x = {x:?}, y = {y:?}, z = {z:?}, w = {w:?}, i = {i}, j = {j}");
                    t.record(chk.antisymmetry(x, z), ord, desc);
                    t.record(chk.right_linear(x, z, w), ord, desc);
                    t.record(chk.left_linear(x, y, z), ord, desc);
                    t.record(chk.powers(x, z, i, j), ord, desc);
                }
                t
            })
            .reduce(IdentityTally::default, IdentityTally::merge);
        tally = tally.merge(part);
    }
    let mut params = BTreeMap::new();
    params.insert("levels".into(), json!(levels));
    params.insert("exhaustive".into(), json!(exhaustive));
    if !exhaustive {
        params.insert("trials".into(), json!(trials));
        params.insert("seed".into(), json!(seed));
    }
    Ok(Verdict {
        lemma: Lemma::Bilinearity,
        group: group.label(),
        params,
        pass: tally.failures == 0,
        counts_summary: CountsSummary::Identities {
            checks: tally.checks,
            failures: tally.failures,
            first_failure: tally.first.map(|(_, s)| s),
        },
        counts: Vec::new(),
    })
}
