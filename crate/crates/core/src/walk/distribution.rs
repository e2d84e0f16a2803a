//! Jump laws: the two superclass walks on U_n(p) and user-defined laws.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Enumerable, FiniteGroup, ParseElement, UnitriangularGroup};
use crate::structure::{
    conjugacy_class, decompose_support, parse_jump_law, ClassMembers, ClassWeight,
    SupportDecomposition, Weight,
};

/// Parameters of walk (b): `a = ⌊√p⌋ + [⌊√p⌋ even]`, `b = ⌊√a⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NestoridiParams {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    /// Jump magnitude actually used; `b` unless overridden.
    pub magnitude: u64,
    /// The second pair of classes coincides with `±1` (or is trivial).
    pub degenerate: bool,
}

impl NestoridiParams {
    pub fn new(p: u64) -> Self {
        let r = p.isqrt();
        let a = r + u64::from(r % 2 == 0);
        let b = a.isqrt();
        Self::build(p, a, b, b)
    }

    /// Same `a`, `b`, but jumps `±magnitude` in place of `±b`.
    pub fn override_magnitude(self, magnitude: u64) -> Self {
        Self::build(self.p, self.a, self.b, magnitude)
    }

    fn build(p: u64, a: u64, b: u64, magnitude: u64) -> Self {
        let m = magnitude % p;
        let degenerate = magnitude <= 1 || m == 1 || m == p - 1;
        NestoridiParams {
            p,
            a,
            b,
            magnitude,
            degenerate,
        }
    }
}

/// Which constructor produced a jump law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WalkKind {
    /// Uniform on `Cl(I ± E_{i,i+1})`.
    Superclass,
    /// Uniform on `Cl(I ± E_{i,i+1})` and `Cl(I ± m E_{i,i+1})`.
    Nestoridi(NestoridiParams),
    Custom,
}

/// A conjugacy-invariant jump law on a group.
#[derive(Debug, Clone)]
pub struct JumpDistribution<G: FiniteGroup> {
    group: G,
    decomposition: SupportDecomposition<G::Elem>,
    kind: WalkKind,
    class_index: WeightedIndex<f64>,
}

impl<G: FiniteGroup> JumpDistribution<G> {
    pub fn from_decomposition(
        group: G,
        decomposition: SupportDecomposition<G::Elem>,
        kind: WalkKind,
    ) -> Result<Self> {
        for s in decomposition.representatives() {
            group.check_member(s)?;
        }
        let weights: Vec<f64> = decomposition.classes().iter().map(ClassWeight::weight_f64).collect();
        let class_index = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidArgument(format!("class weights: {e}")))?;
        Ok(JumpDistribution {
            group,
            decomposition,
            kind,
            class_index,
        })
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn decomposition(&self) -> &SupportDecomposition<G::Elem> {
        &self.decomposition
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.decomposition.k()
    }

    pub fn mu_star(&self) -> f64 {
        self.decomposition.mu_star_f64()
    }

    /// Class index `a` with probability `μ(Cl(s_a))`.
    pub fn sample_class<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.class_index.sample(rng)
    }

    /// Class index and a uniform conjugator `U`; the jump is `U⁻¹ s_a U`.
    pub fn sample_parts<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, G::Elem) {
        let a = self.sample_class(rng);
        (a, self.group.uniform_element(rng))
    }

    /// One jump `U⁻¹ s_a U`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> G::Elem {
        let (a, u) = self.sample_parts(rng);
        self.group.conjugate(&self.decomposition.classes()[a].representative, &u)
    }

    pub fn representative(&self, class: usize) -> &G::Elem {
        &self.decomposition.classes()[class].representative
    }
}

impl<G: Enumerable> JumpDistribution<G> {
    /// Element-level law from class records `(representative, class weight)`;
    /// each class is spread uniformly over its members.
    pub fn from_class_weights(
        group: G,
        records: &[(G::Elem, Weight)],
        limit: usize,
    ) -> Result<Self> {
        let mut law = Vec::new();
        for (s, w) in records {
            let class = conjugacy_class(&group, s, limit)?;
            let members = class.indices().expect("enumerated class");
            let each = *w / Weight::from_integer(members.len() as i128);
            law.extend(members.iter().map(|&m| (group.element(m), each)));
        }
        let decomposition = decompose_support(&group, &law, limit)?;
        Self::from_decomposition(group, decomposition, WalkKind::Custom)
    }

    /// Member indices of every class, enumerating symbolic classes on demand.
    pub fn class_members(&self, limit: usize) -> Result<Vec<Vec<usize>>> {
        self.decomposition
            .classes()
            .iter()
            .map(|c| match &c.members {
                ClassMembers::Enumerated(m) => Ok(m.clone()),
                ClassMembers::Symbolic { .. } => {
                    let class = conjugacy_class(&self.group, &c.representative, limit)?;
                    Ok(class.indices().expect("enumerated class").to_vec())
                }
            })
            .collect()
    }
}

impl<G: Enumerable + ParseElement> JumpDistribution<G> {
    /// Load a jump-law file (see [`parse_jump_law`]).
    pub fn from_law_file(group: G, text: &str, limit: usize) -> Result<Self> {
        let records = parse_jump_law(text)?;
        let parsed = records
            .iter()
            .map(|(spec, w)| Ok((group.parse_element(spec)?, *w)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_class_weights(group, &parsed, limit)
    }
}

fn check_dims(n: usize, p: u64) -> Result<UnitriangularGroup> {
    if n < 2 || p < 2 {
        return Err(Error::InvalidArgument(format!(
            "walks need n >= 2 and p >= 2, got n = {n}, p = {p}"
        )));
    }
    UnitriangularGroup::new(n, p)
}

/// `Cl(I + c E_{i,i+1})` for every `i` and every `c` in `steps`, each with
/// weight `1 / (steps.len() (n − 1))`. Coinciding classes are merged.
fn elementary_classes(
    group: &UnitriangularGroup,
    steps: &[i64],
) -> Result<SupportDecomposition<<UnitriangularGroup as FiniteGroup>::Elem>> {
    let n = group.dim();
    let p = group.p() as u64;
    let each = Weight::new(1, (steps.len() * (n - 1)) as i128);
    let mut records = Vec::with_capacity(steps.len() * (n - 1));
    for i in 0..n - 1 {
        for &c in steps {
            // I + c E_{i,i+1} is the least member of its class
            records.push(ClassWeight {
                representative: group.elementary(i, c)?,
                weight: each,
                members: ClassMembers::Symbolic {
                    base: p,
                    exp: (n - 2) as u32,
                },
            });
        }
    }
    SupportDecomposition::from_classes(records)
}

/// Walk (a): weight `1/(2(n−1))` on each `Cl(I ± E_{i,i+1})`.
pub fn build_superclass_walk(n: usize, p: u64) -> Result<JumpDistribution<UnitriangularGroup>> {
    let group = check_dims(n, p)?;
    let decomposition = elementary_classes(&group, &[1, -1])?;
    JumpDistribution::from_decomposition(group, decomposition, WalkKind::Superclass)
}

/// Walk (b): weight `1/(4(n−1))` on each `Cl(I ± E_{i,i+1})` and
/// `Cl(I ± b E_{i,i+1})`.
pub fn build_nestoridi_walk(
    n: usize,
    p: u64,
) -> Result<(JumpDistribution<UnitriangularGroup>, NestoridiParams)> {
    build_nestoridi_walk_with(n, p, NestoridiParams::new(p))
}

/// Walk (b) with jumps `±magnitude` in place of `±b` (e.g. `magnitude = a`).
pub fn build_nestoridi_walk_with_magnitude(
    n: usize,
    p: u64,
    magnitude: u64,
) -> Result<(JumpDistribution<UnitriangularGroup>, NestoridiParams)> {
    build_nestoridi_walk_with(n, p, NestoridiParams::new(p).override_magnitude(magnitude))
}

fn build_nestoridi_walk_with(
    n: usize,
    p: u64,
    params: NestoridiParams,
) -> Result<(JumpDistribution<UnitriangularGroup>, NestoridiParams)> {
    let group = check_dims(n, p)?;
    if params.magnitude % p == 0 {
        return Err(Error::Domain(format!(
            "jump magnitude {} is 0 mod {p}",
            params.magnitude
        )));
    }
    let m = params.magnitude as i64;
    let decomposition = elementary_classes(&group, &[1, -1, m, -m])?;
    let jd = JumpDistribution::from_decomposition(group, decomposition, WalkKind::Nestoridi(params))?;
    Ok((jd, params))
}
