//! Splitting a conjugacy-invariant jump law into classes.
//!
//! A law μ whose support is a union of conjugacy classes is recorded as one
//! representative `s_a` per class together with the class weight
//! `μ(Cl(s_a))`. The class count is `k` and the least weight is `μ*`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, One, Signed, ToPrimitive, Zero};
use serde::Deserialize;

use super::classes::{class_indices, ClassMembers};
use super::subgroup::{greedy_generators, normal_closure};
use crate::error::{Error, Result};
use crate::group::{ElementSpec, Enumerable};

/// Exact weights.
pub type Weight = Ratio<i128>;

/// Tolerance on the total mass of a jump-law file before renormalizing.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// One class of the support with its total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassWeight<E> {
    pub representative: E,
    /// `μ(Cl(s))`.
    pub weight: Weight,
    pub members: ClassMembers,
}

impl<E> ClassWeight<E> {
    pub fn weight_f64(&self) -> f64 {
        ratio_to_f64(&self.weight)
    }

    /// Weight of a single member of the class.
    pub fn member_weight_f64(&self) -> f64 {
        self.weight_f64() / self.members.size_f64()
    }
}

/// The classes of a jump law's support, disjoint and ordered by
/// representative.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDecomposition<E> {
    classes: Vec<ClassWeight<E>>,
    merged: bool,
}

impl<E: Clone + Ord> SupportDecomposition<E> {
    /// Assemble from class records whose representatives are canonical.
    /// Records naming the same class are merged and their weights added.
    pub fn from_classes(records: Vec<ClassWeight<E>>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidArgument("jump law has empty support".into()));
        }
        let count = records.len();
        let mut by_rep: BTreeMap<E, ClassWeight<E>> = BTreeMap::new();
        for rec in records {
            if !rec.weight.is_positive() {
                return Err(Error::InvalidArgument(format!(
                    "class weights must be positive, got {}",
                    rec.weight
                )));
            }
            match by_rep.get_mut(&rec.representative) {
                Some(existing) => {
                    existing.weight = checked_sum(&existing.weight, &rec.weight)?;
                }
                None => {
                    by_rep.insert(rec.representative.clone(), rec);
                }
            }
        }
        let classes: Vec<ClassWeight<E>> = by_rep.into_values().collect();
        let total = classes
            .iter()
            .try_fold(Weight::zero(), |acc, c| checked_sum(&acc, &c.weight))?;
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "class weights sum to {total}, not 1"
            )));
        }
        let merged = classes.len() < count;
        Ok(SupportDecomposition { classes, merged })
    }
}

impl<E> SupportDecomposition<E> {
    pub fn classes(&self) -> &[ClassWeight<E>] {
        &self.classes
    }

    /// Number of distinct classes `k`.
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    /// `μ* = min_a μ(Cl(s_a))`.
    pub fn mu_star(&self) -> Weight {
        self.classes
            .iter()
            .map(|c| c.weight)
            .min()
            .expect("decomposition is nonempty")
    }

    pub fn mu_star_f64(&self) -> f64 {
        ratio_to_f64(&self.mu_star())
    }

    /// Whether some classes were named more than once and merged.
    pub fn merged_duplicates(&self) -> bool {
        self.merged
    }

    pub fn representatives(&self) -> impl Iterator<Item = &E> {
        self.classes.iter().map(|c| &c.representative)
    }
}

/// Decompose an element-level law on an enumerated group.
///
/// `law` lists elements with their individual weights; repeated elements
/// are summed. Verifies class-constancy and that the representatives
/// generate the whole group.
pub fn decompose_support<G: Enumerable>(
    group: &G,
    law: &[(G::Elem, Weight)],
    limit: usize,
) -> Result<SupportDecomposition<G::Elem>> {
    let size = group.enumerable_size(limit)?;
    let mut mass: BTreeMap<usize, Weight> = BTreeMap::new();
    for (x, w) in law {
        group.check_member(x)?;
        if !w.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "element weights must be positive, got {w}"
            )));
        }
        let slot = mass.entry(group.index_of(x)).or_insert_with(Weight::zero);
        *slot = checked_sum(slot, w)?;
    }
    let mut records = Vec::new();
    let mut assigned = BTreeSet::new();
    for (&x, w) in &mass {
        if assigned.contains(&x) {
            continue;
        }
        let members = class_indices(group, size, &group.element(x));
        for &m in &members {
            match mass.get(&m) {
                Some(wm) if wm == w => {
                    assigned.insert(m);
                }
                Some(wm) => {
                    return Err(Error::NotConjugacyInvariant(format!(
                        "elements {x} and {m} are conjugate but carry weights {w} and {wm}"
                    )))
                }
                None => {
                    return Err(Error::NotConjugacyInvariant(format!(
                        "element {x} has weight {w} but its conjugate {m} is outside the support"
                    )))
                }
            }
        }
        let class_weight = checked_product(w, &Weight::from_integer(members.len() as i128))?;
        records.push(ClassWeight {
            representative: group.element(members[0]),
            weight: class_weight,
            members: ClassMembers::Enumerated(members),
        });
    }
    let decomposition = SupportDecomposition::from_classes(records)?;
    check_generates(group, size, &decomposition)?;
    Ok(decomposition)
}

/// The support must generate G, else a reducible-walk error.
pub fn check_generates<G: Enumerable>(
    group: &G,
    size: usize,
    decomposition: &SupportDecomposition<G::Elem>,
) -> Result<()> {
    let gens: Vec<usize> = decomposition
        .representatives()
        .map(|s| group.index_of(s))
        .collect();
    // the support is a union of classes, so it generates the normal
    // closure of the representatives
    let generated = normal_closure(group, size, &gens, &greedy_generators(group, size)).order();
    if generated != size {
        return Err(Error::ReducibleWalk {
            generated,
            order: size,
        });
    }
    Ok(())
}

pub fn ratio_to_f64(r: &Weight) -> f64 {
    // both parts fit in f64 range; the quotient is correctly rounded when
    // they are exactly representable, which covers every weight we build
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

fn checked_sum(a: &Weight, b: &Weight) -> Result<Weight> {
    a.checked_add(b)
        .ok_or_else(|| Error::Precision("rational weight overflow; simplify the weights".into()))
}

fn checked_product(a: &Weight, b: &Weight) -> Result<Weight> {
    a.checked_mul(b)
        .ok_or_else(|| Error::Precision("rational weight overflow; simplify the weights".into()))
}

/// Parse `"num/den"`, an integer, or a decimal such as `"0.125"` or
/// `"2.5e-1"` into an exact rational.
pub fn parse_weight(text: &str) -> Result<Weight> {
    let bad = |msg: &str| Error::InvalidArgument(format!("weight {text:?}: {msg}"));
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let den: i128 = den.trim().parse().map_err(|_| bad("bad denominator"))?;
        if den == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Weight::new(num, den));
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = text[pos + 1..].parse().map_err(|_| bad("bad exponent"))?;
            (&text[..pos], e)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['+', '-']);
    let digits = format!("{int_digits}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("not a number"));
    }
    let digits = digits.trim_start_matches('0');
    if digits.len() > 36 {
        return Err(bad("too many significant digits"));
    }
    let mut value: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad("not a number"))? };
    if negative {
        value = -value;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = |k: u32| 10i128.checked_pow(k).ok_or_else(|| bad("exponent out of range"));
    if scale >= 0 {
        let f = ten(scale as u32)?;
        value.checked_mul(f).map(Weight::from_integer).ok_or_else(|| bad("value out of range"))
    } else {
        Ok(Weight::new(value, ten((-scale) as u32)?))
    }
}

/// One record of a jump-law file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpLawRecord {
    pub representative: ElementSpec,
    pub weight: WeightText,
}

/// A weight written as a JSON number or string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightText {
    Number(serde_json::Number),
    Text(String),
}

impl WeightText {
    pub fn parse(&self) -> Result<Weight> {
        match self {
            WeightText::Number(n) => parse_weight(&n.to_string()),
            WeightText::Text(s) => parse_weight(s),
        }
    }
}

/// Parse a jump-law file: a JSON array of `{representative, weight}` where
/// `weight` is the class weight. Weights must be positive and sum to 1
/// within [`WEIGHT_SUM_TOLERANCE`]; they are then rescaled to sum to 1
/// exactly.
pub fn parse_jump_law(text: &str) -> Result<Vec<(ElementSpec, Weight)>> {
    let records: Vec<JumpLawRecord> = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if records.is_empty() {
        return Err(Error::InvalidArgument("jump-law file has no records".into()));
    }
    let mut out = Vec::with_capacity(records.len());
    let mut total = Weight::zero();
    for r in records {
        let w = r.weight.parse()?;
        if !w.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "jump-law weights must be positive, got {w}"
            )));
        }
        total = checked_sum(&total, &w)?;
        out.push((r.representative, w));
    }
    if (ratio_to_f64(&total) - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "jump-law weights sum to {}, not 1 within {WEIGHT_SUM_TOLERANCE:e}",
            ratio_to_f64(&total)
        )));
    }
    if !total.is_one() {
        for (_, w) in &mut out {
            *w = w
                .checked_div(&total)
                .ok_or_else(|| Error::Precision("rational weight overflow while renormalizing".into()))?;
        }
    }
    Ok(out)
}
