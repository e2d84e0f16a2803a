//! Sparse transition kernels `P(x, y) = μ(x⁻¹ y)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::Enumerable;
use crate::numeric::compensated_sum;
use crate::structure::{ratio_to_f64, AbelianProjection, Weight};
use crate::walk::JumpDistribution;

/// Row-stochastic kernel stored column-wise (incoming transitions), which
/// is the layout a gather-form `v ↦ vP` wants.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    states: usize,
    offsets: Vec<usize>,
    sources: Vec<u32>,
    weights: Vec<f64>,
}

impl TransitionKernel {
    /// Assemble from exact rows; each row must sum to exactly 1.
    /// Duplicate targets within a row are merged.
    pub fn from_exact_rows<F>(states: usize, row: F) -> Result<Self>
    where
        F: Fn(usize) -> Vec<(usize, Weight)> + Sync,
    {
        let rows: Vec<Vec<(usize, f64)>> = (0..states)
            .into_par_iter()
            .map(|x| {
                let mut merged: BTreeMap<usize, Weight> = BTreeMap::new();
                for (y, w) in row(x) {
                    *merged.entry(y).or_insert_with(Weight::zero) += w;
                }
                let total = merged.values().fold(Weight::zero(), |a, b| a + b);
                if !total.is_one() {
                    return Err(Error::InvalidArgument(format!(
                        "kernel row {x} sums to {total}, not 1"
                    )));
                }
                Ok(merged.into_iter().map(|(y, w)| (y, ratio_to_f64(&w))).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_float_rows(states, &rows))
    }

    fn from_float_rows(states: usize, rows: &[Vec<(usize, f64)>]) -> Self {
        let mut counts = vec![0usize; states + 1];
        for row in rows {
            for &(y, _) in row {
                counts[y + 1] += 1;
            }
        }
        for i in 0..states {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let nnz = offsets[states];
        let mut cursor = counts;
        let mut sources = vec![0u32; nnz];
        let mut weights = vec![0.0; nnz];
        for (x, row) in rows.iter().enumerate() {
            for &(y, w) in row {
                let slot = cursor[y];
                sources[slot] = x as u32;
                weights[slot] = w;
                cursor[y] += 1;
            }
        }
        TransitionKernel {
            states,
            offsets,
            sources,
            weights,
        }
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn nnz(&self) -> usize {
        self.sources.len()
    }

    /// `out = v P`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.states);
        assert_eq!(out.len(), self.states);
        const SERIAL_BELOW: usize = 4096;
        let gather = |(y, slot): (usize, &mut f64)| {
            let (a, b) = (self.offsets[y], self.offsets[y + 1]);
            let mut acc = 0.0;
            for k in a..b {
                acc += self.weights[k] * v[self.sources[k] as usize];
            }
            *slot = acc;
        };
        if self.states < SERIAL_BELOW {
            out.iter_mut().enumerate().for_each(gather);
        } else {
            out.par_iter_mut().enumerate().for_each(gather);
        }
    }

    /// Row sums, compensated.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut per_row: Vec<Vec<f64>> = vec![Vec::new(); self.states];
        for (k, &x) in self.sources.iter().enumerate() {
            per_row[x as usize].push(self.weights[k]);
        }
        per_row.into_iter().map(compensated_sum).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.states)
            .map(|y| compensated_sum(self.weights[self.offsets[y]..self.offsets[y + 1]].iter().copied()))
            .collect()
    }

    /// Nonzeros in each row.
    pub fn row_nonzeros(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.states];
        for &x in &self.sources {
            counts[x as usize] += 1;
        }
        counts
    }

    /// Dense copy, row-major; for small oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.states]; self.states];
        for y in 0..self.states {
            for k in self.offsets[y]..self.offsets[y + 1] {
                m[self.sources[k] as usize][y] += self.weights[k];
            }
        }
        m
    }
}

/// Exact weight of every support element: `μ(Cl(s)) / |Cl(s)|`.
fn element_weights<G: Enumerable>(jd: &JumpDistribution<G>, limit: usize) -> Result<Vec<(usize, Weight)>> {
    let members = jd.class_members(limit)?;
    let mut out = Vec::new();
    let mut total = Weight::zero();
    for (class, idx) in jd.decomposition().classes().iter().zip(members) {
        let each = class.weight / Weight::from_integer(idx.len() as i128);
        for m in idx {
            out.push((m, each));
            total += each;
        }
    }
    if !total.is_one() {
        return Err(Error::InvalidArgument(format!("jump law sums to {total}, not 1")));
    }
    Ok(out)
}

/// `P(x, y) = μ(x⁻¹ y)` on the whole group.
pub fn build_kernel<G: Enumerable>(jd: &JumpDistribution<G>, limit: usize) -> Result<TransitionKernel> {
    let group = jd.group();
    let size = group.enumerable_size(limit)?;
    let support = element_weights(jd, limit)?;
    let elems: Vec<G::Elem> = support.iter().map(|&(s, _)| group.element(s)).collect();
    TransitionKernel::from_exact_rows(size, |x| {
        let ex = group.element(x);
        elems
            .iter()
            .zip(&support)
            .map(|(s, &(_, w))| (group.index_of(&group.multiply(&ex, s)), w))
            .collect()
    })
}

/// The image chain on `G_ab`: state `c` moves to the class of `r_c s`.
pub fn build_quotient_kernel<G: Enumerable>(
    jd: &JumpDistribution<G>,
    projection: &AbelianProjection,
    limit: usize,
) -> Result<TransitionKernel> {
    let group = jd.group();
    let support = element_weights(jd, limit)?;
    let reps = projection.representatives();
    TransitionKernel::from_exact_rows(projection.states(), |c| {
        support
            .iter()
            .map(|&(s, w)| (projection.image(group.multiply_index(reps[c], s)), w))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::build_superclass_walk;

    #[test]
    fn u3_3_walk_a_kernel_shape() {
        let jd = build_superclass_walk(3, 3).unwrap();
        let k = build_kernel(&jd, 1000).unwrap();
        assert_eq!(k.states(), 27);
        assert!(k.row_nonzeros().iter().all(|&r| r == 12));
        for s in k.row_sums().into_iter().chain(k.column_sums()) {
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_is_fixed() {
        let jd = build_superclass_walk(4, 2).unwrap();
        let k = build_kernel(&jd, 1000).unwrap();
        let u = vec![1.0 / 64.0; 64];
        let mut out = vec![0.0; 64];
        k.apply(&u, &mut out);
        assert!(out.iter().all(|&x| (x - 1.0 / 64.0).abs() < 1e-17));
    }

    #[test]
    fn quotient_kernel_is_product_walk() {
        let jd = build_superclass_walk(3, 3).unwrap();
        let proj = AbelianProjection::superdiagonal(jd.group(), 1000).unwrap();
        let k = build_quotient_kernel(&jd, &proj, 1000).unwrap();
        let dense = k.to_dense();
        // from (0,0): ±1 in either coordinate, 1/4 each
        let mut expect = vec![0.0; 9];
        for s in [1usize, 2, 3, 6] {
            expect[s] = 0.25;
        }
        assert_eq!(dense[0], expect);
    }

    #[test]
    fn rejects_rows_not_summing_to_one() {
        let err = TransitionKernel::from_exact_rows(2, |x| vec![(x, Weight::new(1, 2))]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }
}
