//! The abelianization map `G → G/G_2`.

use serde::Serialize;

use super::series::LowerCentralSeries;
use crate::error::{Error, Result};
use crate::group::{Enumerable, FiniteGroup, UnitriangularGroup};

/// Image of an element in the abelianization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum AbelianImage {
    /// `(x_{1,2}, …, x_{n−1,n})` for U_n(p).
    Superdiagonal(Vec<u32>),
    /// Ordinal of the `G_2`-coset for an enumerated group.
    Coset(usize),
}

/// Superdiagonal vector as a base-p index, first coordinate most significant.
pub fn superdiagonal_index(coords: &[u32], p: u32) -> usize {
    coords.iter().fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

/// Inverse of [`superdiagonal_index`].
pub fn superdiagonal_coords(mut index: usize, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % p as usize) as u32;
        index /= p as usize;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Labels {
    Superdiagonal { p: u32, len: usize },
    Coset,
}

/// The abelianization of an enumerated group as a map on indices.
///
/// State `c` of `G_ab` is a coset of `G_2`; `representatives[c]` is its
/// least element.
#[derive(Debug, Clone)]
pub struct AbelianProjection {
    image_of: Vec<u32>,
    representatives: Vec<usize>,
    labels: Labels,
}

impl AbelianProjection {
    /// Cosets of `G_2` as computed by the lower central series.
    pub fn from_series(series: &LowerCentralSeries) -> Self {
        let size = series.group_size();
        if series.class() == 0 {
            // trivial group
            return AbelianProjection {
                image_of: vec![0; size],
                representatives: vec![0],
                labels: Labels::Coset,
            };
        }
        let cosets = series.cosets(1).expect("level 1 exists when class ≥ 1");
        let image_of = (0..size)
            .map(|x| cosets.coset_of(x).expect("every element lies in G_1") as u32)
            .collect();
        AbelianProjection {
            image_of,
            representatives: cosets.representatives().to_vec(),
            labels: Labels::Coset,
        }
    }

    /// Superdiagonal map on an enumerated U_n(p); states are indexed by
    /// [`superdiagonal_index`].
    pub fn superdiagonal(group: &UnitriangularGroup, limit: usize) -> Result<Self> {
        let size = group.enumerable_size(limit)?;
        let p = group.p();
        let len = group.dim() - 1;
        let states = (p as usize).pow(len as u32);
        let mut image_of = vec![0u32; size];
        let mut representatives = vec![usize::MAX; states];
        for (x, slot) in image_of.iter_mut().enumerate() {
            let c = superdiagonal_index(&group.abelianize(&group.element(x)), p);
            *slot = c as u32;
            if representatives[c] == usize::MAX {
                representatives[c] = x;
            }
        }
        Ok(AbelianProjection {
            image_of,
            representatives,
            labels: Labels::Superdiagonal { p, len },
        })
    }

    /// `|G_ab|`.
    pub fn states(&self) -> usize {
        self.representatives.len()
    }

    pub fn group_size(&self) -> usize {
        self.image_of.len()
    }

    /// State of element `index`.
    #[inline]
    pub fn image(&self, index: usize) -> usize {
        self.image_of[index] as usize
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn label(&self, state: usize) -> AbelianImage {
        match self.labels {
            Labels::Superdiagonal { p, len } => {
                AbelianImage::Superdiagonal(superdiagonal_coords(state, p, len))
            }
            Labels::Coset => AbelianImage::Coset(state),
        }
    }

    /// Image of an element, labelled.
    pub fn abelianize<G: Enumerable>(&self, group: &G, x: &G::Elem) -> Result<AbelianImage> {
        group.check_member(x)?;
        Ok(self.label(self.image(group.index_of(x))))
    }

    /// Group law of `G_ab` on state indices.
    pub fn combine<G: Enumerable>(&self, group: &G, a: usize, b: usize) -> Result<usize> {
        if a >= self.states() || b >= self.states() {
            return Err(Error::InvalidArgument(format!(
                "abelian state out of range 0..{}",
                self.states()
            )));
        }
        let prod = group.multiply_index(self.representatives[a], self.representatives[b]);
        Ok(self.image(prod))
    }

    /// Sizes of the fibers; all equal `|G_2|` for a homomorphism.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.states()];
        for &c in &self.image_of {
            counts[c as usize] += 1;
        }
        counts
    }

    /// Whether the images of `elements` generate `G_ab`.
    pub fn generates<G: Enumerable>(&self, group: &G, elements: &[usize]) -> bool {
        let gens: Vec<usize> = elements.iter().map(|&x| self.image(x)).collect();
        let mut seen = vec![false; self.states()];
        let identity = self.image(0);
        seen[identity] = true;
        let mut stack = vec![identity];
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for &g in &gens {
                let b = self.image(group.multiply_index(self.representatives[a], self.representatives[g]));
                if !seen[b] {
                    seen[b] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        count == self.states()
    }
}

/// The superdiagonal of an element of U_n(p), for any n.
pub fn abelianize_unitriangular(
    group: &UnitriangularGroup,
    x: &<UnitriangularGroup as FiniteGroup>::Elem,
) -> Result<AbelianImage> {
    group.check_member(x)?;
    Ok(AbelianImage::Superdiagonal(group.abelianize(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SmallGroup;
    use crate::structure::series::lower_central_series;

    #[test]
    fn reads_superdiagonal() {
        let g = UnitriangularGroup::new(3, 11).unwrap();
        let x = g.from_entries(&[5, 7, 0]).unwrap();
        assert_eq!(
            abelianize_unitriangular(&g, &x).unwrap(),
            AbelianImage::Superdiagonal(vec![5, 0])
        );
        assert_eq!(
            abelianize_unitriangular(&g, &g.identity()).unwrap(),
            AbelianImage::Superdiagonal(vec![0, 0])
        );
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..125 {
            assert_eq!(superdiagonal_index(&superdiagonal_coords(idx, 5, 3), 5), idx);
        }
        assert_eq!(superdiagonal_index(&[1, 2], 3), 5);
    }

    #[test]
    fn superdiagonal_and_quotient_have_identical_fibers() {
        let g = UnitriangularGroup::new(3, 3).unwrap();
        let sd = AbelianProjection::superdiagonal(&g, 1000).unwrap();
        let small = SmallGroup::from_group(&g, 1000).unwrap();
        let series = lower_central_series(&small, 1000).unwrap();
        let q = AbelianProjection::from_series(&series);
        assert_eq!(sd.states(), 9);
        assert_eq!(q.states(), 9);
        for x in 0..27 {
            for y in 0..27 {
                assert_eq!(sd.image(x) == sd.image(y), q.image(x) == q.image(y));
            }
        }
    }

    #[test]
    fn homomorphism_with_kernel_g2() {
        let g = UnitriangularGroup::new(4, 2).unwrap();
        let series = lower_central_series(&g, 1000).unwrap();
        let proj = AbelianProjection::superdiagonal(&g, 1000).unwrap();
        let g2 = series.term(2).unwrap();
        for x in 0..64 {
            assert_eq!(proj.image(x) == proj.image(0), g2.contains(x));
            for y in 0..64 {
                let xy = g.multiply_index(x, y);
                let lhs = proj.image(xy);
                let rhs = proj.combine(&g, proj.image(x), proj.image(y)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        assert!(proj.fiber_sizes().iter().all(|&f| f == 8));
    }
}
