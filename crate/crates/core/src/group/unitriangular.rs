//! Unit upper-triangular matrices over Z_p.
//!
//! A matrix is stored as its n(n-1)/2 strictly-upper entries in row-major
//! order `(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n)`. The diagonal is
//! implicitly 1 and every stored residue lies in `[0, p)`.
//!
//! The element index used by [`Enumerable`] is the entry vector read as a
//! base-p numeral with the first entry most significant, so index order and
//! the lexicographic order on entry vectors coincide.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ElementSpec, Enumerable, FiniteGroup, Modulus, ParseElement};
use crate::error::{Error, Result};

/// The group U_n(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitriangularGroup {
    n: usize,
    modulus: Modulus,
}

/// An element of U_n(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitTriangular {
    n: usize,
    p: u32,
    entries: Box<[u32]>,
}

#[inline]
fn tri_len(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Offset of entry (i, j), 0-based with i < j.
#[inline]
fn offset(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl UnitTriangular {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Strictly-upper entries in row-major order.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Entry (i, j), 0-based; diagonal entries are 1 and lower entries 0.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.entries[offset(self.n, i, j)],
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Greater => 0,
        }
    }

    /// The first superdiagonal `(x_{1,2}, ..., x_{n-1,n})`.
    pub fn superdiagonal(&self) -> Vec<u32> {
        (0..self.n - 1).map(|i| self.get(i, i + 1)).collect()
    }

    /// If `self = I + c·E_{i,i+1}` with `c ≠ 0`, returns `(i, c)` (0-based i).
    pub fn as_elementary(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.entries[offset(self.n, i, j)];
                if v != 0 {
                    if j != i + 1 || found.is_some() {
                        return None;
                    }
                    found = Some((i, v));
                }
            }
        }
        found
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

impl UnitriangularGroup {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension must be >= 2, got {n}"
            )));
        }
        Ok(UnitriangularGroup {
            n,
            modulus: Modulus::new(p)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn p(&self) -> u32 {
        self.modulus.get()
    }

    /// Number of strictly-upper entries.
    pub fn entry_count(&self) -> usize {
        tri_len(self.n)
    }

    /// Build an element from signed entries (reduced mod p).
    pub fn from_entries(&self, entries: &[i64]) -> Result<UnitTriangular> {
        if entries.len() != self.entry_count() {
            return Err(Error::Domain(format!(
                "U_{}({}) elements have {} strictly-upper entries, got {}",
                self.n,
                self.p(),
                self.entry_count(),
                entries.len()
            )));
        }
        Ok(UnitTriangular {
            n: self.n,
            p: self.p(),
            entries: entries.iter().map(|&e| self.modulus.reduce(e)).collect(),
        })
    }

    /// `I + c·E_{i,i+1}` with 0-based `i`.
    pub fn elementary(&self, i: usize, c: i64) -> Result<UnitTriangular> {
        if i + 1 >= self.n {
            return Err(Error::Domain(format!(
                "superdiagonal index {i} out of range for n = {}",
                self.n
            )));
        }
        let mut x = self.identity();
        x.entries[offset(self.n, i, i + 1)] = self.modulus.reduce(c);
        Ok(x)
    }

    /// `I + c·E_{i,j}` with 0-based `i < j`.
    pub fn unit(&self, i: usize, j: usize, c: i64) -> Result<UnitTriangular> {
        if !(i < j && j < self.n) {
            return Err(Error::Domain(format!(
                "entry ({i},{j}) is not strictly upper for n = {}",
                self.n
            )));
        }
        let mut x = self.identity();
        x.entries[offset(self.n, i, j)] = self.modulus.reduce(c);
        Ok(x)
    }

    /// Column `i` of `u⁻¹`, i.e. the solution of `u v = e_i` (length i+1).
    fn inverse_column(&self, u: &UnitTriangular, i: usize) -> Vec<u32> {
        let m = self.modulus;
        let mut v = vec![0u32; i + 1];
        v[i] = 1;
        for r in (0..i).rev() {
            let mut acc = m.dot();
            for (k, &vk) in v.iter().enumerate().take(i + 1).skip(r + 1) {
                acc.add_product(u.get(r, k), vk);
            }
            v[r] = m.neg(acc.finish());
        }
        v
    }

    /// Rank-one data for `u⁻¹ (I + c E_{i,i+1}) u = I + c (u⁻¹e_i)(e_{i+1}ᵀu)`.
    fn rank_one_factors(&self, u: &UnitTriangular, i: usize) -> (Vec<u32>, Vec<u32>) {
        let v = self.inverse_column(u, i);
        // w_c = u_{i+1, c} for c > i+1, w_{i+1} = 1
        let w: Vec<u32> = (i + 1..self.n).map(|c| u.get(i + 1, c)).collect();
        (v, w)
    }

    /// `u⁻¹ s u` by the full product chain (reference path).
    pub fn conjugate_full(&self, s: &UnitTriangular, u: &UnitTriangular) -> UnitTriangular {
        let ui = self.inverse(u);
        let a = self.multiply(&ui, s);
        self.multiply(&a, u)
    }

    /// Image in the abelianization Z_p^{n-1}: the first superdiagonal.
    pub fn abelianize(&self, x: &UnitTriangular) -> Vec<u32> {
        x.superdiagonal()
    }
}

impl FiniteGroup for UnitriangularGroup {
    type Elem = UnitTriangular;

    fn identity(&self) -> UnitTriangular {
        UnitTriangular {
            n: self.n,
            p: self.p(),
            entries: vec![0; tri_len(self.n)].into_boxed_slice(),
        }
    }

    fn multiply(&self, x: &UnitTriangular, y: &UnitTriangular) -> UnitTriangular {
        debug_assert!(self.contains(x) && self.contains(y));
        let n = self.n;
        let m = self.modulus;
        let mut out = vec![0u32; tri_len(n)];
        for i in 0..n {
            for j in i + 1..n {
                let mut acc = m.dot();
                acc.add(x.entries[offset(n, i, j)]);
                acc.add(y.entries[offset(n, i, j)]);
                for k in i + 1..j {
                    let a = x.entries[offset(n, i, k)];
                    if a != 0 {
                        acc.add_product(a, y.entries[offset(n, k, j)]);
                    }
                }
                out[offset(n, i, j)] = acc.finish();
            }
        }
        UnitTriangular {
            n,
            p: self.p(),
            entries: out.into_boxed_slice(),
        }
    }

    fn inverse(&self, x: &UnitTriangular) -> UnitTriangular {
        // From x·y = I: y_ij = -(x_ij + Σ_{i<k<j} x_ik y_kj), rows bottom-up.
        let n = self.n;
        let m = self.modulus;
        let mut y = vec![0u32; tri_len(n)];
        for i in (0..n).rev() {
            for j in i + 1..n {
                let mut acc = m.dot();
                acc.add(x.entries[offset(n, i, j)]);
                for k in i + 1..j {
                    let a = x.entries[offset(n, i, k)];
                    if a != 0 {
                        acc.add_product(a, y[offset(n, k, j)]);
                    }
                }
                y[offset(n, i, j)] = m.neg(acc.finish());
            }
        }
        UnitTriangular {
            n,
            p: self.p(),
            entries: y.into_boxed_slice(),
        }
    }

    fn contains(&self, x: &UnitTriangular) -> bool {
        x.n == self.n
            && x.p == self.p()
            && x.entries.len() == tri_len(self.n)
            && x.entries.iter().all(|&e| e < x.p)
    }

    fn order(&self) -> Option<u128> {
        (self.p() as u128).checked_pow(u32::try_from(tri_len(self.n)).ok()?)
    }

    fn ln_order(&self) -> f64 {
        tri_len(self.n) as f64 * (self.p() as f64).ln()
    }

    fn uniform_element<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitTriangular {
        // Entries parameterize U_n(p) bijectively.
        let p = self.p();
        UnitTriangular {
            n: self.n,
            p,
            entries: (0..tri_len(self.n)).map(|_| rng.random_range(0..p)).collect(),
        }
    }

    fn label(&self) -> String {
        format!("U_{}({})", self.n, self.p())
    }

    fn conjugate(&self, s: &UnitTriangular, u: &UnitTriangular) -> UnitTriangular {
        let Some((i, c)) = s.as_elementary() else {
            return self.conjugate_full(s, u);
        };
        let n = self.n;
        let m = self.modulus;
        let (v, w) = self.rank_one_factors(u, i);
        let mut out = vec![0u32; tri_len(n)];
        for (r, &vr) in v.iter().enumerate() {
            if vr == 0 {
                continue;
            }
            let cv = m.mul(c, vr);
            for (off, &wc) in w.iter().enumerate() {
                out[offset(n, r, i + 1 + off)] = m.mul(cv, wc);
            }
        }
        UnitTriangular {
            n,
            p: self.p(),
            entries: out.into_boxed_slice(),
        }
    }

    fn mul_assign_conjugate(&self, x: &mut UnitTriangular, s: &UnitTriangular, u: &UnitTriangular) {
        let Some((i, c)) = s.as_elementary() else {
            let jump = self.conjugate_full(s, u);
            *x = self.multiply(x, &jump);
            return;
        };
        // x ← x + c (x v) wᵀ, with v supported on rows ≤ i and w on columns ≥ i+1.
        let n = self.n;
        let m = self.modulus;
        let (v, w) = self.rank_one_factors(u, i);
        let z: Vec<u32> = (0..=i)
            .map(|r| {
                let mut acc = m.dot();
                acc.add(v[r]);
                for (k, &vk) in v.iter().enumerate().skip(r + 1) {
                    acc.add_product(x.entries[offset(n, r, k)], vk);
                }
                acc.finish()
            })
            .collect();
        for (r, &zr) in z.iter().enumerate() {
            if zr == 0 {
                continue;
            }
            let cz = m.mul(c, zr);
            for (off, &wc) in w.iter().enumerate() {
                let e = &mut x.entries[offset(n, r, i + 1 + off)];
                *e = m.add(*e, m.mul(cz, wc));
            }
        }
    }
}

impl Enumerable for UnitriangularGroup {
    fn index_of(&self, x: &UnitTriangular) -> usize {
        let p = self.p() as usize;
        x.entries.iter().fold(0usize, |acc, &e| acc * p + e as usize)
    }

    fn element(&self, index: usize) -> UnitTriangular {
        let p = self.p() as usize;
        let len = tri_len(self.n);
        let mut entries = vec![0u32; len];
        let mut rest = index;
        for slot in entries.iter_mut().rev() {
            *slot = (rest % p) as u32;
            rest /= p;
        }
        UnitTriangular {
            n: self.n,
            p: self.p(),
            entries: entries.into_boxed_slice(),
        }
    }
}

impl ParseElement for UnitriangularGroup {
    fn parse_element(&self, spec: &ElementSpec) -> Result<UnitTriangular> {
        match spec {
            ElementSpec::Entries(e) => self.from_entries(e),
            ElementSpec::Index(i) => Err(Error::Domain(format!(
                "U_n(p) elements must be given as entry lists, got index {i}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(x: &UnitTriangular) -> Vec<Vec<u64>> {
        let n = x.dim();
        (0..n)
            .map(|i| (0..n).map(|j| x.get(i, j) as u64).collect())
            .collect()
    }

    fn dense_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
        let n = a.len();
        let mut c = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in 0..n {
                c[i][j] = (0..n).map(|k| a[i][k] * b[k][j]).sum::<u64>() % p;
            }
        }
        c
    }

    #[test]
    fn elementary_product_matches_hand_computation() {
        let g = UnitriangularGroup::new(3, 5).unwrap();
        let a = g.elementary(0, 1).unwrap();
        let b = g.elementary(1, 1).unwrap();
        let ab = g.multiply(&a, &b);
        // I + E12 + E23 + E13
        assert_eq!(ab.entries(), &[1, 1, 1]);
        assert_eq!(g.multiply(&ab, &g.identity()), ab);
    }

    #[test]
    fn multiply_agrees_with_dense_product() {
        let g = UnitriangularGroup::new(5, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = g.uniform_element(&mut rng);
            let y = g.uniform_element(&mut rng);
            assert_eq!(dense(&g.multiply(&x, &y)), dense_mul(&dense(&x), &dense(&y), 7));
        }
    }

    #[test]
    fn associativity_exhaustive_u3_2() {
        let g = UnitriangularGroup::new(3, 2).unwrap();
        let all: Vec<_> = (0..8).map(|i| g.element(i)).collect();
        for x in &all {
            for y in &all {
                for z in &all {
                    assert_eq!(
                        g.multiply(&g.multiply(x, y), z),
                        g.multiply(x, &g.multiply(y, z))
                    );
                }
            }
        }
    }

    #[test]
    fn associativity_random_u4_3() {
        let g = UnitriangularGroup::new(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let (x, y, z) = (
                g.uniform_element(&mut rng),
                g.uniform_element(&mut rng),
                g.uniform_element(&mut rng),
            );
            assert_eq!(
                g.multiply(&g.multiply(&x, &y), &z),
                g.multiply(&x, &g.multiply(&y, &z))
            );
        }
    }

    #[test]
    fn elementary_inverse() {
        let g = UnitriangularGroup::new(4, 9).unwrap();
        for i in 0..3 {
            for c in 1..9 {
                let x = g.elementary(i, c).unwrap();
                assert_eq!(g.inverse(&x), g.elementary(i, 9 - c).unwrap());
            }
        }
        assert_eq!(g.inverse(&g.identity()), g.identity());
    }

    #[test]
    fn inverse_two_sided_composite_modulus() {
        let g = UnitriangularGroup::new(5, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let x = g.uniform_element(&mut rng);
            let xi = g.inverse(&x);
            assert!(g.multiply(&x, &xi).is_identity());
            assert!(g.multiply(&xi, &x).is_identity());
        }
    }

    #[test]
    fn commutator_of_adjacent_generators() {
        for p in [2u64, 3, 5, 7] {
            let g = UnitriangularGroup::new(3, p).unwrap();
            let a = g.elementary(0, 1).unwrap();
            let b = g.elementary(1, 1).unwrap();
            assert_eq!(g.commutator(&a, &b), g.unit(0, 2, 1).unwrap());
            assert!(g.commutator(&a, &a).is_identity());
        }
    }

    /// `xyx⁻¹y⁻¹`, the mirrored convention.
    fn mirrored(g: &UnitriangularGroup, x: &UnitTriangular, y: &UnitTriangular) -> UnitTriangular {
        g.commutator(&g.inverse(x), &g.inverse(y))
    }

    #[test]
    fn commutator_expansion_identity() {
        // [x, zy] = [x, z][x, y][z, [y, x]]⁻¹ holds exactly for the
        // convention [x, y] = x y x⁻¹ y⁻¹
        let g = UnitriangularGroup::new(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let x = g.uniform_element(&mut rng);
            let y = g.uniform_element(&mut rng);
            let z = g.uniform_element(&mut rng);
            let lhs = mirrored(&g, &x, &g.multiply(&z, &y));
            let inner = g.inverse(&mirrored(&g, &z, &mirrored(&g, &y, &x)));
            let rhs = g.multiply(&g.multiply(&mirrored(&g, &x, &z), &mirrored(&g, &x, &y)), &inner);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn commutator_expansion_for_left_convention() {
        // with [x, y] = x⁻¹ y⁻¹ x y: [x, zy] = [x, y] · y⁻¹ [x, z] y
        let g = UnitriangularGroup::new(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..2000 {
            let x = g.uniform_element(&mut rng);
            let y = g.uniform_element(&mut rng);
            let z = g.uniform_element(&mut rng);
            let lhs = g.commutator(&x, &g.multiply(&z, &y));
            let rhs = g.multiply(&g.commutator(&x, &y), &g.conjugate(&g.commutator(&x, &z), &y));
            assert_eq!(lhs, rhs);
        }
        // in class 2 the three-term form holds for this convention as well
        let g3 = UnitriangularGroup::new(3, 5).unwrap();
        for _ in 0..500 {
            let x = g3.uniform_element(&mut rng);
            let y = g3.uniform_element(&mut rng);
            let z = g3.uniform_element(&mut rng);
            let lhs = g3.commutator(&x, &g3.multiply(&z, &y));
            let inner = g3.inverse(&g3.commutator(&z, &g3.commutator(&y, &x)));
            let rhs = g3.multiply(&g3.multiply(&g3.commutator(&x, &z), &g3.commutator(&x, &y)), &inner);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn conjugate_fast_path_matches_full_product() {
        let g = UnitriangularGroup::new(6, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let u = g.uniform_element(&mut rng);
            let i = rng.random_range(0..5);
            let c = rng.random_range(1..7);
            let s = g.elementary(i, c).unwrap();
            assert_eq!(g.conjugate(&s, &u), g.conjugate_full(&s, &u));
            let mut x = g.uniform_element(&mut rng);
            let expected = g.multiply(&x, &g.conjugate_full(&s, &u));
            g.mul_assign_conjugate(&mut x, &s, &u);
            assert_eq!(x, expected);
        }
        let s = g.elementary(2, 3).unwrap();
        assert_eq!(g.conjugate(&s, &g.identity()), s);
    }

    #[test]
    fn central_element_is_fixed_by_conjugation() {
        let g = UnitriangularGroup::new(3, 3).unwrap();
        let s = g.unit(0, 2, 1).unwrap();
        for idx in 0..27 {
            assert_eq!(g.conjugate(&s, &g.element(idx)), s);
        }
    }

    #[test]
    fn index_round_trip_and_order() {
        let g = UnitriangularGroup::new(3, 3).unwrap();
        for idx in 0..27 {
            assert_eq!(g.index_of(&g.element(idx)), idx);
        }
        assert_eq!(g.element(0), g.identity());
        assert!(g.element(5) < g.element(6));
        assert_eq!(g.order(), Some(27));
        assert_eq!(UnitriangularGroup::new(600, 6).unwrap().order(), None);
    }

    #[test]
    fn mismatched_groups_are_domain_errors() {
        let g = UnitriangularGroup::new(3, 5).unwrap();
        let h = UnitriangularGroup::new(3, 7).unwrap();
        let k = UnitriangularGroup::new(4, 5).unwrap();
        let x = g.elementary(0, 1).unwrap();
        assert!(matches!(g.try_multiply(&x, &h.identity()), Err(Error::Domain(_))));
        assert!(matches!(g.try_commutator(&x, &k.identity()), Err(Error::Domain(_))));
        assert!(g.try_conjugate(&x, &g.identity()).is_ok());
    }

    #[test]
    fn abelianize_reads_superdiagonal() {
        let g = UnitriangularGroup::new(3, 11).unwrap();
        let x = g.from_entries(&[5, 7, 0]).unwrap();
        assert_eq!(g.abelianize(&x), vec![5, 0]);
        assert_eq!(g.abelianize(&g.identity()), vec![0, 0]);
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let g = UnitriangularGroup::new(4, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = g.uniform_element(&mut rng);
        assert_eq!(g.pow(&x, -1), g.inverse(&x));
        assert_eq!(g.pow(&x, 3), g.multiply(&x, &g.multiply(&x, &x)));
        assert!(g.pow(&x, 0).is_identity());
        // exponent of U_4(5) divides 25
        assert!(g.pow(&x, 25).is_identity());
    }

    fn group_and_triple() -> impl Strategy<Value = (usize, u64, u64)> {
        (2usize..6, 2u64..12, any::<u64>())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn group_axioms_hold((n, p, seed) in group_and_triple()) {
            let g = UnitriangularGroup::new(n, p).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y, z) = (g.uniform_element(&mut rng), g.uniform_element(&mut rng), g.uniform_element(&mut rng));
            prop_assert_eq!(g.multiply(&g.multiply(&x, &y), &z), g.multiply(&x, &g.multiply(&y, &z)));
            prop_assert!(g.multiply(&x, &g.inverse(&x)).is_identity());
            prop_assert_eq!(g.multiply(&g.identity(), &x), x.clone());
            prop_assert_eq!(dense(&g.multiply(&x, &y)), dense_mul(&dense(&x), &dense(&y), p));
            prop_assert_eq!(g.element(g.index_of(&x)), x.clone());
            // x⁻¹y⁻¹xy = x⁻¹ · (y⁻¹xy)
            prop_assert_eq!(g.commutator(&x, &y), g.multiply(&g.inverse(&x), &g.conjugate(&x, &y)));
        }
    }
}
