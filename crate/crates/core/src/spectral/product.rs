//! The product chain on Z_p^{n−1}: every coordinate runs the same
//! symmetric walk at rate `1/(n−1)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use super::coordinate::{coordinate_eigenvalues, CoordinateSpectrum};
use crate::error::{Error, Result};
use crate::exact::{default_time_tol, Metric};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::rng::{blocks, stream, DEFAULT_BLOCK};
use crate::walk::AbelianWalkSpec;

/// Default cap on the number of orbit-count types enumerated for exact TV.
pub const DEFAULT_TYPE_LIMIT: u64 = 5_000_000;

/// A product chain with its coordinate spectrum precomputed.
#[derive(Debug, Clone, Serialize)]
pub struct ProductChain {
    pub spec: AbelianWalkSpec,
    pub spectrum: CoordinateSpectrum,
}

impl ProductChain {
    pub fn new(spec: AbelianWalkSpec) -> Self {
        let spectrum = coordinate_eigenvalues(&spec.steps);
        ProductChain { spec, spectrum }
    }

    pub fn coordinates(&self) -> usize {
        self.spec.coordinates
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    /// Coordinate time `s = t/(n−1)`.
    pub fn coordinate_time(&self, t: f64) -> f64 {
        t / self.coordinates() as f64
    }

    /// `ln |Z_p^{n−1}|`.
    pub fn ln_states(&self) -> f64 {
        self.coordinates() as f64 * (self.p() as f64).ln()
    }

    /// `d_ℓ²(t)` from `d² + 1 = Π (1 + d_i²)`, accumulated with `log1p`.
    pub fn l2(&self, t: f64) -> f64 {
        let di2 = self.spectrum.l2_squared(self.coordinate_time(t));
        (self.coordinates() as f64 * di2.ln_1p()).exp_m1().sqrt()
    }

    /// TV distance at `t = 0`: `1 − p^{−(n−1)}`.
    pub fn tv_at_zero(&self) -> f64 {
        -(-self.ln_states()).exp_m1()
    }

    /// Monte Carlo TV: draw `X ~ q_s^{⊗(n−1)}` and average
    /// `(1 − p^{−(n−1)} / Π q_s(X_i))₊`. Blocks of [`DEFAULT_BLOCK`]
    /// samples use RNG stream `block` under `seed`.
    pub fn tv_estimate(&self, t: f64, samples: usize, seed: u64) -> Result<TvEstimate> {
        if samples == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
        }
        if t == 0.0 {
            return Err(Error::DegenerateDensity {
                exact: self.tv_at_zero(),
            });
        }
        let q = self.spectrum.law(self.coordinate_time(t));
        let log_q: Vec<f64> = q.iter().map(|&v| v.ln()).collect();
        let sampler = WeightedIndex::new(&q)
            .map_err(|e| Error::Precision(format!("coordinate law unusable for sampling: {e}")))?;
        let ln_uniform = -self.ln_states();
        let coords = self.coordinates();
        let parts: Vec<(f64, f64)> = blocks(samples, DEFAULT_BLOCK)
            .into_par_iter()
            .map(|(b, len)| {
                let mut rng = stream(seed, b);
                let mut sum = CompensatedSum::new();
                let mut sq = CompensatedSum::new();
                for _ in 0..len {
                    let ln_density: f64 = compensated_sum((0..coords).map(|_| log_q[sampler.sample(&mut rng)]));
                    let v = (-(ln_uniform - ln_density).exp_m1()).max(0.0);
                    sum.add(v);
                    sq.add(v * v);
                }
                (sum.value(), sq.value())
            })
            .collect();
        let n = samples as f64;
        let mean = compensated_sum(parts.iter().map(|p| p.0)) / n;
        let second = compensated_sum(parts.iter().map(|p| p.1)) / n;
        let var = if samples > 1 {
            ((second - mean * mean) * n / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(TvEstimate {
            t,
            estimate: mean,
            std_error: (var / n).sqrt(),
            samples,
        })
    }

    /// Number of orbit-count types `C(n−1+r−1, r−1)` with `r = ⌊p/2⌋+1`.
    pub fn type_count(&self) -> f64 {
        let r = self.p() as usize / 2 + 1;
        let n = self.coordinates();
        // C(n + r − 1, r − 1) via a product, in floating point
        (1..r).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64)
    }

    /// Exact TV by grouping states by how many coordinates fall in each
    /// orbit `{x, −x}`; the density is constant on each such type.
    pub fn tv_exact(&self, t: f64, type_limit: u64) -> Result<f64> {
        let count = self.type_count();
        if count > type_limit as f64 {
            return Err(Error::Capacity {
                order: format!("{count:.0} types"),
                limit: type_limit as usize,
            });
        }
        let p = self.p() as usize;
        let q = self.spectrum.law(self.coordinate_time(t));
        // orbits x = 0..=p/2, sizes 1 or 2
        let orbits: Vec<(f64, f64)> = (0..=p / 2)
            .map(|x| {
                let size = if x == 0 || 2 * x == p { 1.0 } else { 2.0 };
                (size, q[x])
            })
            .collect();
        let n = self.coordinates();
        let ln_fact: Vec<f64> = std::iter::once(0.0)
            .chain((1..=n).scan(0.0, |acc, k| {
                *acc += (k as f64).ln();
                Some(*acc)
            }))
            .collect();
        let ln_uniform = -self.ln_states();
        let mut total = CompensatedSum::new();
        let mut counts = vec![0usize; orbits.len()];
        enumerate_types(&mut counts, 0, n, &mut |c: &[usize]| {
            // ln(#states of this type) and ln(density of each)
            let mut ln_states = ln_fact[n];
            let mut ln_density = 0.0;
            for (&k, &(size, qv)) in c.iter().zip(&orbits) {
                if k == 0 {
                    continue;
                }
                ln_states += k as f64 * size.ln() - ln_fact[k];
                ln_density += k as f64 * qv.ln();
            }
            let a = (ln_states + ln_density).exp();
            let b = (ln_states + ln_uniform).exp();
            total.add((a - b).abs());
        });
        Ok(0.5 * total.value())
    }

    /// Mixing time of the product chain by doubling and bisection on the
    /// closed-form ℓ² distance or the exact type-enumerated TV.
    pub fn mixing_time(
        &self,
        epsilon: f64,
        metric: Metric,
        time_tol: Option<f64>,
        type_limit: u64,
    ) -> Result<ProductMixingTime> {
        if !(epsilon > 0.0) || (metric == Metric::Tv && epsilon >= 1.0) {
            return Err(Error::InvalidArgument(format!("bad level {epsilon}")));
        }
        let d = |t: f64| -> Result<f64> {
            match metric {
                Metric::L2 => Ok(self.l2(t)),
                Metric::Tv => self.tv_exact(t, type_limit),
            }
        };
        if d(0.0)? <= epsilon {
            return Ok(ProductMixingTime {
                estimate: 0.0,
                lower: 0.0,
                upper: 0.0,
            });
        }
        let mut lower = 0.0;
        let mut upper = 1.0;
        while d(upper)? > epsilon {
            lower = upper;
            upper *= 2.0;
            if upper > 1e12 {
                return Err(Error::Divergence { cap: 1e12 });
            }
        }
        let tol = time_tol.unwrap_or_else(|| default_time_tol(upper));
        while upper - lower > tol {
            let mid = 0.5 * (lower + upper);
            if d(mid)? > epsilon {
                lower = mid;
            } else {
                upper = mid;
            }
        }
        Ok(ProductMixingTime {
            estimate: upper,
            lower,
            upper,
        })
    }
}

fn enumerate_types(counts: &mut [usize], slot: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
    if slot + 1 == counts.len() {
        counts[slot] = remaining;
        f(counts);
        return;
    }
    for k in 0..=remaining {
        counts[slot] = k;
        enumerate_types(counts, slot + 1, remaining - k, f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvEstimate {
    pub t: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductMixingTime {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `d_ℓ²(t)` for the product chain of `spec`.
pub fn product_l2(spec: &AbelianWalkSpec, t: f64) -> f64 {
    ProductChain::new(spec.clone()).l2(t)
}

/// Monte Carlo TV for the product chain of `spec`.
pub fn product_tv_estimate(spec: &AbelianWalkSpec, t: f64, samples: usize, seed: u64) -> Result<TvEstimate> {
    ProductChain::new(spec.clone()).tv_estimate(t, samples, seed)
}

/// Exact TV for the product chain of `spec`.
pub fn product_tv_exact(spec: &AbelianWalkSpec, t: f64) -> Result<f64> {
    ProductChain::new(spec.clone()).tv_exact(t, DEFAULT_TYPE_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::StepLaw;

    fn chain(coords: usize, p: u64) -> ProductChain {
        ProductChain::new(AbelianWalkSpec::new(coords, StepLaw::uniform(p, &[1, -1]).unwrap()).unwrap())
    }

    /// TV by listing every state.
    fn brute_tv(c: &ProductChain, t: f64) -> f64 {
        let p = c.p() as usize;
        let q = c.spectrum.law(c.coordinate_time(t));
        let states = p.pow(c.coordinates() as u32);
        let u = 1.0 / states as f64;
        let mut total = 0.0;
        for mut idx in 0..states {
            let mut d = 1.0;
            for _ in 0..c.coordinates() {
                d *= q[idx % p];
                idx /= p;
            }
            total += (d - u).abs();
        }
        0.5 * total
    }

    #[test]
    fn single_coordinate_l2_is_coordinate_sum() {
        let c = chain(1, 7);
        for t in [0.3, 2.0, 9.0] {
            assert!((c.l2(t).powi(2) - c.spectrum.l2_squared(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn l2_strictly_decreasing() {
        let c = chain(9, 6);
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let v = c.l2(0.5 * k as f64);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn exact_tv_matches_brute_force() {
        for (coords, p) in [(3, 5), (2, 6), (4, 3), (2, 17)] {
            let c = chain(coords, p);
            for t in [0.5, 1.0, 5.0, 20.0] {
                let a = c.tv_exact(t, 1_000_000).unwrap();
                let b = brute_tv(&c, t);
                assert!((a - b).abs() < 1e-13, "coords={coords} p={p} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn tv_at_zero_is_degenerate() {
        let c = chain(3, 5);
        assert_eq!(
            c.tv_estimate(0.0, 10, 1).unwrap_err(),
            Error::DegenerateDensity {
                exact: 1.0 - 1.0 / 125.0
            }
        );
    }

    #[test]
    fn estimate_is_reproducible() {
        let c = chain(8, 6);
        let a = c.tv_estimate(10.0, 10_000, 42).unwrap();
        let b = c.tv_estimate(10.0, 10_000, 42).unwrap();
        assert_eq!(a, b);
        let small = c.tv_estimate(1e-3, 2_000, 1).unwrap();
        let exact0 = c.tv_at_zero();
        assert!((small.estimate - exact0).abs() <= 3.0 * small.std_error + 1e-2);
    }

    #[test]
    fn type_limit_is_enforced() {
        let c = chain(500, 17);
        assert!(matches!(c.tv_exact(1.0, 1000), Err(Error::Capacity { .. })));
    }
}
