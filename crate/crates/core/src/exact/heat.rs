//! The heat kernel `P_t = Σ_k e^{−t} t^k/k! P^k` by uniformization.

use super::kernel::TransitionKernel;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Default truncation tolerance (mass dropped from the Poisson mixture).
pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest number of kernel powers any single evaluation may use.
pub const MAX_TERMS: usize = 1_000_000;

/// Poisson(t) weights restricted to `lo..=hi`, with total dropped mass.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWindow {
    pub lo: usize,
    pub weights: Vec<f64>,
    pub dropped: f64,
}

impl PoissonWindow {
    pub fn hi(&self) -> usize {
        self.lo + self.weights.len() - 1
    }
}

/// Truncate Poisson(t) so at most `tol` mass is dropped, split between the
/// two tails. Weights are formed in log space so large `t` cannot underflow
/// the mode.
pub fn poisson_window(t: f64, tol: f64) -> Result<PoissonWindow> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    if t == 0.0 {
        return Ok(PoissonWindow {
            lo: 0,
            weights: vec![1.0],
            dropped: 0.0,
        });
    }
    let ln_t = t.ln();
    let cutoff = tol.ln() - 40.0;
    let mut logs = vec![-t];
    let mut k = 0usize;
    loop {
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::Precision(format!(
                "t = {t} needs more than {MAX_TERMS} kernel powers; raise the tolerance or shorten the horizon"
            )));
        }
        let next = logs[k - 1] + ln_t - (k as f64).ln();
        logs.push(next);
        if k as f64 > t && next < cutoff {
            break;
        }
    }
    // The recursion drifts by O(k·ulp) in log space; renormalizing removes
    // the drift from the total, leaving only relative errors between terms.
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = logs.iter().map(|&l| (l - peak).exp()).collect();
    let total = compensated_sum(w.iter().copied());
    w.iter_mut().for_each(|x| *x /= total);
    let half = 0.5 * tol;
    let mut lo = 0;
    let mut left = 0.0;
    while lo < w.len() && left + w[lo] <= half {
        left += w[lo];
        lo += 1;
    }
    let mut hi = w.len() - 1;
    let mut right = 0.0;
    while hi > lo && right + w[hi] <= half {
        right += w[hi];
        hi -= 1;
    }
    if hi + 1 > MAX_TERMS {
        return Err(Error::Precision(format!(
            "t = {t} needs {} kernel powers (cap {MAX_TERMS})",
            hi + 1
        )));
    }
    Ok(PoissonWindow {
        lo,
        weights: w[lo..=hi].to_vec(),
        dropped: left + right,
    })
}

/// A distribution `δ_0 P_t` that can be pushed forward in time.
#[derive(Debug, Clone)]
pub struct Evolver<'a> {
    kernel: &'a TransitionKernel,
    tol: f64,
    time: f64,
    dist: Vec<f64>,
    dropped: f64,
    powers: usize,
}

impl<'a> Evolver<'a> {
    /// Point mass at state 0 (the identity) at time 0.
    pub fn new(kernel: &'a TransitionKernel, tol: f64) -> Self {
        let mut dist = vec![0.0; kernel.states()];
        dist[0] = 1.0;
        Evolver {
            kernel,
            tol,
            time: 0.0,
            dist,
            dropped: 0.0,
            powers: 0,
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn distribution(&self) -> &[f64] {
        &self.dist
    }

    /// Upper bound on the ℓ¹ mass lost to truncation so far.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped
    }

    /// Total kernel applications so far.
    pub fn powers(&self) -> usize {
        self.powers
    }

    /// Move forward by `dt ≥ 0` using the semigroup property.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        if dt == 0.0 {
            return Ok(());
        }
        let window = poisson_window(dt, self.tol)?;
        let m = self.kernel.states();
        let mut v = std::mem::take(&mut self.dist);
        let mut next = vec![0.0; m];
        let mut acc = vec![0.0; m];
        for k in 0..=window.hi() {
            if k >= window.lo {
                let w = window.weights[k - window.lo];
                for (a, &x) in acc.iter_mut().zip(&v) {
                    *a += w * x;
                }
            }
            if k < window.hi() {
                self.kernel.apply(&v, &mut next);
                std::mem::swap(&mut v, &mut next);
                self.powers += 1;
            }
        }
        self.dist = acc;
        self.dropped += window.dropped;
        self.time += dt;
        Ok(())
    }

    /// Advance to absolute time `t ≥ self.time()`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if t < self.time {
            return Err(Error::InvalidArgument(format!(
                "cannot evolve backwards from {} to {t}",
                self.time
            )));
        }
        self.advance(t - self.time)
    }
}

/// `δ_id P_t`, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernel {
    pub t: f64,
    pub probs: Vec<f64>,
    pub terms: usize,
    pub dropped_mass: f64,
}

pub fn heat_kernel(kernel: &TransitionKernel, t: f64, tol: f64) -> Result<HeatKernel> {
    let mut ev = Evolver::new(kernel, tol);
    ev.advance(t)?;
    Ok(HeatKernel {
        t,
        terms: ev.powers() + 1,
        dropped_mass: ev.dropped_mass(),
        probs: ev.dist,
    })
}

/// Evaluate `f(t, δ_id P_t)` at increasing times, evolving incrementally.
pub fn for_each_time<F>(kernel: &TransitionKernel, times: &[f64], tol: f64, mut f: F) -> Result<()>
where
    F: FnMut(f64, &[f64]),
{
    let mut ev = Evolver::new(kernel, tol);
    for &t in times {
        ev.advance_to(t)?;
        f(t, ev.distribution());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::build_kernel;
    use crate::walk::build_superclass_walk;

    #[test]
    fn window_drops_at_most_tol() {
        for t in [0.1, 1.0, 7.5, 100.0, 5000.0] {
            let w = poisson_window(t, 1e-12).unwrap();
            let kept = compensated_sum(w.weights.iter().copied());
            assert!(w.dropped <= 1e-12);
            assert!((kept + w.dropped - 1.0).abs() < 1e-12, "t={t}");
        }
        assert_eq!(poisson_window(0.0, 1e-12).unwrap().weights, vec![1.0]);
    }

    #[test]
    fn too_many_terms_is_precision_error() {
        assert!(matches!(poisson_window(2e6, 1e-12), Err(Error::Precision(_))));
    }

    #[test]
    fn time_zero_is_point_mass() {
        let jd = build_superclass_walk(3, 3).unwrap();
        let k = build_kernel(&jd, 1000).unwrap();
        let h = heat_kernel(&k, 0.0, 1e-12).unwrap();
        assert_eq!(h.probs[0], 1.0);
        assert!(h.probs[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn incremental_matches_direct() {
        let jd = build_superclass_walk(3, 3).unwrap();
        let k = build_kernel(&jd, 1000).unwrap();
        let direct = heat_kernel(&k, 3.7, 1e-13).unwrap();
        let mut ev = Evolver::new(&k, 1e-13);
        for dt in [0.5, 1.2, 2.0] {
            ev.advance(dt).unwrap();
        }
        for (a, b) in ev.distribution().iter().zip(&direct.probs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
