//! Cutoff times, the spectral TV lower bound and the abelianization
//! sandwich `t_TV(G_ab, ε) ≤ t_TV(G, ε) ≤ max{t_ℓ²(G_ab, ε/2), μ*⁻¹(ln k + 2 ln(4/ε))}`.

use std::f64::consts::TAU;

use serde::Serialize;

use super::coordinate::coordinate_eigenvalues_for;
use super::product::{ProductChain, DEFAULT_TYPE_LIMIT};
use crate::error::{Error, Result};
use crate::exact::{build_quotient_kernel, mixing_time, Metric};
use crate::group::{Enumerable, UnitriangularGroup};
use crate::numeric::one_minus_cos;
use crate::structure::{lower_central_series, AbelianProjection};
use crate::walk::{project_walk, JumpDistribution, NestoridiParams, WalkKind};

/// Which superclass walk a cutoff time refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffWalk {
    A,
    /// Walk (b) with `b = ⌊√a⌋`.
    B,
    /// Walk (b) with jumps `±m` in place of `±b`.
    BMagnitude(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffTime {
    pub time: f64,
    /// The corollary assumes `p ≥ 6`.
    pub p_below_6: bool,
}

/// `t_n` for walk (a): `(n−1) ln(n−1) / (2(1 − cos(2π/p)))`; walk (b):
/// `(n−1) ln(n−1) / ((1 − cos(2π/p)) + (1 − cos(2πb/p)))`.
pub fn cutoff_time(walk: CutoffWalk, n: usize, p: u64) -> Result<CutoffTime> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cutoff time needs n >= 3, got {n}")));
    }
    if p < 2 {
        return Err(Error::InvalidArgument(format!("modulus must be >= 2, got {p}")));
    }
    let m = (n - 1) as f64;
    let base = one_minus_cos(TAU / p as f64);
    let denom = match walk {
        CutoffWalk::A => 2.0 * base,
        CutoffWalk::B => base + one_minus_cos(TAU * (NestoridiParams::new(p).b % p) as f64 / p as f64),
        CutoffWalk::BMagnitude(c) => base + one_minus_cos(TAU * (c % p) as f64 / p as f64),
    };
    Ok(CutoffTime {
        time: m * m.ln() / denom,
        p_below_6: p < 6,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundTime {
    pub time: f64,
    pub vacuous: bool,
}

/// `(n−1)/(2γ) · (ln(n−1) − ln(8 ln(1/ε)))`, a lower bound on
/// `t_TV(G, 1 − ε)`; 0 and flagged vacuous when the bracket is ≤ 0.
pub fn tv_lower_bound_time(n: usize, gap: f64, epsilon: f64) -> Result<LowerBoundTime> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    if n < 2 || !(gap > 0.0) {
        return Err(Error::InvalidArgument(format!("need n >= 2 and γ > 0, got n = {n}, γ = {gap}")));
    }
    let m = (n - 1) as f64;
    let bracket = m.ln() - (8.0 * (1.0 / epsilon).ln()).ln();
    if bracket <= 0.0 {
        return Ok(LowerBoundTime {
            time: 0.0,
            vacuous: true,
        });
    }
    Ok(LowerBoundTime {
        time: m / (2.0 * gap) * bracket,
        vacuous: false,
    })
}

/// `μ*⁻¹ (ln k + 2 ln(4/ε))`.
pub fn plumbing_time(mu_star: f64, k: usize, epsilon: f64) -> f64 {
    ((k as f64).ln() + 2.0 * (4.0 / epsilon).ln()) / mu_star
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveBranch {
    L2,
    Plumbing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundPath {
    /// Exact evolution of the quotient chain on `G_ab`.
    Exact,
    /// Closed forms for the product chain on Z_p^{n−1}.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BoundFlags {
    pub degenerate_b: bool,
    pub p_below_6: bool,
    pub vacuous_lower: bool,
}

/// Both sides of the sandwich at level ε, with the associated formulas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub epsilon: f64,
    /// `t_TV(G_ab, ε)`; `None` when too many states to evaluate.
    pub lower_time: Option<f64>,
    pub upper_time: f64,
    pub active_branch: ActiveBranch,
    /// `t_ℓ²(G_ab, ε/2)`.
    pub l2_time: f64,
    /// `μ*⁻¹ (ln k + 2 ln(4/ε))`.
    pub plumbing_time: f64,
    pub mu_star: f64,
    pub k: usize,
    /// Corollary cutoff time, for the two superclass walks with n ≥ 3.
    pub cutoff_time: Option<f64>,
    /// Spectral lower bound on `t_TV(G, ε)`, i.e. the `1 − ε` form applied
    /// at parameter `1 − ε`.
    pub eq19_time: Option<f64>,
    pub path: BoundPath,
    pub time_tol: f64,
    pub flags: BoundFlags,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

fn finish(
    epsilon: f64,
    lower: Option<f64>,
    l2_time: f64,
    mu_star: f64,
    k: usize,
    path: BoundPath,
    time_tol: f64,
) -> BoundReport {
    let plumbing = plumbing_time(mu_star, k, epsilon);
    let (upper, branch) = if l2_time >= plumbing {
        (l2_time, ActiveBranch::L2)
    } else {
        (plumbing, ActiveBranch::Plumbing)
    };
    BoundReport {
        epsilon,
        lower_time: lower,
        upper_time: upper,
        active_branch: branch,
        l2_time,
        plumbing_time: plumbing,
        mu_star,
        k,
        cutoff_time: None,
        eq19_time: None,
        path,
        time_tol,
        flags: BoundFlags::default(),
    }
}

/// Cutoff time and spectral lower bound for walks built from superdiagonal
/// generators on U_n(p).
fn annotate(report: &mut BoundReport, jd: &JumpDistribution<UnitriangularGroup>) -> Result<()> {
    let g = jd.group();
    let (n, p) = (g.dim(), g.p() as u64);
    report.flags.p_below_6 = p < 6;
    let walk = match jd.kind() {
        WalkKind::Superclass => Some(CutoffWalk::A),
        WalkKind::Nestoridi(q) => {
            report.flags.degenerate_b = q.degenerate;
            Some(if q.magnitude == q.b { CutoffWalk::B } else { CutoffWalk::BMagnitude(q.magnitude) })
        }
        WalkKind::Custom => None,
    };
    if let (Some(w), true) = (walk, n >= 3) {
        report.cutoff_time = Some(cutoff_time(w, n, p)?.time);
    }
    if let Ok(spec) = project_walk(jd) {
        let gap = super::coordinate::coordinate_eigenvalues(&spec.steps).gap;
        let lb = tv_lower_bound_time(n, gap, 1.0 - report.epsilon)?;
        report.eq19_time = Some(lb.time);
        report.flags.vacuous_lower = lb.vacuous;
    }
    Ok(())
}

/// The sandwich on an enumerated group, with `G_ab` the quotient by
/// `[G, G]` taken from the lower central series. Refuses non-nilpotent
/// groups.
pub fn theorem1_bounds_exact<G: Enumerable>(
    jd: &JumpDistribution<G>,
    epsilon: f64,
    time_tol: f64,
    limit: usize,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    let series = lower_central_series(jd.group(), limit)?;
    let projection = AbelianProjection::from_series(&series);
    exact_with_projection(jd, &projection, epsilon, time_tol, limit)
}

fn exact_with_projection<G: Enumerable>(
    jd: &JumpDistribution<G>,
    projection: &AbelianProjection,
    epsilon: f64,
    time_tol: f64,
    limit: usize,
) -> Result<BoundReport> {
    let quotient = build_quotient_kernel(jd, projection, limit)?;
    let lower = mixing_time(&quotient, epsilon, Metric::Tv, Some(time_tol))?.estimate;
    let l2 = mixing_time(&quotient, epsilon / 2.0, Metric::L2, Some(time_tol))?.estimate;
    Ok(finish(epsilon, Some(lower), l2, jd.mu_star(), jd.k(), BoundPath::Exact, time_tol))
}

/// The sandwich for a walk on U_n(p) when the group is small enough to
/// enumerate; the abelianization is read off the superdiagonal.
pub fn theorem1_bounds_unitriangular_exact(
    jd: &JumpDistribution<UnitriangularGroup>,
    epsilon: f64,
    time_tol: f64,
    limit: usize,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    let projection = AbelianProjection::superdiagonal(jd.group(), limit)?;
    let mut report = exact_with_projection(jd, &projection, epsilon, time_tol, limit)?;
    annotate(&mut report, jd)?;
    Ok(report)
}

/// The sandwich for a superdiagonal-generator walk on U_n(p) of any size,
/// using the product-chain closed forms. The TV side is evaluated exactly
/// when the type enumeration fits in `type_limit`, else left empty.
pub fn theorem1_bounds_spectral(
    jd: &JumpDistribution<UnitriangularGroup>,
    epsilon: f64,
    time_tol: f64,
    type_limit: u64,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    let chain = ProductChain::new(project_walk(jd)?);
    let lower = match chain.mixing_time(epsilon, Metric::Tv, Some(time_tol), type_limit) {
        Ok(r) => Some(r.estimate),
        Err(Error::Capacity { .. }) => None,
        Err(e) => return Err(e),
    };
    let l2 = chain
        .mixing_time(epsilon / 2.0, Metric::L2, Some(time_tol), type_limit)?
        .estimate;
    let mut report = finish(epsilon, lower, l2, jd.mu_star(), jd.k(), BoundPath::Spectral, time_tol);
    annotate(&mut report, jd)?;
    Ok(report)
}

/// Exact path when `|G| ≤ limit`, spectral path otherwise.
pub fn theorem1_bounds(
    jd: &JumpDistribution<UnitriangularGroup>,
    epsilon: f64,
    time_tol: f64,
    limit: usize,
) -> Result<BoundReport> {
    match jd.group().enumerable_size(limit) {
        Ok(_) => theorem1_bounds_unitriangular_exact(jd, epsilon, time_tol, limit),
        Err(Error::Capacity { .. }) => theorem1_bounds_spectral(jd, epsilon, time_tol, DEFAULT_TYPE_LIMIT),
        Err(e) => Err(e),
    }
}

/// Spectral gap of walk (a) or (b) on Z_p.
pub fn walk_gap(walk: CutoffWalk, p: u64) -> Result<f64> {
    let steps: Vec<i64> = match walk {
        CutoffWalk::A => vec![1, -1],
        CutoffWalk::B => {
            let b = NestoridiParams::new(p).b as i64;
            vec![1, -1, b, -b]
        }
        CutoffWalk::BMagnitude(m) => vec![1, -1, m as i64, -(m as i64)],
    };
    Ok(coordinate_eigenvalues_for(p, &steps)?.gap)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{build_nestoridi_walk, build_superclass_walk};

    #[test]
    fn cutoff_a_p6() {
        let t = cutoff_time(CutoffWalk::A, 101, 6).unwrap();
        assert!((t.time - 100.0 * 100f64.ln()).abs() < 1e-9);
        assert!((t.time - 460.517).abs() < 1e-3);
        assert!(!t.p_below_6);
        assert!(cutoff_time(CutoffWalk::A, 2, 6).is_err());
        assert!(cutoff_time(CutoffWalk::A, 10, 5).unwrap().p_below_6);
    }

    #[test]
    fn cutoff_b_with_b1_equals_a() {
        for p in [6, 7, 11] {
            let a = cutoff_time(CutoffWalk::A, 50, p).unwrap().time;
            let b = cutoff_time(CutoffWalk::B, 50, p).unwrap().time;
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn large_p_asymptotics() {
        let p = 10_000u64;
        let n = 100;
        let t = cutoff_time(CutoffWalk::A, n, p).unwrap().time;
        let ratio = t * TAU * TAU / ((p * p) as f64 * 99.0 * 99f64.ln());
        assert!((1.0..=1.0 + 1e-6).contains(&ratio), "{ratio}");
    }

    #[test]
    fn eq19_examples() {
        let gap = walk_gap(CutoffWalk::A, 6).unwrap();
        assert!((gap - 0.5).abs() < 1e-15);
        let e = (-1.0f64).exp();
        let lb = tv_lower_bound_time(101, gap, e).unwrap();
        assert!((lb.time - 100.0 * (100f64.ln() - 8f64.ln())).abs() < 1e-9);
        assert!((lb.time - 252.57).abs() < 0.01);
        let vac = tv_lower_bound_time(3, gap, e).unwrap();
        assert!(vac.vacuous && vac.time == 0.0);
        assert!(tv_lower_bound_time(10, gap, 1.0).is_err());
    }

    #[test]
    fn plumbing_term_u3_3() {
        let v = plumbing_time(0.25, 4, 0.25);
        assert!((v - 4.0 * (4f64.ln() + 2.0 * 16f64.ln())).abs() < 1e-12);
        assert!((v - 27.73).abs() < 0.01);
    }

    #[test]
    fn report_on_u3_3() {
        let jd = build_superclass_walk(3, 3).unwrap();
        let r = theorem1_bounds(&jd, 0.25, 1e-4, 1000).unwrap();
        assert_eq!(r.path, BoundPath::Exact);
        assert_eq!(r.k, 4);
        assert_eq!(r.mu_star, 0.25);
        assert!(r.lower_time.unwrap() <= r.upper_time);
        assert!(r.flags.p_below_6 && r.flags.vacuous_lower);
        assert!(theorem1_bounds(&jd, 1.5, 1e-4, 1000).is_err());
    }

    #[test]
    fn exact_and_spectral_paths_agree() {
        for jd in [build_superclass_walk(3, 5).unwrap(), build_nestoridi_walk(3, 17).unwrap().0] {
            let a = theorem1_bounds_unitriangular_exact(&jd, 0.1, 1e-4, 10_000).unwrap();
            let b = theorem1_bounds_spectral(&jd, 0.1, 1e-4, 1_000_000).unwrap();
            assert!((a.lower_time.unwrap() - b.lower_time.unwrap()).abs() <= 2e-4);
            assert!((a.l2_time - b.l2_time).abs() <= 2e-4);
            assert_eq!(a.active_branch, b.active_branch);
        }
    }

    #[test]
    fn large_walk_uses_spectral_path() {
        let jd = build_superclass_walk(101, 6).unwrap();
        let r = theorem1_bounds(&jd, 0.25, 1e-3, 200_000).unwrap();
        assert_eq!(r.path, BoundPath::Spectral);
        assert!((r.cutoff_time.unwrap() - 460.517).abs() < 1e-3);
        assert!(r.lower_time.unwrap() <= r.upper_time);
    }
}
