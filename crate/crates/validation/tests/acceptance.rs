//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p nilwalk-validation --test acceptance`. Exits non-zero
//! if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nilwalk::estimators::{
    collision_l2, lemma5ii_cases, verify_lemma4, verify_lemma5i, verify_lemma5ii, verify_prop3,
};
use nilwalk::exact::{
    build_kernel, build_quotient_kernel, for_each_time, heat_kernel, l2_to_uniform, mixing_time,
    pushforward_abelian, Metric, TransitionKernel,
};
use nilwalk::group::{Enumerable, UnitriangularGroup};
use nilwalk::spectral::{
    coordinate_eigenvalues, coordinate_law, cutoff_time, theorem1_bounds_unitriangular_exact,
    tv_lower_bound_time, CutoffWalk, ProductChain,
};
use nilwalk::structure::{lower_central_series, AbelianProjection, Weight};
use nilwalk::walk::{
    build_nestoridi_walk, build_superclass_walk, project_walk, JumpDistribution, StepLaw,
};

const TIME_TOL: f64 = 1e-4;
const EPSILONS: [f64; 3] = [0.05, 0.1, 0.25];
const LIMIT: usize = 100_000;
const L2_AGREEMENT: f64 = 1e-8;
const LAW_AGREEMENT: f64 = 1e-10;
const CUTOFF_SAMPLES: usize = 100_000;
const CUTOFF_HIGH: f64 = 0.95;
const CUTOFF_LOW: f64 = 0.10;
const ORACLE_SAMPLES: usize = 100_000;
const COLLISION_PAIRS: usize = 1_000_000;
const SIGMAS: f64 = 3.0;
const ASYMPTOTIC_SLACK: f64 = 1e-5;
const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

fn instances() -> Vec<(String, JumpDistribution<UnitriangularGroup>)> {
    let mut out: Vec<_> = [(3, 2), (3, 3), (3, 5), (4, 2), (4, 3)]
        .into_iter()
        .map(|(n, p)| (format!("U_{n}({p}) walk a"), build_superclass_walk(n, p).unwrap()))
        .collect();
    out.push(("U_3(17) walk b".into(), build_nestoridi_walk(3, 17).unwrap().0));
    out
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, jd) in instances() {
        let kernel = build_kernel(&jd, LIMIT).unwrap();
        for eps in EPSILONS {
            let r = theorem1_bounds_unitriangular_exact(&jd, eps, TIME_TOL, LIMIT).unwrap();
            let t = mixing_time(&kernel, eps, Metric::Tv, Some(TIME_TOL)).unwrap().estimate;
            let lower = r.lower_time.unwrap();
            checked += 1;
            if !(lower <= t + TIME_TOL && t <= r.upper_time + TIME_TOL) {
                failures.push(format!("{name} ε={eps}: {lower:.4} / {t:.4} / {:.4}", r.upper_time));
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(300);
    Outcome {
        pass: failures.is_empty() && in_time,
        detail: format!(
            "{checked} (instance, ε) pairs, {} violations{}, {:.1}s",
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(" [{}]", failures.join("; ")) },
            elapsed.as_secs_f64()
        ),
    }
}

fn cycle_kernel(law: &StepLaw) -> TransitionKernel {
    let p = law.p() as usize;
    let exact: Vec<(i64, Weight)> = law
        .steps()
        .iter()
        .map(|&(c, w)| (c as i64, Weight::approximate_float(w).unwrap()))
        .collect();
    TransitionKernel::from_exact_rows(p, |x| {
        exact.iter().map(|&(c, w)| (((x as i64 + c).rem_euclid(p as i64)) as usize, w)).collect()
    })
    .unwrap()
}

fn spectral_agreement() -> Outcome {
    let grid: Vec<f64> = (0..50).map(|i| 10f64.powf(-2.0 + 5.0 * i as f64 / 49.0)).collect();
    let mut worst_l2 = 0.0f64;
    for (_, jd) in instances() {
        let kernel = build_kernel(&jd, LIMIT).unwrap();
        let proj = AbelianProjection::superdiagonal(jd.group(), LIMIT).unwrap();
        let chain = ProductChain::new(project_walk(&jd).unwrap());
        for_each_time(&kernel, &grid, 1e-14, |t, d| {
            let ab = pushforward_abelian(d, &proj).unwrap();
            worst_l2 = worst_l2.max((l2_to_uniform(&ab) - chain.l2(t)).abs());
        })
        .unwrap();
    }
    let mut worst_law = 0.0f64;
    for p in 2..=12u64 {
        let mut laws = vec![StepLaw::uniform(p, &[1, -1]).unwrap()];
        if let Ok((jd, params)) = build_nestoridi_walk(3, p) {
            if !params.degenerate {
                laws.push(project_walk(&jd).unwrap().steps);
            }
        }
        for law in laws {
            let kernel = cycle_kernel(&law);
            for s in [0.01, 0.1, 1.0, 5.0, 25.0] {
                let exact = heat_kernel(&kernel, s, 1e-15).unwrap().probs;
                let q = coordinate_law(&law, s);
                for (a, b) in exact.iter().zip(&q) {
                    worst_law = worst_law.max((a - b).abs());
                }
            }
        }
    }
    Outcome {
        pass: worst_l2 <= L2_AGREEMENT && worst_law <= LAW_AGREEMENT,
        detail: format!("max ℓ² gap {worst_l2:.2e} (≤ {L2_AGREEMENT:e}), max coordinate-law gap {worst_law:.2e} (≤ {LAW_AGREEMENT:e})"),
    }
}

fn cutoff_trend(walk: CutoffWalk, p: u64) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    for m in [32usize, 128, 512] {
        let n = m + 1;
        let jd = match walk {
            CutoffWalk::A => build_superclass_walk(n, p).unwrap(),
            _ => build_nestoridi_walk(n, p).unwrap().0,
        };
        let chain = ProductChain::new(project_walk(&jd).unwrap());
        let tn = cutoff_time(walk, n, p).unwrap().time;
        let early = chain.tv_estimate(0.8 * tn, CUTOFF_SAMPLES, SEED).unwrap();
        let late = chain.tv_estimate(1.2 * tn, CUTOFF_SAMPLES, SEED + 1).unwrap();
        rows.push((m, early, late));
    }
    let monotone = rows.windows(2).all(|w| {
        let se_e = w[0].1.std_error.hypot(w[1].1.std_error);
        let se_l = w[0].2.std_error.hypot(w[1].2.std_error);
        w[1].1.estimate >= w[0].1.estimate - 2.0 * se_e && w[1].2.estimate <= w[0].2.estimate + 2.0 * se_l
    });
    let last = rows.last().unwrap();
    let sharp = last.1.estimate >= CUTOFF_HIGH && last.2.estimate <= CUTOFF_LOW;
    let elapsed = start.elapsed();
    let table: Vec<String> = rows
        .iter()
        .map(|(m, e, l)| format!("n-1={m}: {:.3}±{:.3} / {:.3}±{:.3}", e.estimate, e.std_error, l.estimate, l.std_error))
        .collect();
    Outcome {
        pass: monotone && sharp && elapsed < Duration::from_secs(120),
        detail: format!(
            "TV at 0.8·t_n / 1.2·t_n: {}; monotone={monotone}, thresholds (≥{CUTOFF_HIGH}, ≤{CUTOFF_LOW}) met={sharp}, {:.1}s",
            table.join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

fn estimator_oracle() -> Outcome {
    let chain = ProductChain::new(project_walk(&build_superclass_walk(4, 5).unwrap()).unwrap());
    let mut rows = Vec::new();
    let mut pass = true;
    for t in [1.0, 5.0, 20.0] {
        let exact = chain.tv_exact(t, 1_000_000).unwrap();
        let est = chain.tv_estimate(t, ORACLE_SAMPLES, SEED).unwrap();
        let z = (est.estimate - exact).abs() / est.std_error;
        pass &= z <= SIGMAS;
        rows.push(format!("t={t}: {:.5} vs {exact:.5} ({z:.2}σ)", est.estimate));
    }
    Outcome {
        pass,
        detail: rows.join(", "),
    }
}

fn lemma_suite() -> Outcome {
    let mut failed = Vec::new();
    let mut count = 0usize;
    for (n, p) in [(3, 3), (4, 2)] {
        let g = UnitriangularGroup::new(n, p).unwrap();
        let series = lower_central_series(&g, LIMIT).unwrap();
        let mut verdicts = vec![verify_lemma4(&g, &series).unwrap(), verify_prop3(&g, &series, 0, SEED).unwrap()];
        for idx in 0..series.group_size() {
            for level in 2..=series.class() {
                verdicts.push(verify_lemma5i(&g, &series, &g.element(idx), level).unwrap());
            }
        }
        for v in verdicts {
            count += 1;
            if !v.pass {
                failed.push(format!("{} on {}", serde_json::to_string(&v.lemma).unwrap(), v.group));
            }
        }
    }
    for p in 2..=7u32 {
        for m in 1..=3usize {
            for case in lemma5ii_cases(p, m).unwrap() {
                count += 1;
                if !verify_lemma5ii(p, m, &case).unwrap().pass {
                    failed.push(format!("lemma5ii Z_{p}^{m} {case:?}"));
                }
            }
        }
    }
    let g = UnitriangularGroup::new(4, 3).unwrap();
    let series = lower_central_series(&g, LIMIT).unwrap();
    let v = verify_prop3(&g, &series, 10_000, SEED).unwrap();
    count += 1;
    if !v.pass {
        failed.push(format!("prop3 on {}", v.group));
    }
    Outcome {
        pass: failed.is_empty(),
        detail: format!("{count} exact verdicts, {} failed{}", failed.len(), if failed.is_empty() { String::new() } else { format!(": {}", failed.join("; ")) }),
    }
}

fn collision() -> Outcome {
    let jd = build_superclass_walk(3, 3).unwrap();
    let kernel = build_kernel(&jd, LIMIT).unwrap();
    let mut rows = Vec::new();
    let mut pass = true;
    for (i, t) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let exact = l2_to_uniform(&heat_kernel(&kernel, t, 1e-14).unwrap().probs).powi(2);
        let est = collision_l2(&jd, t, COLLISION_PAIRS, SEED + i as u64).unwrap();
        let z = (est.estimate - exact).abs() / est.std_error;
        pass &= z <= SIGMAS;
        rows.push(format!("t={t}: {:.4} vs {exact:.4} ({z:.2}σ)", est.estimate));
    }
    Outcome {
        pass,
        detail: rows.join(", "),
    }
}

fn eq19_consistency() -> Outcome {
    let eps = (-1.0f64).exp();
    let mut rows = Vec::new();
    let mut pass = true;
    for (name, jd) in instances() {
        let n = jd.group().dim();
        let gap = coordinate_eigenvalues(&project_walk(&jd).unwrap().steps).gap;
        let bound = tv_lower_bound_time(n, gap, eps).unwrap();
        let proj = AbelianProjection::superdiagonal(jd.group(), LIMIT).unwrap();
        let quotient = build_quotient_kernel(&jd, &proj, LIMIT).unwrap();
        let t = mixing_time(&quotient, 1.0 - eps, Metric::Tv, Some(TIME_TOL)).unwrap().estimate;
        pass &= bound.time <= t + TIME_TOL;
        rows.push(format!("{name}: {:.4}{} ≤ {t:.4}", bound.time, if bound.vacuous { " (vacuous)" } else { "" }));
    }
    Outcome {
        pass,
        detail: rows.join(", "),
    }
}

fn asymptotic() -> Outcome {
    let (n, p) = (100usize, 10_000u64);
    let t = cutoff_time(CutoffWalk::A, n, p).unwrap().time;
    let m = (n - 1) as f64;
    let ratio = t * 4.0 * PI * PI / ((p * p) as f64 * m * m.ln());
    Outcome {
        pass: (1.0..=1.0 + ASYMPTOTIC_SLACK).contains(&ratio),
        detail: format!("ratio {ratio:.10} ∈ [1, 1 + {ASYMPTOTIC_SLACK:e}]"),
    }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("sandwich t_TV(G_ab,ε) ≤ t_TV(G,ε) ≤ upper", sandwich),
        ("spectral vs exact agreement", spectral_agreement),
        ("cutoff trend, walk a, p=6", || cutoff_trend(CutoffWalk::A, 6)),
        ("cutoff trend, walk b, p=17", || cutoff_trend(CutoffWalk::B, 17)),
        ("TV estimator vs exact enumeration", estimator_oracle),
        ("lemma suite", lemma_suite),
        ("collision estimator", collision),
        ("spectral lower bound consistency", eq19_consistency),
        ("asymptotic cutoff-time equivalence", asymptotic),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("criterion {} {}: {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
