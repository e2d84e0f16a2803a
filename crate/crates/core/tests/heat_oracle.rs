mod common;

use common::{cycle_kernel, expm_row0, l2_uniform, tv_uniform, RawU3, SymmetricHeat};
use nilwalk::exact::{build_kernel, heat_kernel, mixing_time, Metric};
use nilwalk::group::{Enumerable, UnitriangularGroup};
use nilwalk::spectral::coordinate_law;
use nilwalk::walk::{build_superclass_walk, StepLaw};

#[test]
fn raw_indexing_matches_library() {
    let g = UnitriangularGroup::new(3, 5).unwrap();
    let raw = RawU3 { p: 5 };
    for idx in 0..125 {
        let m = raw.matrix(idx);
        let e = g.element(idx);
        assert_eq!(e.entries(), &[m[0][1] as u32, m[0][2] as u32, m[1][2] as u32]);
    }
}

#[test]
fn uniformized_heat_kernel_matches_matrix_exponential() {
    for p in [2i64, 3, 5] {
        let raw = RawU3 { p };
        let dense = raw.transition(&raw.walk_a());
        let k = build_kernel(&build_superclass_walk(3, p as u64).unwrap(), 10_000).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let oracle = expm_row0(&dense, t);
            let h = heat_kernel(&k, t, 1e-14).unwrap();
            let err = oracle.iter().zip(&h.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-10, "p = {p}, t = {t}: {err:e}");
        }
    }
}

#[test]
fn mixing_time_matches_grid_scan() {
    let raw = RawU3 { p: 3 };
    let heat = SymmetricHeat::new(&raw.transition(&raw.walk_a()));
    let k = build_kernel(&build_superclass_walk(3, 3).unwrap(), 1000).unwrap();
    let step = 1e-3;
    for (metric, eps) in [(Metric::Tv, 0.25), (Metric::Tv, 0.05), (Metric::L2, 0.1)] {
        let d = |t: f64| {
            let row = heat.row0(t);
            match metric {
                Metric::Tv => tv_uniform(&row),
                Metric::L2 => l2_uniform(&row),
            }
        };
        let first = (0..).map(|i| i as f64 * step).find(|&t| d(t) <= eps).unwrap();
        let r = mixing_time(&k, eps, metric, Some(1e-4)).unwrap();
        assert!(
            r.estimate >= first - step - 1e-4 && r.estimate <= first + 1e-4,
            "{metric:?} {eps}: bisection {} vs grid {first}",
            r.estimate
        );
    }
}

#[test]
fn coordinate_law_matches_cycle_heat_kernel() {
    for p in 2..=12u64 {
        let mut laws = vec![vec![(1i64, 0.5), (-1, 0.5)]];
        if p >= 5 {
            laws.push(vec![(1, 0.25), (-1, 0.25), (2, 0.25), (-2, 0.25)]);
        }
        for law in laws {
            let dense = cycle_kernel(p as usize, &law);
            let steps = StepLaw::from_weights(p, &law).unwrap();
            for s in [0.05, 0.5, 2.0, 9.0] {
                let oracle = expm_row0(&dense, s);
                let q = coordinate_law(&steps, s);
                let err = oracle.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err <= 1e-10, "p = {p}, s = {s}: {err:e}");
            }
        }
    }
}
