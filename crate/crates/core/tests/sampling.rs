use nilwalk::group::{Enumerable, FiniteGroup, UnitriangularGroup};
use nilwalk::rng::stream;
use nilwalk::structure::Weight;
use nilwalk::walk::{build_nestoridi_walk, JumpDistribution};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson statistic against the given expected probabilities.
fn chi_square(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

fn critical(df: usize) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999)
}

#[test]
fn uniform_element_is_uniform() {
    for (n, p) in [(3, 2), (4, 2), (3, 5)] {
        let g = UnitriangularGroup::new(n, p).unwrap();
        let size = g.enumerable_size(1000).unwrap();
        let mut rng = stream(11, n as u64 * 100 + p);
        let mut counts = vec![0u64; size];
        for _ in 0..200 * size {
            counts[g.index_of(&g.uniform_element(&mut rng))] += 1;
        }
        let stat = chi_square(&counts, &vec![1.0 / size as f64; size]);
        assert!(stat < critical(size - 1), "U_{n}({p}): χ² = {stat}");
    }
}

#[test]
fn class_and_within_class_frequencies() {
    let g = UnitriangularGroup::new(3, 5).unwrap();
    let w = |a, b| Weight::new(a, b);
    let records = vec![
        (g.elementary(0, 1).unwrap(), w(1, 2)),
        (g.elementary(1, 2).unwrap(), w(1, 3)),
        (g.unit(0, 2, 1).unwrap(), w(1, 6)),
    ];
    let jd = JumpDistribution::from_class_weights(g.clone(), &records, 1000).unwrap();
    let members = jd.class_members(1000).unwrap();
    let weights: Vec<f64> = jd.decomposition().classes().iter().map(|c| c.weight_f64()).collect();
    let mut rng = stream(3, 0);
    let mut class_counts = vec![0u64; jd.k()];
    let mut member_counts: Vec<Vec<u64>> = members.iter().map(|m| vec![0; m.len()]).collect();
    for _ in 0..120_000 {
        let (c, u) = jd.sample_parts(&mut rng);
        class_counts[c] += 1;
        let x = g.index_of(&g.conjugate(jd.representative(c), &u));
        let pos = members[c].iter().position(|&m| m == x).expect("jump left its class");
        member_counts[c][pos] += 1;
    }
    assert!(chi_square(&class_counts, &weights) < critical(jd.k() - 1));
    for counts in &member_counts {
        let m = counts.len();
        if m > 1 {
            assert!(chi_square(counts, &vec![1.0 / m as f64; m]) < critical(m - 1));
        }
    }
}

#[test]
fn nestoridi_jumps_cover_both_magnitudes() {
    let (jd, params) = build_nestoridi_walk(4, 17).unwrap();
    assert_eq!((params.a, params.b), (5, 2));
    let mut rng = stream(5, 0);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..5000 {
        let x = jd.sample_jump(&mut rng);
        let sd = x.superdiagonal();
        let nz: Vec<u32> = sd.into_iter().filter(|&c| c != 0).collect();
        assert_eq!(nz.len(), 1);
        seen.insert(nz[0]);
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 2, 15, 16]);
}
