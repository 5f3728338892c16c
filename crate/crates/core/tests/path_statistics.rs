//! Monte-Carlo checks on sampled Brownian paths.

use rough_hj::paths::{reduce_path, sample_path, PathEnsembleSpec, PathKind};

fn mean_range(n: usize, seeds: std::ops::Range<u64>) -> f64 {
    let count = (seeds.end - seeds.start) as f64;
    seeds
        .map(|seed| {
            let p = sample_path(&PathEnsembleSpec::new(seed, 1.0, n, PathKind::Brownian)).unwrap();
            let (hi, lo) = p.running_extrema(1.0).unwrap();
            hi - lo
        })
        .sum::<f64>()
        / count
}

#[test]
fn expected_range_matches_the_fine_grid_harness() {
    let coarse = mean_range(4096, 0..1000);
    // same harness at n = 2^16, on disjoint seeds
    let fine = mean_range(1 << 16, 10_000..11_000);
    assert!((coarse - fine).abs() <= 0.1 * fine, "{coarse} vs {fine}");
    // E[max − min] = 2·sqrt(2/π) in the continuum
    let exact = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
    assert!((fine - exact).abs() <= 0.05 * exact, "{fine} vs {exact}");
}

#[test]
fn reduced_variation_has_a_decaying_tail() {
    let mut tv: Vec<f64> = (0..500u64)
        .map(|seed| {
            let p = sample_path(&PathEnsembleSpec::new(seed, 1.0, 4096, PathKind::Brownian)).unwrap();
            let r = reduce_path(&p, 1.0).unwrap();
            r.total_variation(0.0, 1.0).unwrap()
        })
        .collect();
    tv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p99 = tv[(0.99 * (tv.len() - 1) as f64) as usize];
    assert!(p99.is_finite());
    let tail = |x: f64| (tv.iter().filter(|&&v| v > x).count() as f64 / tv.len() as f64).ln();
    assert!(tail(4.0).is_finite());
    assert!(tail(8.0) < tail(4.0), "{} {}", tail(8.0), tail(4.0));
}

#[test]
fn sampling_is_reproducible() {
    let spec = PathEnsembleSpec::new(42, 2.0, 512, PathKind::Brownian).with_components(2);
    let (a, b) = (sample_path(&spec).unwrap(), sample_path(&spec).unwrap());
    assert_eq!(a.to_csv(), b.to_csv());
    assert_ne!(a.values(0), a.values(1));
}
