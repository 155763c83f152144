use quadstab::arith::primes_up_to;
use quadstab::census::{census_scan, is_stable_mod_p, resumable_segments, CensusOptions};
use quadstab::modpoly::{iterate_mod, reduce};
use quadstab::quadmap::QuadMapZ;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn irreducible(f: &QuadMapZ, n: u32, p: u64) -> bool {
    iterate_mod(&reduce(f, p).unwrap(), n, 64).unwrap().is_irreducible()
}

#[test]
fn report_does_not_depend_on_workers() {
    let f = QuadMapZ::from_i64(0, -2);
    let mut opts = CensusOptions::new(100_000);
    opts.segment_size = 1 << 13;
    let one = serde_json::to_string(&census_scan(&f, &opts).unwrap()).unwrap();
    opts.workers = 3;
    let three = serde_json::to_string(&census_scan(&f, &opts).unwrap()).unwrap();
    assert_eq!(one, three);
}

#[test]
fn stable_primes_have_irreducible_iterates() {
    for (gamma, m) in [(0, 1), (0, -2), (3, 2), (-5, 7)] {
        let f = QuadMapZ::from_i64(gamma, m);
        let r = census_scan(&f, &CensusOptions::new(3000)).unwrap();
        for &p in &r.stable_primes {
            for n in 1..=6 {
                assert!(irreducible(&f, n, p), "f = {f:?}, p = {p}, n = {n}");
            }
        }
    }
}

#[test]
fn failing_index_is_a_reducible_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let primes: Vec<u64> = primes_up_to(500).skip(1).collect();
    let mut checked = 0;
    while checked < 200 {
        let f = QuadMapZ::from_i64(rng.gen_range(-500..500), rng.gen_range(-500..500));
        let p = primes[rng.gen_range(0..primes.len())];
        let v = is_stable_mod_p(&f, p).unwrap();
        let Some(i) = v.failing_index.filter(|&i| i <= 6) else { continue };
        assert!(!irreducible(&f, i, p), "f = {f:?}, p = {p}, i = {i}");
        if i > 1 {
            assert!(irreducible(&f, i - 1, p), "f = {f:?}, p = {p}, i = {i}");
        }
        checked += 1;
    }
}

#[test]
fn finite_span_density_is_within_three_sigma() {
    // x² − 2: S = {2, 2, …}, an origin-free span of rank 1
    let f = QuadMapZ::from_i64(0, -2);
    let r = census_scan(&f, &CensusOptions::new(100_000)).unwrap();
    assert!(!r.span.prefix_based);
    let expected = r.span.predicted_density;
    assert_eq!(expected, 0.5);
    let n = r.runtime_stats.primes_scanned as f64;
    let band = 3.0 * (expected * (1.0 - expected) / n).sqrt();
    assert!((r.stable_density() - expected).abs() <= band, "{}", r.stable_density());
}

#[test]
fn origin_in_span_means_no_stable_primes() {
    let f = QuadMapZ::from_i64(-1, -1);
    let r = census_scan(&f, &CensusOptions::new(10_000)).unwrap();
    assert!(r.span.origin_in_affine_span);
    assert!(r.stable_primes.is_empty());
}

#[test]
fn resume_from_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let f = QuadMapZ::from_i64(0, 1);
    let mut opts = CensusOptions::new(50_000);
    opts.segment_size = 1 << 12;
    opts.checkpoint_dir = Some(dir.path().to_path_buf());
    assert_eq!(resumable_segments(&opts), 0);
    let first = census_scan(&f, &opts).unwrap();
    let segments = resumable_segments(&opts);
    assert_eq!(segments as u64, first.runtime_stats.segments);
    // drop a few segments, as if the run had been interrupted
    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for p in files.iter().step_by(3) {
        std::fs::remove_file(p).unwrap();
    }
    let second = census_scan(&f, &opts).unwrap();
    assert_eq!(first, second);
    // a checkpoint from a different map is refused
    let g = QuadMapZ::from_i64(0, 2);
    assert!(census_scan(&g, &opts).is_err());
}
