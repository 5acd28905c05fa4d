//! Brute-force references for the sweep and the pair search.

use std::f64::consts::TAU;

use essmin::counting::{coverage_distribution, phi_at, phi_range};
use essmin::geometry::{gleason_distance, min_pairwise_distance, normalize_angle, stolz_arc, ArcKind};
use essmin::{DiskPoint, StolzAperture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(rng: &mut ChaCha8Rng, count: usize, max_depth: f64) -> Vec<DiskPoint> {
    (0..count)
        .map(|_| DiskPoint::new(1.0 - 2f64.powf(-rng.gen_range(0.0..max_depth)), rng.gen_range(0.0..TAU)).unwrap())
        .collect()
}

/// `m_a(n)` from the depth at the midpoint of every gap between arc endpoints.
fn exact_by_gaps(a: &[DiskPoint], alpha: StolzAperture) -> Vec<f64> {
    let mut cuts: Vec<f64> = vec![0.0];
    for z in a {
        let arc = stolz_arc(z, alpha);
        if arc.kind == ArcKind::Proper {
            cuts.push(arc.start());
            cuts.push(normalize_angle(arc.start() + arc.length()));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.push(TAU);
    let mut m = vec![0.0; a.len() + 2];
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len > 0.0 {
            let depth = phi_at(a, 0.5 * (w[0] + w[1]), alpha);
            for v in m.iter_mut().take(depth + 1).skip(1) {
                *v += len;
            }
        }
    }
    m
}

#[test]
fn sweep_matches_gap_midpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let alpha = StolzAperture::new(rng.gen_range(0.3..5.0)).unwrap();
        let count = rng.gen_range(1..120);
        let a = random_points(&mut rng, count, 10.0);
        let sweep = coverage_distribution(&a, alpha);
        let brute = exact_by_gaps(&a, alpha);
        for (n, &want) in brute.iter().enumerate().skip(1) {
            assert!((sweep.m(n) - want).abs() <= 1e-9, "n = {n}: {} vs {want}", sweep.m(n));
        }
    }
}

#[test]
fn essential_range_brackets_sampled_depths() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let alpha = StolzAperture::default();
    let a = random_points(&mut rng, 200, 8.0);
    let (lo, hi) = phi_range(&a, alpha);
    for _ in 0..2000 {
        let d = phi_at(&a, rng.gen_range(0.0..TAU), alpha);
        assert!(lo <= d && d <= hi, "{d} outside [{lo}, {hi}]");
    }
}

#[test]
fn pair_search_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for count in [2500, 4000] {
        let a = random_points(&mut rng, count, 14.0);
        let mut brute = f64::INFINITY;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                brute = brute.min(gleason_distance(&a[i], &a[j]));
            }
        }
        assert_eq!(min_pairwise_distance(&a), brute);
    }
}
