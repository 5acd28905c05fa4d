use std::f64::consts::{PI, TAU};

use essmin::classes::DecreaseFunction;
use essmin::construction::{build_level_selection, build_measure, check_cylinder_masses, level_sequence};
use essmin::counting::coverage_distribution;
use essmin::geometry::{gleason_distance, stolz_arc, stolz_half_width};
use essmin::potential::{blaschke_product, harmonic_measure, harnack_check, poisson_integral, CircleMeasure};
use essmin::{DiskPoint, StolzAperture};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = DiskPoint> {
    (0.0f64..20.0, 0.0f64..TAU).prop_map(|(depth, phi)| DiskPoint::new(1.0 - 2f64.powf(-depth), phi).unwrap())
}

fn aperture() -> impl Strategy<Value = StolzAperture> {
    (0.1f64..8.0).prop_map(|a| StolzAperture::new(a).unwrap())
}

proptest! {
    #[test]
    fn gleason_is_a_metric_below_one(z in point(), w in point(), u in point()) {
        let (zw, zu, uw) = (gleason_distance(&z, &w), gleason_distance(&z, &u), gleason_distance(&u, &w));
        prop_assert!((0.0..=1.0).contains(&zw));
        prop_assert!((zw - gleason_distance(&w, &z)).abs() <= 1e-12);
        // strong triangle inequality of the pseudo-hyperbolic distance
        prop_assert!(zw <= (zu + uw) / (1.0 + zu * uw) + 1e-9);
    }

    #[test]
    fn gleason_is_rotation_invariant(z in point(), w in point(), t in 0.0f64..TAU) {
        let d = gleason_distance(&z, &w);
        prop_assert!((d - gleason_distance(&z.rotated(t), &w.rotated(t))).abs() <= 1e-9);
    }

    #[test]
    fn stolz_arcs_shrink_toward_the_boundary(a in aperture(), r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(stolz_half_width(hi, a) <= stolz_half_width(lo, a));
        prop_assert!(stolz_half_width(hi, a) <= PI);
    }

    #[test]
    fn coverage_is_monotone_with_layer_cake(pts in prop::collection::vec(point(), 1..60), a in aperture()) {
        let cov = coverage_distribution(&pts, a);
        prop_assert!(cov.m(1) <= TAU + 1e-12);
        for n in 1..=cov.max_coverage() {
            prop_assert!(cov.m(n + 1) <= cov.m(n));
        }
        let arcs: f64 = pts.iter().map(|z| stolz_arc(z, a).length()).sum();
        prop_assert!((cov.layer_sum() - arcs).abs() <= 1e-9 * arcs.max(1.0));
    }

    #[test]
    fn coverage_grows_with_the_sequence(pts in prop::collection::vec(point(), 2..40), a in aperture()) {
        let (part, whole) = (coverage_distribution(&pts[..pts.len() / 2], a), coverage_distribution(&pts, a));
        for n in 1..=part.max_coverage() {
            prop_assert!(part.m(n) <= whole.m(n) + 1e-12);
        }
    }

    #[test]
    fn harmonic_measure_is_additive(z in point(), s in 0.0f64..TAU, l1 in 0.0f64..3.0, l2 in 0.0f64..3.0) {
        let whole = harmonic_measure(&z, s, l1 + l2);
        let split = harmonic_measure(&z, s, l1) + harmonic_measure(&z, s + l1, l2);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&whole));
        prop_assert!((whole - split).abs() <= 1e-9);
        let rest = harmonic_measure(&z, s + l1, TAU - l1);
        prop_assert!((harmonic_measure(&z, s, l1) + rest - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn blaschke_products_are_bounded(zeros in prop::collection::vec(point(), 0..20), z in point()) {
        prop_assert!(blaschke_product(&zeros, &z).norm() <= 1.0 + 1e-12);
        for b in &zeros {
            prop_assert!(blaschke_product(&zeros, b).norm() <= 1e-9);
        }
    }

    #[test]
    fn poisson_integrals_obey_harnack(atoms in prop::collection::vec((0.0f64..TAU, 0.01f64..1.0), 1..8), z in point(), w in point()) {
        let mu = CircleMeasure::new(None, atoms).unwrap();
        prop_assert!(poisson_integral(&mu, &z) > 0.0);
        let (ratio, bound) = harnack_check(&mu, &z, &w);
        if bound.is_finite() {
            prop_assert!(ratio <= bound * (1.0 + 1e-9));
        }
    }

    #[test]
    fn levels_step_by_at_most_one(gt in prop::collection::vec(0.0f64..1e6, 1..40)) {
        let mut gt = gt;
        gt.sort_by(f64::total_cmp);
        let l = level_sequence(&gt);
        for n in 0..l.len() {
            prop_assert!(l[n] as f64 <= gt[n].max(1.0).log2() + 1e-12);
            prop_assert!(l[n] as usize <= n);
            if n > 0 {
                prop_assert!(l[n] == l[n - 1] || l[n] == l[n - 1] + 1);
            }
        }
    }

    #[test]
    fn cantor_measures_are_probability_measures(p in 0.2f64..3.0, shift in 1.0f64..4.0, depth in 1usize..14) {
        let g = DecreaseFunction::level(1.0, shift, p, 0.0).unwrap();
        let sel = build_level_selection(&g, depth).unwrap();
        let mu = build_measure(&sel);
        prop_assert!((mu.total_mass() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(check_cylinder_masses(&sel, &mu), 0);
    }
}
