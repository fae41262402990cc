use std::f64::consts::PI;

use proptest::prelude::*;

use excursion::crofton::{crofton_measure_mc, ParamLine, Sphere};
use excursion::estimators::{
    corrected_surface, estimate, hypercubic_surface_fast, surface_estimate, volume_estimate, ExcursionIndicator,
};
use excursion::field_models::{
    beta_d, bias_factor, gaussian_l1_limit, gaussian_surface_density, gaussian_volume_density,
};
use excursion::geometry::{dot, norm2, AxisBox};
use excursion::sampler::{sample_poisson_process, GridSpec};
use excursion::seed::replicate_seed;
use excursion::tessellation::{
    hexagonal_honeycomb, hypercubic_honeycomb, pyramid_identity_sum, voronoi_honeycomb_2d, WindowedHoneycomb,
    NORMALITY_TOLERANCE,
};

fn indicator(bits: &[bool]) -> ExcursionIndicator {
    ExcursionIndicator {
        exceeds: bits.to_vec(),
        level: 0.0,
        source: "prop".into(),
    }
}

fn lattice() -> impl Strategy<Value = (usize, usize, f64)> {
    (2usize..=3, 1usize..=4, 0.01f64..4.0)
}

fn poisson_voronoi(seed: u64, rate: f64) -> WindowedHoneycomb {
    let window = AxisBox::centered_cube(2, 2.0);
    let guard = 1.5 / rate.sqrt();
    let pts = sample_poisson_process(rate, &window.inflate(guard), seed).unwrap();
    voronoi_honeycomb_2d(&pts, &window, guard).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beta_product_recurrence(d in 1usize..12) {
        // Gamma(x + 1) = x Gamma(x) turns beta_d beta_{d+1} into 2 pi d
        let p = beta_d(d).unwrap() * beta_d(d + 1).unwrap();
        prop_assert!((p / (2.0 * PI * d as f64) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l1_limit_is_bias_times_surface(u in -5.0f64..5.0, lambda in 1e-3f64..1e3, d in 2usize..10) {
        let lhs = gaussian_l1_limit(u, lambda, d).unwrap();
        let rhs = bias_factor(d).unwrap() * gaussian_surface_density(u, lambda, d).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn volume_density_symmetry(u in -8.0f64..8.0) {
        prop_assert!((gaussian_volume_density(u) + gaussian_volume_density(-u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fast_lattice_matches_materialized((d, n, delta) in lattice(), seed in any::<u64>(), u in -1.0f64..1.0) {
        let grid = GridSpec::new(d, n, delta).unwrap();
        let mut rng = excursion::seed::rng_from_seed(seed);
        let values: Vec<f64> = (0..grid.node_count()).map(|_| rand::Rng::random_range(&mut rng, -2.0..2.0)).collect();
        let h = hypercubic_honeycomb(delta, n, d).unwrap();
        let explicit = surface_estimate(&h, &ExcursionIndicator::from_values(&values, u, "")).unwrap();
        prop_assert_eq!(explicit.to_bits(), hypercubic_surface_fast(&values, &grid, u).unwrap().to_bits());
    }

    #[test]
    fn complementation_invariance((d, n, delta) in lattice(), bits in prop::collection::vec(any::<bool>(), 512)) {
        let h = hypercubic_honeycomb(delta, n, d).unwrap();
        let ind = indicator(&bits[..h.inside_count()]);
        prop_assert_eq!(surface_estimate(&h, &ind).unwrap(), surface_estimate(&h, &ind.complement()).unwrap());
    }

    #[test]
    fn report_invariants((d, n, delta) in lattice(), bits in prop::collection::vec(any::<bool>(), 512)) {
        let h = hypercubic_honeycomb(delta, n, d).unwrap();
        let r = estimate(&h, &indicator(&bits[..h.inside_count()])).unwrap();
        prop_assert!(r.volume_density >= 0.0 && r.volume_density <= r.coverage_ratio + 1e-12);
        prop_assert_eq!(r.surface_corrected, corrected_surface(r.surface_raw, d).unwrap());
        prop_assert_eq!(r.surface_corrected, r.surface_raw * beta_d(d).unwrap() / (2.0 * d as f64));
        prop_assert!(r.surface_raw <= h.total_interior_facet_measure() / h.window_volume() * (1.0 + 1e-12));
    }

    #[test]
    fn volume_is_monotone_in_level(values in prop::collection::vec(-3.0f64..3.0, 16), u1 in -3.0f64..3.0, du in 0.0f64..2.0) {
        let h = hypercubic_honeycomb(0.5, 2, 2).unwrap();
        let lo = volume_estimate(&h, &ExcursionIndicator::from_values(&values, u1, "")).unwrap();
        let hi = volume_estimate(&h, &ExcursionIndicator::from_values(&values, u1 + du, "")).unwrap();
        prop_assert!(hi <= lo);
    }

    #[test]
    fn lines_are_normalized(s in prop::collection::vec(-1.0f64..1.0, 3), v in prop::collection::vec(-5.0f64..5.0, 3)) {
        prop_assume!(norm2(&s) > 1e-3);
        let l = ParamLine::new(s, v).unwrap();
        prop_assert!((norm2(&l.direction) - 1.0).abs() < 1e-12);
        prop_assert!(dot(&l.direction, &l.offset).abs() < 1e-12);
    }

    #[test]
    fn replicate_seeds_are_distinct(base in any::<u64>(), s in 0usize..1000, r in 0usize..1000) {
        prop_assert_ne!(replicate_seed(base, s, r), replicate_seed(base, s, r + 1));
        prop_assert_ne!(replicate_seed(base, s, r), replicate_seed(base, s + 1, r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn voronoi_partition_and_normality(seed in any::<u64>(), rate in 2.0f64..20.0) {
        let h = poisson_voronoi(seed, rate);
        let total = h.clipped_volume_sum().unwrap();
        prop_assert!((total / h.window_volume() - 1.0).abs() < 1e-9);
        prop_assert!(h.honeycomb.check_normality(NORMALITY_TOLERANCE).is_ok());
        prop_assert!(pyramid_identity_sum(&h) <= 2.0 * 2.0 * h.window_volume() * (1.0 + 1e-12));
    }

    #[test]
    fn voronoi_cells_hold_their_nearest_queries(seed in any::<u64>()) {
        let window = AxisBox::centered_cube(2, 2.0);
        let pts = sample_poisson_process(10.0, &window.inflate(1.0), seed).unwrap();
        let h = voronoi_honeycomb_2d(&pts, &window, 1.0).unwrap();
        let mut rng = excursion::seed::rng_from_seed(seed ^ 1);
        for _ in 0..200 {
            let q = [rand::Rng::random_range(&mut rng, -2.0..2.0), rand::Rng::random_range(&mut rng, -2.0..2.0)];
            let nearest = h
                .honeycomb
                .cells
                .iter()
                .min_by(|a, b| {
                    let da = (a.reference[0] - q[0]).hypot(a.reference[1] - q[1]);
                    let db = (b.reference[0] - q[0]).hypot(b.reference[1] - q[1]);
                    da.total_cmp(&db)
                })
                .unwrap();
            let poly: Vec<[f64; 2]> = nearest.vertices.iter().map(|v| [v[0], v[1]]).collect();
            prop_assert!(excursion::tessellation::polygon::contains(&poly, q, 1e-9));
        }
    }
}

#[test]
fn pyramid_fraction_increases_toward_one() {
    let mut prev = 0.0;
    for delta in [1.0, 0.5, 0.25, 0.125] {
        let n = (2.0 / delta) as usize;
        let h = hypercubic_honeycomb(delta, n, 2).unwrap();
        let frac = pyramid_identity_sum(&h) / (4.0 * h.window_volume());
        assert!(frac >= prev && frac <= 1.0, "{delta}: {frac}");
        prev = frac;
    }
    assert!(prev > 0.96);
}

#[test]
fn hexagonal_pyramid_fraction_below_coverage() {
    let h = hexagonal_honeycomb(0.1, &AxisBox::centered_cube(2, 2.0)).unwrap();
    let frac = pyramid_identity_sum(&h) / (4.0 * h.window_volume());
    assert!(frac <= h.coverage_ratio() + 1e-12 && frac > 0.8);
}

#[test]
fn crofton_error_scales_as_inverse_root() {
    let c = Sphere { center: vec![0.0, 0.0], radius: 1.0 };
    let a = crofton_measure_mc(&c, 20_000, 1.5, 1).unwrap();
    let b = crofton_measure_mc(&c, 80_000, 1.5, 2).unwrap();
    let ratio = a.stderr / b.stderr;
    assert!((ratio / 2.0 - 1.0).abs() < 0.2, "{ratio}");
}
