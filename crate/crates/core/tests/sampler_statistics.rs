use excursion::field_models::CovarianceModel;
use excursion::geometry::AxisBox;
use excursion::sampler::{
    sample_chi_square, sample_gaussian_grid, sample_gaussian_points, sample_poisson_process, GridSpec, Locations,
};
use excursion::stats;

fn model() -> CovarianceModel {
    CovarianceModel::squared_exponential(1.0).unwrap()
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (stats::mean(a), stats::mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn grid_marginals_are_standard_normal() {
    let grid = GridSpec::new(2, 16, 0.25).unwrap();
    let mut pooled = Vec::new();
    for seed in 0..200 {
        let s = sample_gaussian_grid(&model(), &grid, seed).unwrap();
        pooled.push(s.values[grid.linear_index(&[0, 0])]);
        pooled.push(s.values[grid.linear_index(&[-16, 15])]);
    }
    let m = stats::mean(&pooled);
    let v = stats::variance(&pooled);
    assert!(m.abs() < 3.0 / (pooled.len() as f64).sqrt(), "mean {m}");
    // sd of the sample variance is about sqrt(2 / n)
    assert!((v - 1.0).abs() < 3.0 * (2.0 / pooled.len() as f64).sqrt(), "variance {v}");
}

#[test]
fn grid_correlations_match_the_model_and_are_isotropic() {
    let grid = GridSpec::new(2, 8, 0.25).unwrap();
    let n = 1500;
    let (mut o, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for seed in 0..n {
        let s = sample_gaussian_grid(&model(), &grid, 10_000 + seed).unwrap();
        o.push(s.values[grid.linear_index(&[0, 0])]);
        x.push(s.values[grid.linear_index(&[2, 0])]);
        y.push(s.values[grid.linear_index(&[0, 2])]);
    }
    let rho = model().at_distance(0.5);
    let se = (1.0 - rho * rho) / (n as f64).sqrt();
    let (cx, cy) = (correlation(&o, &x), correlation(&o, &y));
    assert!((cx - rho).abs() < 3.0 * se, "{cx} vs {rho}");
    assert!((cy - rho).abs() < 3.0 * se, "{cy} vs {rho}");
    assert!((cx - cy).abs() < 3.0 * se * 2f64.sqrt());
}

#[test]
fn grid_and_point_samplers_agree_in_law() {
    let grid = GridSpec::new(2, 2, 0.5).unwrap();
    let points: Vec<Vec<f64>> = (0..grid.node_count()).map(|i| grid.node_position(i)).collect();
    let node = 5;
    let n = 2000;
    let a: Vec<f64> = (0..n)
        .map(|s| sample_gaussian_grid(&model(), &grid, s).unwrap().values[node])
        .collect();
    let b: Vec<f64> = (0..n)
        .map(|s| sample_gaussian_points(&model(), &points, 1_000_000 + s).unwrap().values[node])
        .collect();
    // rejection threshold of the two-sample test at level 1e-3
    let critical = ((2.0f64 / 1e-3).ln() / 2.0).sqrt() * (2.0 / n as f64).sqrt();
    let d = ks_statistic(a, b);
    assert!(d < critical, "KS {d} >= {critical}");
}

#[test]
fn samplers_are_deterministic() {
    let grid = GridSpec::new(2, 8, 0.25).unwrap();
    let a = sample_gaussian_grid(&model(), &grid, 42).unwrap();
    let b = sample_gaussian_grid(&model(), &grid, 42).unwrap();
    assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    let pts = vec![vec![0.0, 0.0], vec![0.3, 0.1], vec![1.0, -1.0]];
    let p = sample_gaussian_points(&model(), &pts, 42).unwrap();
    let q = sample_gaussian_points(&model(), &pts, 42).unwrap();
    assert_eq!(p.values, q.values);
    assert!(a.model_tag.contains("chacha8"));
}

#[test]
fn chi_square_moments() {
    let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64 * 3.0, 0.0]).collect();
    let locs = Locations::Points(pts);
    let k = 3;
    let mut all = Vec::new();
    for seed in 0..1000 {
        all.extend(sample_chi_square(&model(), k, &locs, seed).unwrap().values);
    }
    let m = stats::mean(&all);
    let v = stats::variance(&all);
    assert!((m - k as f64).abs() < 0.15, "mean {m}");
    assert!((v / (2.0 * k as f64) - 1.0).abs() < 0.15, "variance {v}");
    assert!(all.iter().all(|&x| x >= 0.0));
}

#[test]
fn poisson_counts_match_the_rate() {
    let b = AxisBox::centered_cube(2, 2.0);
    let counts: Vec<f64> = (0..400)
        .map(|s| sample_poisson_process(3.0, &b, s).unwrap().len() as f64)
        .collect();
    let m = stats::mean(&counts);
    // mean and variance of the count are both 48
    assert!((m - 48.0).abs() < 3.0 * (48.0f64 / 400.0).sqrt(), "{m}");
    assert!((stats::variance(&counts) / 48.0 - 1.0).abs() < 0.25);
    let pts = sample_poisson_process(3.0, &b, 1).unwrap();
    assert!(pts.iter().all(|p| b.contains(p, 0.0)));
}
