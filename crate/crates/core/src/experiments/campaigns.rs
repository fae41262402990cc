use super::{in_pool, replicate_table, Assembler, CampaignConfig, HoneycombKind, McCampaignResult, ShapeKind};
use crate::crofton::{crofton_measure_mc, unit_ball_volume, LineOracle, SegmentSet, Sphere};
use crate::error::{Error, Result};
use crate::estimators::{
    corrected_surface, crossing_rate_surface, estimate, hypercubic_surface_fast, hypercubic_volume_fast,
    ChiSquarePairs, ExcursionIndicator, GaussianPairs, PairSampler,
};
use crate::field_models::{bias_factor, FieldFamily, ReferenceDensities};
use crate::geometry::AxisBox;
use crate::sampler::{draw_family, sample_poisson_process, CirculantSampler, GridSpec, PointSampler};
use crate::seed;
use crate::stats;
use crate::tessellation::{default_guard, hexagonal_honeycomb, pyramid_identity_sum, voronoi_honeycomb_2d, WindowedHoneycomb};

/// Counter separating the generator stream of a Voronoi replicate from its
/// field stream.
const POISSON_STREAM: u64 = 0x706f_6973_736f_6e;

fn references(cfg: &CampaignConfig) -> Result<Vec<ReferenceDensities>> {
    let model = cfg.model()?;
    cfg.levels
        .iter()
        .map(|&u| ReferenceDensities::new(cfg.family, &model, cfg.d, u))
        .collect()
}

fn mean_se(xs: &[f64]) -> [f64; 2] {
    [stats::mean(xs), stats::stderr(xs)]
}

fn window(cfg: &CampaignConfig) -> AxisBox {
    AxisBox::centered_cube(cfg.d, cfg.half_width)
}

enum BiasSetup {
    Hypercubic(CirculantSampler),
    Points(WindowedHoneycomb, PointSampler),
    Voronoi(f64),
}

/// Surface-ratio sweep over cell sizes for one honeycomb family.
///
/// Replicate columns per level: `ratio_raw` (`surface_raw / C*_{d-1}`),
/// `ratio_corrected`, `ratio_adjusted` (raw ratio over the coverage ratio),
/// `volume`, `coverage`, `pyramid_fraction` (pyramid sum over `2d sigma_d(T)`).
/// For Voronoi sweeps the generators are a unit-rate Poisson process in
/// `(T / delta) ⊕ guard`, rescaled by `delta`.
pub fn run_bias_sweep(cfg: &CampaignConfig) -> Result<McCampaignResult> {
    cfg.validate()?;
    let d = cfg.d;
    if cfg.honeycomb != HoneycombKind::Hypercubic && d != 2 {
        return Err(Error::Unsupported(format!("{} honeycombs need d = 2, got {d}", cfg.honeycomb.name())));
    }
    let model = cfg.model()?;
    let refs = references(cfg)?;
    let target = bias_factor(d)?;
    let asm = Assembler::new(
        cfg,
        "surface_raw / C*_{d-1}",
        &["ratio_raw", "ratio_corrected", "ratio_adjusted", "volume", "coverage", "pyramid_fraction"],
        &[
            "target",
            "reference_surface",
            "corrected_mean",
            "corrected_stderr",
            "adjusted_mean",
            "adjusted_stderr",
            "volume_mean",
            "coverage_mean",
            "pyramid_fraction_mean",
        ],
    );

    let setups: Vec<BiasSetup> = in_pool(cfg, || {
        cfg.sweep
            .iter()
            .map(|&delta| -> Result<BiasSetup> {
                Ok(match cfg.honeycomb {
                    HoneycombKind::Hypercubic => {
                        BiasSetup::Hypercubic(CirculantSampler::new(model, GridSpec::for_window(d, cfg.half_width, delta)?)?)
                    }
                    HoneycombKind::Hexagonal => {
                        let h = hexagonal_honeycomb(delta, &window(cfg))?;
                        let s = PointSampler::with_cap(model, h.reference_points(), cfg.point_cap)?;
                        BiasSetup::Points(h, s)
                    }
                    HoneycombKind::Voronoi => BiasSetup::Voronoi(delta),
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let per_level = |h: &WindowedHoneycomb, values: &[f64]| -> Result<Vec<Vec<f64>>> {
        let coverage = h.coverage_ratio();
        let pyramid = pyramid_identity_sum(h) / (2.0 * d as f64 * h.window_volume());
        refs.iter()
            .map(|r| {
                let e = estimate(h, &ExcursionIndicator::from_values(values, r.u, ""))?;
                let ratio = e.surface_raw / r.c_dm1_star;
                Ok(vec![
                    ratio,
                    e.surface_corrected / r.c_dm1_star,
                    ratio / coverage,
                    e.volume_density,
                    coverage,
                    pyramid,
                ])
            })
            .collect()
    };

    let table = replicate_table(cfg, |s, _r, rep_seed| -> Result<Vec<Vec<f64>>> {
        match &setups[s] {
            BiasSetup::Hypercubic(sampler) => {
                let grid = sampler.grid();
                let values = draw_family(sampler, cfg.family, rep_seed);
                let pyramid = (grid.side() - 1) as f64 / grid.side() as f64;
                refs.iter()
                    .map(|r| {
                        let raw = hypercubic_surface_fast(&values, &grid, r.u)?;
                        let ratio = raw / r.c_dm1_star;
                        Ok(vec![
                            ratio,
                            corrected_surface(raw, d)? / r.c_dm1_star,
                            ratio,
                            hypercubic_volume_fast(&values, &grid, r.u)?,
                            1.0,
                            pyramid,
                        ])
                    })
                    .collect()
            }
            BiasSetup::Points(h, sampler) => per_level(h, &draw_family(sampler, cfg.family, rep_seed)),
            BiasSetup::Voronoi(delta) => {
                let guard = default_guard(1.0);
                let region = window(cfg).scale(1.0 / delta).inflate(guard);
                let points: Vec<Vec<f64>> = sample_poisson_process(1.0, &region, seed::mix(rep_seed, POISSON_STREAM))?
                    .into_iter()
                    .map(|p| p.into_iter().map(|x| x * delta).collect())
                    .collect();
                let h = voronoi_honeycomb_2d(&points, &window(cfg), guard * delta)?;
                let sampler = PointSampler::with_cap(model, h.reference_points(), cfg.point_cap)?;
                per_level(&h, &draw_family(&sampler, cfg.family, rep_seed))
            }
        }
    })?;

    asm.finish(table, |_s, l, cols| {
        let [cm, cs] = mean_se(&cols[1]);
        let [am, ase] = mean_se(&cols[2]);
        Ok(vec![
            target,
            refs[l].c_dm1_star,
            cm,
            cs,
            am,
            ase,
            stats::mean(&cols[3]),
            stats::mean(&cols[4]),
            stats::mean(&cols[5]),
        ])
    })
}

/// First-order surface estimates `beta_d p_hat / q` over a decreasing list
/// of lags; each replicate draws `n_pairs` pairs.
pub fn run_crossing_convergence(cfg: &CampaignConfig) -> Result<McCampaignResult> {
    cfg.validate()?;
    if cfg.n_pairs == 0 {
        return Err(Error::Config("n_pairs must be >= 1".into()));
    }
    let model = cfg.model()?;
    let refs = references(cfg)?;
    let sampler: Box<dyn PairSampler> = match cfg.family {
        FieldFamily::Gaussian => Box::new(GaussianPairs { model }),
        FieldFamily::ChiSquare { k } => Box::new(ChiSquarePairs { model, k }),
    };
    let asm = Assembler::new(
        cfg,
        "beta_d p_hat / q",
        &["surface_first_order", "p_hat", "mc_stderr"],
        &["reference_surface", "p_hat_mean", "below_limit", "relative_error"],
    );
    let table = replicate_table(cfg, |s, _r, rep_seed| {
        refs.iter()
            .map(|r| {
                let e = crossing_rate_surface(sampler.as_ref(), r.u, cfg.sweep[s], cfg.d, cfg.n_pairs, rep_seed)?;
                Ok(vec![e.surface_first_order, e.p_hat, e.stderr])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    asm.finish(table, |_s, l, cols| {
        let [m, se] = mean_se(&cols[0]);
        let reference = refs[l].c_dm1_star;
        Ok(vec![
            reference,
            stats::mean(&cols[1]),
            if m <= reference + 3.0 * se { 1.0 } else { 0.0 },
            m / reference - 1.0,
        ])
    })
}

/// Joint behaviour of `(C^_d, C^_{d-1})` on growing hypercubic windows
/// `[-delta N, delta N]^d` at fixed `delta`; the sweep lists `N`.
///
/// Scaled moments multiply by `sigma_d(T)`, so they are window-free when the
/// estimators obey a central limit theorem.
pub fn run_clt(cfg: &CampaignConfig) -> Result<McCampaignResult> {
    cfg.validate()?;
    let model = cfg.model()?;
    let asm = Assembler::new(
        cfg,
        "surface_raw",
        &["surface", "volume"],
        &[
            "window_volume",
            "volume_mean",
            "volume_stderr",
            "scaled_var_volume",
            "scaled_var_surface",
            "scaled_cov",
            "skew_volume",
            "kurt_volume",
            "skew_surface",
            "kurt_surface",
        ],
    );
    let samplers: Vec<CirculantSampler> = in_pool(cfg, || {
        cfg.sweep
            .iter()
            .map(|&n| CirculantSampler::new(model, GridSpec::new(cfg.d, n as usize, cfg.delta)?))
            .collect::<Result<Vec<_>>>()
    })??;
    let table = replicate_table(cfg, |s, _r, rep_seed| {
        let sampler = &samplers[s];
        let grid = sampler.grid();
        let values = draw_family(sampler, cfg.family, rep_seed);
        cfg.levels
            .iter()
            .map(|&u| {
                Ok(vec![
                    hypercubic_surface_fast(&values, &grid, u)?,
                    hypercubic_volume_fast(&values, &grid, u)?,
                ])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    asm.finish(table, |s, _l, cols| {
        let vol_t = samplers[s].grid().window().volume();
        let (surf, vol) = (&cols[0], &cols[1]);
        let (ms, mv) = (stats::mean(surf), stats::mean(vol));
        let cov = surf.iter().zip(vol).map(|(a, b)| (a - ms) * (b - mv)).sum::<f64>() / (surf.len() - 1) as f64;
        Ok(vec![
            vol_t,
            mv,
            stats::stderr(vol),
            vol_t * stats::variance(vol),
            vol_t * stats::variance(surf),
            vol_t * cov,
            stats::skewness(vol),
            stats::excess_kurtosis(vol),
            stats::skewness(surf),
            stats::excess_kurtosis(surf),
        ])
    })
}

/// Crofton estimates for circles (spheres when `d > 2`) of radius, or square
/// boundaries of side, equal to each sweep value.
pub fn run_crofton_demo(cfg: &CampaignConfig) -> Result<McCampaignResult> {
    cfg.validate()?;
    if cfg.n_lines == 0 {
        return Err(Error::Config("n_lines must be >= 1".into()));
    }
    let d = cfg.d;
    if cfg.shape == ShapeKind::Square && d != 2 {
        return Err(Error::Unsupported(format!("square demo needs d = 2, got {d}")));
    }
    let shapes: Vec<(Box<dyn LineOracle>, f64, f64)> = cfg
        .sweep
        .iter()
        .map(|&a| -> (Box<dyn LineOracle>, f64, f64) {
            match cfg.shape {
                ShapeKind::Circle => (
                    Box::new(Sphere { center: vec![0.0; d], radius: a }),
                    d as f64 * unit_ball_volume(d) * a.powi(d as i32 - 1),
                    a,
                ),
                ShapeKind::Square => (Box::new(SegmentSet::square(a)), 4.0 * a, a / std::f64::consts::SQRT_2),
            }
        })
        .collect();
    let asm = Assembler::new(
        cfg,
        "crofton measure",
        &["measure", "mc_stderr"],
        &["truth", "relative_error", "pooled_stderr", "within_3se"],
    );
    let table = replicate_table(cfg, |s, _r, rep_seed| {
        let (shape, _, circumradius) = &shapes[s];
        let e = crofton_measure_mc(shape.as_ref(), cfg.n_lines, cfg.bounding_factor * circumradius, rep_seed)?;
        Ok(vec![vec![e.measure, e.stderr]; cfg.levels.len()])
    })?;
    asm.finish(table, |s, _l, cols| {
        let truth = shapes[s].1;
        let m = stats::mean(&cols[0]);
        let pooled = cols[1].iter().map(|x| x * x).sum::<f64>().sqrt() / cols[1].len() as f64;
        Ok(vec![
            truth,
            m / truth - 1.0,
            pooled,
            if (m - truth).abs() <= 3.0 * pooled { 1.0 } else { 0.0 },
        ])
    })
}

/// Unbiasedness of the hypercubic volume estimator over cell sizes and levels.
pub fn run_volume_check(cfg: &CampaignConfig) -> Result<McCampaignResult> {
    cfg.validate()?;
    if cfg.honeycomb != HoneycombKind::Hypercubic {
        return Err(Error::Unsupported("volume check runs on the hypercubic lattice only".into()));
    }
    let model = cfg.model()?;
    let volumes: Vec<f64> = cfg
        .levels
        .iter()
        .map(|&u| cfg.family.volume_density(u))
        .collect::<Result<_>>()?;
    let asm = Assembler::new(cfg, "volume", &["volume"], &["reference_volume", "z_score", "within_3se"]);
    let samplers: Vec<CirculantSampler> = in_pool(cfg, || {
        cfg.sweep
            .iter()
            .map(|&delta| CirculantSampler::new(model, GridSpec::for_window(cfg.d, cfg.half_width, delta)?))
            .collect::<Result<Vec<_>>>()
    })??;
    let table = replicate_table(cfg, |s, _r, rep_seed| {
        let sampler = &samplers[s];
        let values = draw_family(sampler, cfg.family, rep_seed);
        cfg.levels
            .iter()
            .map(|&u| Ok(vec![hypercubic_volume_fast(&values, &sampler.grid(), u)?]))
            .collect::<Result<Vec<_>>>()
    })?;
    asm.finish(table, |_s, l, cols| {
        let [m, se] = mean_se(&cols[0]);
        let z = (m - volumes[l]) / se;
        Ok(vec![volumes[l], z, if z.abs() <= 3.0 { 1.0 } else { 0.0 }])
    })
}
