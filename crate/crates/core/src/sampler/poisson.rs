use rand::Rng as _;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::AxisBox;
use crate::seed;

/// Homogeneous Poisson process with intensity `rate` on `region`.
///
/// The count is Poisson(`rate * volume`) and the points are i.i.d. uniform.
/// A zero-volume region or zero rate yields no points.
pub fn sample_poisson_process(rate: f64, region: &AxisBox, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Domain(format!("Poisson rate must be finite and >= 0, got {rate}")));
    }
    let mean = rate * region.volume();
    if !mean.is_finite() {
        return Err(Error::Domain("Poisson mean count is not finite".into()));
    }
    if mean <= 0.0 {
        return Ok(Vec::new());
    }
    let mut rng = seed::rng_from_seed(seed);
    let count = Poisson::new(mean)
        .map_err(|e| Error::Domain(format!("Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let d = region.dim();
    Ok((0..count)
        .map(|_| {
            (0..d)
                .map(|a| region.lo[a] + rng.random::<f64>() * region.side(a))
                .collect()
        })
        .collect())
}
