//! Closed-form reference quantities for isotropic Gaussian and chi-square
//! fields: the dimensional constant `beta_d`, the volume density `C*_d(u)`
//! and the surface-area density `C*_{d-1}(u)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma;

use crate::error::{Error, Result};

/// Stationary isotropic unit-variance covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CovarianceKind {
    /// `exp(-|t|^2 / (2 l^2))`
    SquaredExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceModel {
    pub kind: CovarianceKind,
    length_scale: f64,
}

impl CovarianceModel {
    pub fn squared_exponential(length_scale: f64) -> Result<Self> {
        if !(length_scale.is_finite() && length_scale > 0.0) {
            return Err(Error::Domain(format!(
                "length scale must be positive and finite, got {length_scale}"
            )));
        }
        Ok(Self {
            kind: CovarianceKind::SquaredExponential,
            length_scale,
        })
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    /// Covariance at lag distance `r = |t|`.
    #[inline]
    pub fn at_distance(&self, r: f64) -> f64 {
        match self.kind {
            CovarianceKind::SquaredExponential => {
                let s = r / self.length_scale;
                (-0.5 * s * s).exp()
            }
        }
    }

    /// Covariance at a lag vector.
    #[inline]
    pub fn at_lag(&self, lag: &[f64]) -> f64 {
        let r2: f64 = lag.iter().map(|x| x * x).sum();
        self.at_distance(r2.sqrt())
    }

    /// Second spectral moment: the variance of a directional derivative.
    pub fn second_spectral_moment(&self) -> f64 {
        match self.kind {
            CovarianceKind::SquaredExponential => 1.0 / (self.length_scale * self.length_scale),
        }
    }

    pub fn tag(&self) -> String {
        match self.kind {
            CovarianceKind::SquaredExponential => format!("sqexp(ell={})", self.length_scale),
        }
    }
}

/// Marginal family of the observed field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FieldFamily {
    Gaussian,
    /// Sum of squares of `k` independent copies of the Gaussian field.
    ChiSquare { k: u32 },
}

impl FieldFamily {
    pub fn volume_density(&self, u: f64) -> Result<f64> {
        match *self {
            FieldFamily::Gaussian => Ok(gaussian_volume_density(u)),
            FieldFamily::ChiSquare { k } => chisq_volume_density(u, k),
        }
    }

    pub fn surface_density(&self, u: f64, lambda: f64, d: usize) -> Result<f64> {
        match *self {
            FieldFamily::Gaussian => gaussian_surface_density(u, lambda, d),
            FieldFamily::ChiSquare { k } => chisq_surface_density(u, lambda, d, k),
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            FieldFamily::Gaussian => "gaussian".to_string(),
            FieldFamily::ChiSquare { k } => format!("chisq(k={k})"),
        }
    }
}

/// Analytic volume and surface densities at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDensities {
    pub d: usize,
    pub u: f64,
    pub c_d_star: f64,
    pub c_dm1_star: f64,
}

impl ReferenceDensities {
    pub fn new(family: FieldFamily, model: &CovarianceModel, d: usize, u: f64) -> Result<Self> {
        check_dim(d, 2)?;
        Ok(Self {
            d,
            u,
            c_d_star: family.volume_density(u)?,
            c_dm1_star: family.surface_density(u, model.second_spectral_moment(), d)?,
        })
    }
}

fn check_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(Error::Domain(format!("dimension must be >= {min}, got {d}")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!(
            "second spectral moment must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// `Gamma((d+1)/2) / Gamma(d/2)`.
fn half_gamma_ratio(d: usize) -> f64 {
    let d = d as f64;
    gamma::gamma(0.5 * (d + 1.0)) / gamma::gamma(0.5 * d)
}

/// Dimensional constant `beta_d = 2 sqrt(pi) Gamma((d+1)/2) / Gamma(d/2)`.
///
/// `2d / beta_d` is the limiting bias factor of the naive surface estimator
/// on any point-referenced honeycomb: `4/pi` for `d = 2`, `3/2` for `d = 3`.
pub fn beta_d(d: usize) -> Result<f64> {
    check_dim(d, 1)?;
    Ok(2.0 * std::f64::consts::PI.sqrt() * half_gamma_ratio(d))
}

/// Limiting bias factor `2d / beta_d`.
pub fn bias_factor(d: usize) -> Result<f64> {
    Ok(2.0 * d as f64 / beta_d(d)?)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `P(Z >= x)` for standard normal `Z`, via the complementary error function.
#[inline]
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `C*_d(u) = P(X(0) >= u)` for a unit-variance Gaussian field.
pub fn gaussian_volume_density(u: f64) -> f64 {
    normal_sf(u)
}

/// `C*_{d-1}(u) = sqrt(lambda/pi) exp(-u^2/2) Gamma((d+1)/2) / Gamma(d/2)`.
pub fn gaussian_surface_density(u: f64, lambda: f64, d: usize) -> Result<f64> {
    check_lambda(lambda)?;
    check_dim(d, 2)?;
    Ok((lambda / std::f64::consts::PI).sqrt() * (-0.5 * u * u).exp() * half_gamma_ratio(d))
}

/// Survival function of a chi-square with `k` degrees of freedom.
pub fn chisq_volume_density(u: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("chi-square degrees of freedom must be >= 1".into()));
    }
    if u <= 0.0 {
        return Ok(1.0);
    }
    if u.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma::gamma_ur(0.5 * k as f64, 0.5 * u))
}

/// Surface density of the chi-square field with `k` degrees of freedom:
/// `sqrt(lambda) (u/2)^((k-1)/2) exp(-u/2) Gamma((d+1)/2) / (Gamma(k/2) Gamma(d/2))`.
///
/// Levels `u <= 0` are rejected; for `k = 1` the density diverges at `0+`.
///
/// The level set has two sheets `Z = +-sqrt(u)` and this closed form is half
/// its Hausdorff density; for `k = 1` it equals one Gaussian level at `sqrt(u)`.
pub fn chisq_surface_density(u: f64, lambda: f64, d: usize, k: u32) -> Result<f64> {
    check_lambda(lambda)?;
    check_dim(d, 2)?;
    if k == 0 {
        return Err(Error::Domain("chi-square degrees of freedom must be >= 1".into()));
    }
    if !(u > 0.0) {
        return Err(Error::Domain(format!("chi-square level must be > 0, got {u}")));
    }
    let kf = k as f64;
    Ok(lambda.sqrt() * (0.5 * u).powf(0.5 * (kf - 1.0)) * (-0.5 * u).exp() * half_gamma_ratio(d)
        / gamma::gamma(0.5 * kf))
}

/// `p_X(u) E[|grad X(0)|_1 | X(0) = u]` for the Gaussian field, equal to
/// `phi(u) d sqrt(2 lambda / pi)`. This is the level integrand that the
/// hypercubic estimator converges to, and equals `(2d/beta_d) C*_{d-1}(u)`.
pub fn gaussian_l1_limit(u: f64, lambda: f64, d: usize) -> Result<f64> {
    check_lambda(lambda)?;
    check_dim(d, 2)?;
    Ok(normal_pdf(u) * d as f64 * (2.0 * lambda / std::f64::consts::PI).sqrt())
}
