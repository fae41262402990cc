use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field_models::{CovarianceModel, FieldFamily};

/// Which campaign to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BiasSweep,
    Crossing,
    Clt,
    CroftonDemo,
    VolumeCheck,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::BiasSweep => "bias-sweep",
            ExperimentKind::Crossing => "crossing",
            ExperimentKind::Clt => "clt",
            ExperimentKind::CroftonDemo => "crofton-demo",
            ExperimentKind::VolumeCheck => "volume-check",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bias-sweep" => Ok(ExperimentKind::BiasSweep),
            "crossing" => Ok(ExperimentKind::Crossing),
            "clt" => Ok(ExperimentKind::Clt),
            "crofton-demo" => Ok(ExperimentKind::CroftonDemo),
            "volume-check" => Ok(ExperimentKind::VolumeCheck),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tessellation used by a bias sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoneycombKind {
    Hypercubic,
    Hexagonal,
    Voronoi,
}

impl HoneycombKind {
    pub fn name(&self) -> &'static str {
        match self {
            HoneycombKind::Hypercubic => "hypercubic",
            HoneycombKind::Hexagonal => "hexagonal",
            HoneycombKind::Voronoi => "voronoi",
        }
    }
}

impl FromStr for HoneycombKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypercubic" => Ok(HoneycombKind::Hypercubic),
            "hexagonal" => Ok(HoneycombKind::Hexagonal),
            "voronoi" => Ok(HoneycombKind::Voronoi),
            other => Err(Error::Config(format!("unknown honeycomb '{other}'"))),
        }
    }
}

/// Analytic shape for the Crofton demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    /// Circle of radius equal to the sweep value.
    Circle,
    /// Square boundary of side equal to the sweep value.
    Square,
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(ShapeKind::Circle),
            "square" => Ok(ShapeKind::Square),
            other => Err(Error::Config(format!("unknown shape '{other}'"))),
        }
    }
}

/// Everything a campaign needs. Output paths and the thread count do not
/// affect results and are left out of [`CampaignConfig::hash`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub experiment: ExperimentKind,
    pub honeycomb: HoneycombKind,
    pub d: usize,
    pub length_scale: f64,
    pub family: FieldFamily,
    /// Levels; every level is evaluated on the same draws.
    pub levels: Vec<f64>,
    /// Cell size (bias sweep, volume check), lag `q` (crossing), half-extent
    /// `N` (clt) or shape size (crofton demo).
    pub sweep: Vec<f64>,
    /// Lattice spacing of the clt windows.
    pub delta: f64,
    /// Half-width of the cubic window `T`.
    pub half_width: f64,
    pub reps: usize,
    pub seed: u64,
    pub n_pairs: usize,
    pub n_lines: usize,
    pub shape: ShapeKind,
    /// Crofton bounding radius as a multiple of the shape's circumradius.
    pub bounding_factor: f64,
    /// Largest point set handed to the dense point sampler.
    pub point_cap: usize,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub replicates_out: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let mut c = Self {
            experiment,
            honeycomb: HoneycombKind::Hypercubic,
            d: 2,
            length_scale: 1.0,
            family: FieldFamily::Gaussian,
            levels: vec![0.0],
            sweep: vec![0.5, 0.25, 0.125],
            delta: 0.1,
            half_width: 4.0,
            reps: 20,
            seed: 1,
            n_pairs: 100_000,
            n_lines: 10_000,
            shape: ShapeKind::Circle,
            bounding_factor: 1.5,
            point_cap: 8192,
            threads: 0,
            out: None,
            summary: None,
            replicates_out: None,
        };
        match experiment {
            ExperimentKind::BiasSweep => {}
            ExperimentKind::Crossing => {
                c.sweep = vec![0.4, 0.2, 0.1, 0.05, 0.02];
                c.reps = 10;
            }
            ExperimentKind::Clt => {
                c.sweep = vec![10.0, 20.0, 40.0];
                c.reps = 50;
            }
            ExperimentKind::CroftonDemo => {
                c.sweep = vec![1.0];
                c.reps = 10;
            }
            ExperimentKind::VolumeCheck => {
                c.sweep = vec![0.25];
                c.levels = vec![0.0, 1.0];
                c.reps = 50;
            }
        }
        c
    }

    /// Parses flat `key = value` text; `#` starts a comment. Keys not
    /// mentioned keep the defaults of the named experiment.
    pub fn parse(text: &str, fallback: ExperimentKind) -> Result<Self> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let experiment = match pairs.iter().rev().find(|(k, _)| k == "experiment") {
            Some((_, v)) => v.parse()?,
            None => fallback,
        };
        let mut cfg = Self::defaults(experiment);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path, fallback: ExperimentKind) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, fallback)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.parse()?,
            "honeycomb" => self.honeycomb = value.parse()?,
            "d" | "dim" => self.d = num(key, value)?,
            "length_scale" => self.length_scale = num(key, value)?,
            "family" => {
                self.family = match value {
                    "gaussian" => FieldFamily::Gaussian,
                    "chi-square" | "chisq" => FieldFamily::ChiSquare {
                        k: match self.family {
                            FieldFamily::ChiSquare { k } => k,
                            FieldFamily::Gaussian => 1,
                        },
                    },
                    other => return Err(Error::Config(format!("unknown family '{other}'"))),
                }
            }
            "k" => {
                let k: u32 = num(key, value)?;
                self.family = FieldFamily::ChiSquare { k };
            }
            "u" | "levels" => self.levels = list(key, value)?,
            "sweep" => self.sweep = list(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "half_width" => self.half_width = num(key, value)?,
            "reps" => self.reps = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "n_pairs" => self.n_pairs = num(key, value)?,
            "n_lines" => self.n_lines = num(key, value)?,
            "shape" => self.shape = value.parse()?,
            "bounding_factor" => self.bounding_factor = num(key, value)?,
            "point_cap" => self.point_cap = num(key, value)?,
            "threads" => self.threads = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "summary" => self.summary = Some(PathBuf::from(value)),
            "replicates_out" => self.replicates_out = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn model(&self) -> Result<CovarianceModel> {
        CovarianceModel::squared_exponential(self.length_scale).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks the invariants every campaign relies on.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.reps < 2 {
            return bad(format!("reps must be >= 2, got {}", self.reps));
        }
        if self.sweep.is_empty() {
            return bad("sweep list is empty".into());
        }
        if self.sweep.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return bad(format!("sweep values must be positive, got {:?}", self.sweep));
        }
        let increasing = self.sweep.windows(2).all(|w| w[0] < w[1]);
        let decreasing = self.sweep.windows(2).all(|w| w[0] > w[1]);
        match self.experiment {
            ExperimentKind::Clt => {
                if !increasing {
                    return bad("clt half-extents must be strictly increasing".into());
                }
                if self.sweep.iter().any(|n| n.fract() != 0.0) {
                    return bad("clt half-extents must be integers".into());
                }
                if !(self.delta > 0.0 && self.delta.is_finite()) {
                    return bad(format!("delta must be positive, got {}", self.delta));
                }
            }
            _ if !decreasing => return bad("sweep values must be strictly decreasing".into()),
            _ => {}
        }
        if self.levels.is_empty() || self.levels.iter().any(|u| !u.is_finite()) {
            return bad("at least one finite level is required".into());
        }
        if self.d == 0 {
            return bad("d must be >= 1".into());
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return bad(format!("half_width must be positive, got {}", self.half_width));
        }
        if let FieldFamily::ChiSquare { k: 0 } = self.family {
            return bad("chi-square needs k >= 1".into());
        }
        if !(self.bounding_factor >= 1.0) {
            return bad("bounding_factor must be >= 1".into());
        }
        self.model()?;
        Ok(())
    }

    /// Canonical `key=value` lines of every result-affecting setting.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        let join = |xs: &[f64]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        m.insert("experiment".into(), self.experiment.name().into());
        m.insert("honeycomb".into(), self.honeycomb.name().into());
        m.insert("d".into(), self.d.to_string());
        m.insert("length_scale".into(), format!("{:?}", self.length_scale));
        m.insert("family".into(), self.family.tag());
        m.insert("levels".into(), join(&self.levels));
        m.insert("sweep".into(), join(&self.sweep));
        m.insert("delta".into(), format!("{:?}", self.delta));
        m.insert("half_width".into(), format!("{:?}", self.half_width));
        m.insert("reps".into(), self.reps.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("n_pairs".into(), self.n_pairs.to_string());
        m.insert("n_lines".into(), self.n_lines.to_string());
        m.insert("shape".into(), format!("{:?}", self.shape).to_lowercase());
        m.insert("bounding_factor".into(), format!("{:?}", self.bounding_factor));
        m.insert("point_cap".into(), self.point_cap.to_string());
        m
    }

    /// First 16 hex digits of the SHA-256 of [`CampaignConfig::canonical`].
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse '{value}' for key '{key}'")))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides_defaults() {
        let text = "# demo\nexperiment = bias-sweep\nhoneycomb = voronoi\nsweep = 0.25, 0.125\nreps = 4 # few\nk = 2\n";
        let c = CampaignConfig::parse(text, ExperimentKind::Clt).unwrap();
        assert_eq!(c.experiment, ExperimentKind::BiasSweep);
        assert_eq!(c.honeycomb, HoneycombKind::Voronoi);
        assert_eq!(c.sweep, vec![0.25, 0.125]);
        assert_eq!(c.reps, 4);
        assert_eq!(c.family, FieldFamily::ChiSquare { k: 2 });
        c.validate().unwrap();
    }

    #[test]
    fn bad_input_is_a_config_error() {
        assert!(matches!(CampaignConfig::parse("reps = x", ExperimentKind::Clt), Err(Error::Config(_))));
        assert!(matches!(CampaignConfig::parse("nonsense", ExperimentKind::Clt), Err(Error::Config(_))));
        assert!(matches!(CampaignConfig::parse("colour = red", ExperimentKind::Clt), Err(Error::Config(_))));
        let mut c = CampaignConfig::defaults(ExperimentKind::BiasSweep);
        c.reps = 1;
        assert!(c.validate().is_err());
        c.reps = 2;
        c.sweep = vec![0.125, 0.25];
        assert!(c.validate().is_err());
        c.sweep = vec![0.25, 0.0];
        assert!(c.validate().is_err());
        let mut clt = CampaignConfig::defaults(ExperimentKind::Clt);
        clt.validate().unwrap();
        clt.sweep = vec![40.0, 20.0];
        assert!(clt.validate().is_err());
    }

    #[test]
    fn hash_ignores_outputs_and_threads() {
        let a = CampaignConfig::defaults(ExperimentKind::BiasSweep);
        let mut b = a.clone();
        b.threads = 7;
        b.out = Some("x.csv".into());
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
    }
}
