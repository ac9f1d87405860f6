//! Run description files.
//!
//! A config file is flat TOML whose keys mirror [`ProtocolConfig`], plus
//! `trials` and an optional output `format`:
//!
//! ```toml
//! alpha = 1.4142135623730951   # or [re, im]
//! gamma = 1.0
//! n_atoms = 10
//! trials = 10000
//! # delta_t defaults to t_d / n_atoms
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use catguard::fock::ComplexAmplitude;
use catguard::protocol::{ProtocolConfig, ProtocolSettings, RngAlgorithm, Scheme};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_TRIALS: usize = 1000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// On-disk form. Optional keys fall back to the protocol defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: ComplexAmplitude,
    pub beta: Option<ComplexAmplitude>,
    pub gamma: f64,
    pub n_atoms: usize,
    pub delta_t: Option<f64>,
    pub phi: Option<f64>,
    pub scheme: Option<Scheme>,
    pub detector_efficiency: Option<f64>,
    pub seed: Option<u64>,
    pub dim: Option<usize>,
    #[serde(default)]
    pub forced_misses: Vec<usize>,
    pub rng: Option<RngAlgorithm>,
    pub trials: Option<usize>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn settings(&self) -> ProtocolSettings {
        ProtocolSettings {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            n_atoms: self.n_atoms,
            delta_t: self.delta_t,
            phi: self.phi,
            scheme: self.scheme,
            detector_efficiency: self.detector_efficiency,
            seed: self.seed,
            dim: self.dim,
            forced_misses: self.forced_misses.clone(),
            rng: self.rng,
        }
    }
}

/// Everything one command needs, after command-line overrides.
#[derive(Clone, Debug)]
pub struct RunManifest {
    /// Settings as written, before defaults. Sweeps re-resolve these per cell.
    pub settings: ProtocolSettings,
    pub config: ProtocolConfig,
    pub trials: usize,
    pub sweep_axes: Vec<SweepAxis>,
    pub output_path: PathBuf,
    pub format: Format,
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub axes: Vec<SweepAxis>,
}

impl RunManifest {
    pub fn load(config_path: &Path, output_path: &Path, overrides: Overrides) -> Result<Self> {
        let file = ConfigFile::load(config_path)?;
        Self::from_file(file, output_path, overrides)
    }

    pub fn from_file(file: ConfigFile, output_path: &Path, overrides: Overrides) -> Result<Self> {
        let mut settings = file.settings();
        if let Some(seed) = overrides.seed {
            settings.seed = Some(seed);
        }
        let trials = overrides.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::Usage("trials must be >= 1".into()));
        }
        let config = settings.resolve()?;
        Ok(Self {
            settings,
            config,
            trials,
            sweep_axes: overrides.axes,
            output_path: output_path.to_path_buf(),
            format: overrides.format.or(file.format).unwrap_or_default(),
        })
    }
}

/// Config fields a sweep can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisName {
    Alpha,
    Beta,
    Gamma,
    NAtoms,
    DeltaT,
    Phi,
    DetectorEfficiency,
    Dim,
    Scheme,
    Trials,
}

impl AxisName {
    const ALL: [(&'static str, AxisName); 10] = [
        ("alpha", AxisName::Alpha),
        ("beta", AxisName::Beta),
        ("gamma", AxisName::Gamma),
        ("n_atoms", AxisName::NAtoms),
        ("delta_t", AxisName::DeltaT),
        ("phi", AxisName::Phi),
        ("detector_efficiency", AxisName::DetectorEfficiency),
        ("dim", AxisName::Dim),
        ("scheme", AxisName::Scheme),
        ("trials", AxisName::Trials),
    ];

    pub fn as_str(self) -> &'static str {
        Self::ALL.iter().find(|(_, a)| *a == self).map(|(s, _)| *s).unwrap_or("?")
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL.iter().find(|(n, _)| *n == s).map(|(_, a)| *a).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|(n, _)| *n).collect();
            format!("unknown sweep axis {s:?} (expected one of {})", names.join(", "))
        })
    }
}

/// One `--axis name=v1,v2,...` argument. Values keep their spelling so
/// they can be echoed verbatim into the output.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub name: AxisName,
    pub values: Vec<String>,
}

impl SweepAxis {
    /// Sets this axis to `values[index]`.
    pub fn apply(&self, index: usize, settings: &mut ProtocolSettings, trials: &mut usize) -> Result<()> {
        apply_value(self.name, &self.values[index], settings, trials)
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, list) = s
            .split_once('=')
            .ok_or_else(|| format!("axis {s:?} is not of the form name=v1,v2,..."))?;
        let name: AxisName = name.trim().parse()?;
        let values: Vec<String> = list.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(format!("axis {name} has an empty value"));
        }
        // check every value once so bad input fails before any work starts
        let mut scratch = ProtocolSettings::new(ComplexAmplitude::real(1.0), 1.0, 1);
        let mut trials = 1;
        for v in &values {
            apply_value(name, v, &mut scratch, &mut trials).map_err(|e| e.to_string())?;
        }
        Ok(Self { name, values })
    }
}

fn apply_value(name: AxisName, raw: &str, s: &mut ProtocolSettings, trials: &mut usize) -> Result<()> {
    let bad = |what: &str| CliError::Usage(format!("sweep axis {name}: {raw:?} is not {what}"));
    let real = || raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("a finite number"));
    let count = || raw.parse::<usize>().map_err(|_| bad("a non-negative integer"));
    match name {
        AxisName::Alpha => s.alpha = ComplexAmplitude::real(real()?),
        AxisName::Beta => s.beta = Some(ComplexAmplitude::real(real()?)),
        AxisName::Gamma => s.gamma = real()?,
        AxisName::NAtoms => s.n_atoms = count()?,
        AxisName::DeltaT => s.delta_t = Some(real()?),
        AxisName::Phi => s.phi = Some(real()?),
        AxisName::DetectorEfficiency => s.detector_efficiency = Some(real()?),
        AxisName::Dim => s.dim = Some(count()?),
        AxisName::Scheme => s.scheme = Some(raw.parse().map_err(|_| bad("cascade or lambda"))?),
        AxisName::Trials => {
            *trials = count()?;
            if *trials == 0 {
                return Err(bad("a positive trial count"));
            }
        }
    }
    Ok(())
}
