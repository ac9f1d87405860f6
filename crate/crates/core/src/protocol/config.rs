use serde::{Deserialize, Serialize};

use crate::analytic::decoherence_time;
use crate::error::{Error, Result};
use crate::fock::{truncation_dim, ComplexAmplitude, DEFAULT_TRUNCATION_EPS, PRODUCT_DIM_CAP};

/// Which atom realizes the parity probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Three-level cascade atom between two Ramsey zones, read out on `{e, g}`.
    Cascade,
    /// Degenerate lambda atom sent in `|b⟩`, read out on `{b, c}`.
    Lambda,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cascade" => Ok(Scheme::Cascade),
            "lambda" => Ok(Scheme::Lambda),
            other => Err(Error::invalid(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Random generator pinned into every run description.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RngAlgorithm {
    #[default]
    #[serde(rename = "chacha20")]
    ChaCha20,
}

/// Fully resolved run parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub alpha: ComplexAmplitude,
    /// Second cavity amplitude; present only for the correlated two-cavity run.
    pub beta: Option<ComplexAmplitude>,
    pub gamma: f64,
    pub n_atoms: usize,
    /// Interval between consecutive atoms.
    pub delta_t: f64,
    pub phi: f64,
    pub scheme: Scheme,
    /// Probability that a given atom is detected at all.
    pub detector_efficiency: f64,
    pub seed: u64,
    /// Truncation per cavity mode.
    pub dim: usize,
    /// 1-based atom indices that are never detected.
    pub forced_misses: Vec<usize>,
    pub rng: RngAlgorithm,
}

impl ProtocolConfig {
    /// Total mean photon number `|α|² + |β|²` of the initial cat.
    pub fn mean_photons(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.map_or(0.0, |b| b.norm_sqr())
    }

    pub fn mode_dims(&self) -> Vec<usize> {
        if self.beta.is_some() {
            vec![self.dim, self.dim]
        } else {
            vec![self.dim]
        }
    }

    pub fn is_forced_miss(&self, step: usize) -> bool {
        self.forced_misses.contains(&step)
    }

    /// Same settings with every field explicit; resolving it gives `self` back.
    pub fn to_settings(&self) -> ProtocolSettings {
        ProtocolSettings {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            n_atoms: self.n_atoms,
            delta_t: Some(self.delta_t),
            phi: Some(self.phi),
            scheme: Some(self.scheme),
            detector_efficiency: Some(self.detector_efficiency),
            seed: Some(self.seed),
            dim: Some(self.dim),
            forced_misses: self.forced_misses.clone(),
            rng: Some(self.rng),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.to_settings().resolve().map(|_| ())
    }
}

/// Run parameters before defaults are filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSettings {
    pub alpha: ComplexAmplitude,
    pub beta: Option<ComplexAmplitude>,
    pub gamma: f64,
    pub n_atoms: usize,
    /// Defaults to `t_d / n_atoms` with `t_d = 1/(2γ(|α|² + |β|²))`.
    pub delta_t: Option<f64>,
    /// Defaults to π.
    pub phi: Option<f64>,
    pub scheme: Option<Scheme>,
    pub detector_efficiency: Option<f64>,
    pub seed: Option<u64>,
    /// Defaults to the Poisson-tail truncation of the larger amplitude.
    pub dim: Option<usize>,
    pub forced_misses: Vec<usize>,
    pub rng: Option<RngAlgorithm>,
}

impl ProtocolSettings {
    pub fn new(alpha: ComplexAmplitude, gamma: f64, n_atoms: usize) -> Self {
        Self {
            alpha,
            beta: None,
            gamma,
            n_atoms,
            delta_t: None,
            phi: None,
            scheme: None,
            detector_efficiency: None,
            seed: None,
            dim: None,
            forced_misses: Vec::new(),
            rng: None,
        }
    }

    pub fn resolve(&self) -> Result<ProtocolConfig> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma {} must be finite and >= 0", self.gamma)));
        }
        if self.n_atoms == 0 {
            return Err(Error::invalid("n_atoms must be >= 1"));
        }
        let mean_photons = self.alpha.norm_sqr() + self.beta.map_or(0.0, |b| b.norm_sqr());
        let delta_t = match self.delta_t {
            Some(dt) => dt,
            None => {
                let t_d = decoherence_time(self.gamma, mean_photons);
                if !t_d.is_finite() {
                    return Err(Error::invalid(
                        "delta_t must be given when gamma or the amplitude is zero",
                    ));
                }
                t_d / self.n_atoms as f64
            }
        };
        if !(delta_t > 0.0 && delta_t.is_finite()) {
            return Err(Error::invalid(format!("delta_t {delta_t} must be finite and > 0")));
        }
        let phi = self.phi.unwrap_or(std::f64::consts::PI);
        if !phi.is_finite() {
            return Err(Error::invalid("phi must be finite"));
        }
        let detector_efficiency = self.detector_efficiency.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&detector_efficiency) {
            return Err(Error::invalid(format!(
                "detector_efficiency {detector_efficiency} must lie in [0, 1]"
            )));
        }
        if let Some(&bad) = self.forced_misses.iter().find(|&&k| k == 0 || k > self.n_atoms) {
            return Err(Error::invalid(format!(
                "forced miss {bad} is outside atoms 1..={}",
                self.n_atoms
            )));
        }
        let dim = match self.dim {
            Some(d) if d < 2 => return Err(Error::invalid("dim must be >= 2")),
            Some(d) => d,
            None => {
                let widest = match self.beta {
                    Some(b) if b.norm() > self.alpha.norm() => b,
                    _ => self.alpha,
                };
                truncation_dim(widest, DEFAULT_TRUNCATION_EPS)?
            }
        };
        if self.beta.is_some() && dim * dim > PRODUCT_DIM_CAP {
            return Err(Error::DimensionOverflow {
                requested: dim * dim,
                cap: PRODUCT_DIM_CAP,
            });
        }
        let mut forced_misses = self.forced_misses.clone();
        forced_misses.sort_unstable();
        forced_misses.dedup();
        Ok(ProtocolConfig {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            n_atoms: self.n_atoms,
            delta_t,
            phi,
            scheme: self.scheme.unwrap_or(Scheme::Cascade),
            detector_efficiency,
            seed: self.seed.unwrap_or(0),
            dim,
            forced_misses,
            rng: self.rng.unwrap_or_default(),
        })
    }
}
