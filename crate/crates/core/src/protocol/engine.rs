use num_complex::Complex64;
use rayon::prelude::*;

use super::config::ProtocolConfig;
use super::probe::{dispersive_step, measure_atom, FieldLayout, Outcome, ProbeOperators};
use super::rng::TrajectoryRng;
use crate::error::{Error, Result};
use crate::fock::{cat_state, fidelity_pure, two_mode_cat_state, FockMatrix, FockVector, Parity};
use crate::lindblad::DampingChannel;

/// One probe cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomStepRecord {
    /// 1-based atom index.
    pub index: usize,
    pub outcome: Outcome,
    /// Upper/lower probabilities of the field the atom actually met.
    pub p_e_predicted: f64,
    pub p_g_predicted: f64,
    /// Fidelity of the post-step field with the even cat at `α_index`.
    pub field_fidelity_even: f64,
    pub mean_photon: f64,
    pub parity: f64,
}

#[derive(Clone, Debug)]
pub struct TrajectoryResult {
    pub steps: Vec<AtomStepRecord>,
    pub final_field: FockMatrix,
    pub all_upper: bool,
}

impl TrajectoryResult {
    pub fn outcomes(&self) -> Vec<Outcome> {
        self.steps.iter().map(|s| s.outcome).collect()
    }
}

/// Aggregates over independent trajectories. Standard errors of
/// frequencies are binomial, `√(p̂(1−p̂)/trials)`; those of means are
/// sample standard deviations over `√trials`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub trials: usize,
    pub all_upper_frequency: f64,
    pub all_upper_se: f64,
    pub per_step_upper_frequency: Vec<f64>,
    pub per_step_upper_se: Vec<f64>,
    pub per_step_mean_fidelity_even: Vec<f64>,
    pub per_step_mean_parity: Vec<f64>,
    pub per_step_mean_photon: Vec<f64>,
    pub mean_final_fidelity_even: f64,
    pub final_fidelity_se: f64,
}

/// Everything about a run that does not depend on the random stream.
#[derive(Clone, Debug)]
pub struct Protocol {
    config: ProtocolConfig,
    layout: FieldLayout,
    photons: Vec<usize>,
    channels: Vec<DampingChannel>,
    probes: ProbeOperators,
    initial: FockMatrix,
    /// Ideal even cat at the amplitudes reached by probe 1 … N.
    targets: Vec<FockVector>,
}

impl Protocol {
    pub fn new(config: &ProtocolConfig) -> Result<Self> {
        config.validate()?;
        let layout = FieldLayout::new(config.mode_dims())?;
        let photons = layout.photons();
        let channels = layout
            .dims()
            .iter()
            .map(|&d| DampingChannel::new(config.gamma, config.delta_t, d))
            .collect::<Result<Vec<_>>>()?;
        let probes = ProbeOperators::new(config.scheme, config.phi, &photons);
        let even_cat = |k: usize| -> Result<FockVector> {
            let t = k as f64 * config.delta_t;
            let alpha = config.alpha.decayed(config.gamma, t);
            match config.beta {
                None => cat_state(alpha, Parity::Even, config.dim),
                Some(beta) => two_mode_cat_state(
                    alpha,
                    beta.decayed(config.gamma, t),
                    Parity::Even,
                    config.dim,
                    config.dim,
                ),
            }
        };
        let initial = even_cat(0)?.projector();
        let targets = (1..=config.n_atoms).map(even_cat).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: config.clone(),
            layout,
            photons,
            channels,
            probes,
            initial,
            targets,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn layout(&self) -> &FieldLayout {
        &self.layout
    }

    pub fn probes(&self) -> &ProbeOperators {
        &self.probes
    }

    pub fn initial_field(&self) -> &FockMatrix {
        &self.initial
    }

    /// Damps every mode for one inter-atom interval.
    pub fn decay(&self, field: &FockMatrix) -> Result<FockMatrix> {
        let mut out = field.clone();
        for (mode, channel) in self.channels.iter().enumerate() {
            out = channel.apply_to_mode(&out, self.layout.dims(), mode)?;
        }
        Ok(out)
    }

    pub fn mean_photon(&self, field: &FockMatrix) -> f64 {
        self.photons
            .iter()
            .enumerate()
            .map(|(i, &n)| n as f64 * field.get(i, i).re)
            .sum()
    }

    pub fn parity(&self, field: &FockMatrix) -> f64 {
        self.photons
            .iter()
            .enumerate()
            .map(|(i, &n)| if n % 2 == 0 { field.get(i, i).re } else { -field.get(i, i).re })
            .sum()
    }

    fn run(&self, trial: u64) -> Result<TrajectoryResult> {
        let cfg = &self.config;
        let mut rng = TrajectoryRng::for_trial(cfg.seed, trial);
        let mut field = self.initial.clone();
        let mut steps = Vec::with_capacity(cfg.n_atoms);
        for (k, target) in (1..=cfg.n_atoms).zip(&self.targets) {
            field = self.decay(&field)?;
            let branches = dispersive_step(&field, &self.probes)?;
            let (outcome, next) =
                measure_atom(&branches, cfg.detector_efficiency, cfg.is_forced_miss(k), &mut rng)?;
            field = next;
            steps.push(AtomStepRecord {
                index: k,
                outcome,
                p_e_predicted: branches.trace_upper / branches.total(),
                p_g_predicted: branches.trace_lower / branches.total(),
                field_fidelity_even: fidelity_pure(&field, target)?,
                mean_photon: self.mean_photon(&field),
                parity: self.parity(&field),
            });
        }
        let all_upper = steps.iter().all(|s| s.outcome == Outcome::Upper);
        Ok(TrajectoryResult {
            steps,
            final_field: field,
            all_upper,
        })
    }

    /// Trajectory number `trial`, drawn from its own random stream.
    pub fn trajectory(&self, trial: u64) -> Result<TrajectoryResult> {
        self.run(trial)
    }

    /// Expected frequency of the upper readout at each probe, averaged over
    /// all measurement records. The record-averaged field after any probe
    /// is `Π₊ρΠ₊† + Π₋ρΠ₋†` whether or not the atom was detected.
    pub fn expected_upper_frequencies(&self) -> Result<Vec<f64>> {
        let mut field = self.initial.clone();
        let mut out = Vec::with_capacity(self.config.n_atoms);
        for k in 1..=self.config.n_atoms {
            field = self.decay(&field)?;
            let b = dispersive_step(&field, &self.probes)?;
            let detect = if self.config.is_forced_miss(k) { 0.0 } else { self.config.detector_efficiency };
            out.push(detect * b.trace_upper / b.total());
            field = b.upper.add(&b.lower)?;
        }
        Ok(out)
    }

    /// Probability that every atom is detected in the upper level, from the
    /// deterministic upper-conditioned field sequence.
    pub fn all_upper_probability(&self) -> Result<f64> {
        let mut field = self.initial.clone();
        let mut prob = 1.0;
        for k in 1..=self.config.n_atoms {
            if self.config.is_forced_miss(k) {
                return Ok(0.0);
            }
            field = self.decay(&field)?;
            let b = dispersive_step(&field, &self.probes)?;
            prob *= self.config.detector_efficiency * b.trace_upper / b.total();
            if b.trace_upper < 1e-14 {
                return Ok(0.0);
            }
            field = b.upper.scale(Complex64::new(1.0 / b.trace_upper, 0.0));
        }
        Ok(prob)
    }

    pub fn ensemble(&self, trials: usize) -> Result<EnsembleStats> {
        if trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        let runs: Vec<TrajectoryResult> = (0..trials as u64)
            .into_par_iter()
            .map(|trial| self.run(trial).map(compact))
            .collect::<Result<_>>()?;
        Ok(aggregate(&runs, self.config.n_atoms))
    }
}

/// Drops the final field so large ensembles stay small in memory.
fn compact(mut result: TrajectoryResult) -> TrajectoryResult {
    result.final_field = FockMatrix::zeros(1);
    result
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

// Sums run in trial order, so the result is independent of thread scheduling.
fn aggregate(runs: &[TrajectoryResult], n_atoms: usize) -> EnsembleStats {
    let trials = runs.len();
    let n = trials as f64;
    let mut upper = vec![0usize; n_atoms];
    let mut fidelity = vec![0.0; n_atoms];
    let mut parity = vec![0.0; n_atoms];
    let mut photons = vec![0.0; n_atoms];
    let mut all_upper = 0usize;
    let mut final_sum = 0.0;
    let mut final_sq = 0.0;
    for run in runs {
        all_upper += run.all_upper as usize;
        for (k, s) in run.steps.iter().enumerate() {
            upper[k] += (s.outcome == Outcome::Upper) as usize;
            fidelity[k] += s.field_fidelity_even;
            parity[k] += s.parity;
            photons[k] += s.mean_photon;
        }
        let f = run.steps.last().map_or(1.0, |s| s.field_fidelity_even);
        final_sum += f;
        final_sq += f * f;
    }
    let per_step_upper_frequency: Vec<f64> = upper.iter().map(|&u| u as f64 / n).collect();
    let all_upper_frequency = all_upper as f64 / n;
    let mean_final = final_sum / n;
    let variance = if trials > 1 {
        ((final_sq - n * mean_final * mean_final) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    EnsembleStats {
        trials,
        all_upper_frequency,
        all_upper_se: binomial_se(all_upper_frequency, trials),
        per_step_upper_se: per_step_upper_frequency.iter().map(|&p| binomial_se(p, trials)).collect(),
        per_step_upper_frequency,
        per_step_mean_fidelity_even: fidelity.iter().map(|f| f / n).collect(),
        per_step_mean_parity: parity.iter().map(|p| p / n).collect(),
        per_step_mean_photon: photons.iter().map(|p| p / n).collect(),
        mean_final_fidelity_even: mean_final,
        final_fidelity_se: (variance / n).sqrt(),
    }
}

/// Single trajectory (trial 0) for `config`.
pub fn run_trajectory(config: &ProtocolConfig) -> Result<TrajectoryResult> {
    Protocol::new(config)?.trajectory(0)
}

/// Trajectory of the correlated two-cavity cat; `config.beta` must be set.
pub fn run_two_cavity_trajectory(config: &ProtocolConfig) -> Result<TrajectoryResult> {
    if config.beta.is_none() {
        return Err(Error::invalid("two-cavity run needs beta"));
    }
    run_trajectory(config)
}

/// `trials` independent trajectories, stream `i` for trial `i`.
pub fn run_ensemble(config: &ProtocolConfig, trials: usize) -> Result<EnsembleStats> {
    Protocol::new(config)?.ensemble(trials)
}
