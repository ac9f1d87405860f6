//! Expected values written next to the sampled columns.
//!
//! At φ = π the closed forms apply directly (the correlated two-cavity cat
//! behaves as one mode with `|α|² + |β|²` photons). Any other phase falls
//! back to propagating the truncated density matrix.

use std::f64::consts::PI;

use catguard::analytic::{per_step_upper_probabilities, sequence_all_excited, two_cavity_weights};
use catguard::fock::ComplexAmplitude;
use catguard::protocol::{Protocol, ProtocolConfig};

use crate::error::Result;

fn closed_forms_apply(cfg: &ProtocolConfig) -> bool {
    cfg.phi == PI
}

/// Record-averaged probability of an upper readout at probes `1 … N`.
pub fn upper_per_step(cfg: &ProtocolConfig) -> Result<Vec<f64>> {
    if !closed_forms_apply(cfg) {
        return Ok(Protocol::new(cfg)?.expected_upper_frequencies()?);
    }
    let mut out = match cfg.beta {
        None => per_step_upper_probabilities(
            cfg.alpha,
            cfg.gamma,
            cfg.delta_t,
            cfg.n_atoms,
            cfg.detector_efficiency,
        )?,
        Some(beta) => (1..=cfg.n_atoms)
            .map(|k| {
                let dec = two_cavity_weights(cfg.alpha, beta, cfg.gamma, k as f64 * cfg.delta_t)?;
                Ok(cfg.detector_efficiency * dec.p_even)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    for &k in &cfg.forced_misses {
        out[k - 1] = 0.0;
    }
    Ok(out)
}

/// Probability that every atom is detected in the upper level.
pub fn all_upper(cfg: &ProtocolConfig) -> Result<f64> {
    if !closed_forms_apply(cfg) {
        return Ok(Protocol::new(cfg)?.all_upper_probability()?);
    }
    if !cfg.forced_misses.is_empty() {
        return Ok(0.0);
    }
    let effective = ComplexAmplitude::real(cfg.mean_photons().sqrt());
    let seq = sequence_all_excited(effective, cfg.gamma, cfg.delta_t, cfg.n_atoms)?;
    Ok(seq.chained * cfg.detector_efficiency.powi(cfg.n_atoms as i32))
}
