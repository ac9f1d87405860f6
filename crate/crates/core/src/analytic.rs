//! Closed-form description of a dissipating cat and of the parity-probe
//! statistics built on it.
//!
//! A cat `(|α⟩ + |−α⟩)` damped at zero temperature for a time `t` stays
//! diagonal in the basis of even and odd cats at the decayed amplitude
//! `α_t = α e^{−γt/2}`. Everything here is a pure function of `(α, γ, t)`;
//! the numerical counterparts live in [`crate::lindblad`] and
//! [`crate::protocol`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    cat_state_prepared, two_mode_cat_state, ComplexAmplitude, FockMatrix, Parity, TRUNCATION_WARN,
};

/// Even/odd decomposition of a damped cat.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatDecomposition {
    pub alpha_t: ComplexAmplitude,
    /// Surviving fraction of the `|α_t⟩⟨−α_t|` coherence relative to the
    /// initial cat, `e^{−2|α|²(1−e^{−γt})}` for a freely damped even cat.
    pub coherence_factor: f64,
    pub p_even: f64,
    pub p_odd: f64,
}

/// Outcome probabilities of one parity probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepProbabilities {
    pub p_e: f64,
    pub p_g: f64,
}

impl StepProbabilities {
    pub fn from_weights(upper: f64, lower: f64) -> Self {
        let total = upper + lower;
        Self {
            p_e: upper / total,
            p_g: lower / total,
        }
    }
}

/// Overlap `⟨−α|α⟩ = e^{−2|α|²}` for a squared modulus `x = |α|²`.
fn overlap(x: f64) -> f64 {
    (-2.0 * x).exp()
}

/// `1 − e^{−γt}` without cancellation at small `γt`.
fn decayed_fraction(gamma: f64, t: f64) -> f64 {
    -(-gamma * t).exp_m1()
}

fn check_rate_and_time(gamma: f64, t: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("decay rate {gamma} must be finite and >= 0")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("time {t} must be finite and >= 0")));
    }
    Ok(())
}

/// `1/√(2(1 ± e^{−2|α|²}))`.
pub fn normalization_factor(alpha: ComplexAmplitude, parity: Parity) -> Result<f64> {
    normalization_from_norm_sqr(alpha.norm_sqr(), parity)
}

fn normalization_from_norm_sqr(x: f64, parity: Parity) -> Result<f64> {
    let denom = match parity {
        Parity::Even => 2.0 * (1.0 + overlap(x)),
        // 1 − e^{−2x} via exp_m1 keeps small odd cats accurate
        Parity::Odd => -2.0 * (-2.0 * x).exp_m1(),
    };
    if denom == 0.0 {
        return Err(Error::DegenerateState("odd cat is undefined at alpha = 0"));
    }
    Ok(1.0 / denom.sqrt())
}

/// Even/odd weights of a cat of the given parity after free damping.
///
/// Starting from parity `s`, the weight leaking to the other parity is
/// `N_s²(1−F)(1 − s e^{−2|α_t|²})`; the rest, `N_s²(1+F)(1 + s e^{−2|α_t|²})`,
/// stays.
pub fn damped_cat_from(
    alpha: ComplexAmplitude,
    parity: Parity,
    gamma: f64,
    t: f64,
) -> Result<CatDecomposition> {
    check_rate_and_time(gamma, t)?;
    let x = alpha.norm_sqr();
    let norm_sqr = normalization_from_norm_sqr(x, parity)?.powi(2);
    let alpha_t = alpha.decayed(gamma, t);
    let coherence_factor = (-2.0 * x * decayed_fraction(gamma, t)).exp();
    let overlap_t = overlap(alpha_t.norm_sqr());
    // the small leaked weight is computed directly, the kept one by complement
    let leaked = norm_sqr * (1.0 - coherence_factor) * (1.0 - parity.sign() * overlap_t);
    let kept = 1.0 - leaked;
    let (p_even, p_odd) = match parity {
        Parity::Even => (kept, leaked),
        Parity::Odd => (leaked, kept),
    };
    Ok(CatDecomposition {
        alpha_t,
        coherence_factor,
        p_even,
        p_odd,
    })
}

/// Decomposition of the even cat at `α` after damping for `t`.
pub fn damped_cat(alpha: ComplexAmplitude, gamma: f64, t: f64) -> Result<CatDecomposition> {
    damped_cat_from(alpha, Parity::Even, gamma, t)
}

/// `p_even |C₊(α_t)⟩⟨C₊| + p_odd |C₋(α_t)⟩⟨C₋|` with normalized cats.
pub fn reconstruct_density(dec: &CatDecomposition, dim: usize) -> Result<FockMatrix> {
    let mut rho = FockMatrix::zeros(dim);
    for (parity, weight) in [(Parity::Even, dec.p_even), (Parity::Odd, dec.p_odd)] {
        if weight == 0.0 {
            continue;
        }
        let prepared = cat_state_prepared(dec.alpha_t, parity, dim)?;
        if prepared.norm_deficit > TRUNCATION_WARN {
            return Err(Error::Truncation {
                deficit: prepared.norm_deficit,
                tolerance: TRUNCATION_WARN,
            });
        }
        rho = rho.add(&prepared.state.projector().scale(Complex64::new(weight, 0.0)))?;
    }
    Ok(rho)
}

/// Upper/lower probe probabilities for an even cat at `α` that has damped
/// for `t`, written as the product of the coherence factor and the
/// decayed-overlap factor.
pub fn detection_probabilities(
    alpha: ComplexAmplitude,
    gamma: f64,
    t: f64,
) -> Result<StepProbabilities> {
    check_rate_and_time(gamma, t)?;
    let x = alpha.norm_sqr();
    let n_sqr = normalization_from_norm_sqr(x, Parity::Even)?.powi(2);
    let coherence = (-2.0 * x * decayed_fraction(gamma, t)).exp();
    let overlap_t = (-2.0 * x * (-gamma * t).exp()).exp();
    Ok(StepProbabilities {
        p_e: n_sqr * (1.0 + coherence) * (1.0 + overlap_t),
        p_g: n_sqr * (1.0 - coherence) * (1.0 - overlap_t),
    })
}

/// `t_d = 1/(2γ m)` for total mean photon number `m`.
pub fn decoherence_time(gamma: f64, mean_photons: f64) -> f64 {
    1.0 / (2.0 * gamma * mean_photons)
}

/// Probability that every probe in a regularly spaced sequence reads the
/// upper level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceProbability {
    /// Product of single-step probabilities, `α_n = α e^{−nγΔt/2}` for
    /// `n = 0 … N−1`. This is the normative value.
    pub chained: f64,
    /// The same product run over `n = 0 … N`, i.e. with one extra factor.
    pub closed_product: f64,
}

impl SequenceProbability {
    pub fn discrepancy(&self) -> f64 {
        self.closed_product - self.chained
    }
}

pub fn sequence_all_excited(
    alpha: ComplexAmplitude,
    gamma: f64,
    delta_t: f64,
    n_atoms: usize,
) -> Result<SequenceProbability> {
    if n_atoms == 0 {
        return Err(Error::invalid("need at least one atom"));
    }
    if !(delta_t > 0.0) {
        return Err(Error::invalid(format!("delta_t {delta_t} must be > 0")));
    }
    let step = |n: usize| -> Result<f64> {
        let alpha_n = alpha.decayed(gamma, n as f64 * delta_t);
        Ok(detection_probabilities(alpha_n, gamma, delta_t)?.p_e)
    };
    let mut chained = 1.0;
    for n in 0..n_atoms {
        chained *= step(n)?;
    }
    let closed_product = chained * step(n_atoms)?;
    if (closed_product - chained).abs() > 1e-12 {
        log::debug!(
            "sequence of {n_atoms}: chained {chained} vs (N+1)-factor product {closed_product}"
        );
    }
    Ok(SequenceProbability {
        chained,
        closed_product,
    })
}

/// Expected upper-level frequency at each probe `k = 1 … N` averaged over
/// all measurement records.
///
/// A detection or a miss both leave the ensemble-averaged field equal to
/// the parity-dephased state, and a damped cat is already parity-diagonal,
/// so the average field at probe `k` is the freely damped cat at `kΔt`.
pub fn per_step_upper_probabilities(
    alpha: ComplexAmplitude,
    gamma: f64,
    delta_t: f64,
    n_atoms: usize,
    efficiency: f64,
) -> Result<Vec<f64>> {
    (1..=n_atoms)
        .map(|k| Ok(efficiency * damped_cat(alpha, gamma, k as f64 * delta_t)?.p_even))
        .collect()
}

/// One undetected probe followed by `Δt` of damping.
///
/// `dec` is the field when the undetected atom passes; `alpha_n` is the
/// amplitude of the last pure cat, against which the returned coherence
/// factor is expressed. The second value gives the probabilities for the
/// next probe.
pub fn missed_atom_update(
    dec: &CatDecomposition,
    alpha_n: ComplexAmplitude,
    gamma: f64,
    delta_t: f64,
) -> Result<(CatDecomposition, StepProbabilities)> {
    check_rate_and_time(gamma, delta_t)?;
    // A miss leaves Π₊ρΠ₊ + Π₋ρΠ₋, which is ρ itself for a parity-diagonal ρ.
    let mut p_even = 0.0;
    let mut p_odd = 0.0;
    for (parity, weight) in [(Parity::Even, dec.p_even), (Parity::Odd, dec.p_odd)] {
        if weight == 0.0 {
            continue;
        }
        let branch = damped_cat_from(dec.alpha_t, parity, gamma, delta_t)?;
        p_even += weight * branch.p_even;
        p_odd += weight * branch.p_odd;
    }
    let alpha_t = dec.alpha_t.decayed(gamma, delta_t);
    let reference = normalization_factor(alpha_n, Parity::Even)?.powi(2)
        * (1.0 + overlap(alpha_t.norm_sqr()));
    let updated = CatDecomposition {
        alpha_t,
        coherence_factor: p_even / reference - 1.0,
        p_even,
        p_odd,
    };
    Ok((updated, StepProbabilities::from_weights(p_even, p_odd)))
}

/// Closed-form weights two intervals after the last pure cat at `α_n`,
/// with an undetected atom in between: coherence
/// `e^{−2|α_n|²(1−e^{−2γΔt})}` on cats at `α_{n+2} = α_n e^{−γΔt}`.
pub fn closed_form_miss_weights(
    alpha_n: ComplexAmplitude,
    gamma: f64,
    delta_t: f64,
) -> Result<CatDecomposition> {
    check_rate_and_time(gamma, delta_t)?;
    let x = alpha_n.norm_sqr();
    let n_sqr = normalization_from_norm_sqr(x, Parity::Even)?.powi(2);
    let coherence_factor = (-2.0 * x * decayed_fraction(2.0 * gamma, delta_t)).exp();
    let alpha_t = alpha_n.decayed(gamma, 2.0 * delta_t);
    let overlap_t = overlap(alpha_t.norm_sqr());
    Ok(CatDecomposition {
        alpha_t,
        coherence_factor,
        p_even: n_sqr * (1.0 + coherence_factor) * (1.0 + overlap_t),
        p_odd: n_sqr * (1.0 - coherence_factor) * (1.0 - overlap_t),
    })
}

/// Raw (unnormalized) upper/lower values from the variant of the
/// post-miss probabilities whose coherence exponent uses `|α_{n+2}|²`
/// while the overlap uses `|α_n|² e^{−γt}`, evaluated at `t = 2Δt`.
pub fn mixed_index_miss_probabilities(
    alpha_n: ComplexAmplitude,
    gamma: f64,
    delta_t: f64,
) -> Result<(f64, f64)> {
    check_rate_and_time(gamma, delta_t)?;
    let t = 2.0 * delta_t;
    let x_n = alpha_n.norm_sqr();
    let x_n2 = alpha_n.decayed(gamma, t).norm_sqr();
    let n_sqr = normalization_from_norm_sqr(x_n, Parity::Even)?.powi(2);
    let coherence = (-2.0 * x_n2 * decayed_fraction(gamma, t)).exp();
    let overlap_t = (-2.0 * x_n * (-gamma * t).exp()).exp();
    Ok((
        n_sqr * (1.0 + coherence) * (1.0 + overlap_t),
        n_sqr * (1.0 - coherence) * (1.0 - overlap_t),
    ))
}

/// Joint even/odd decomposition of the correlated two-cavity cat
/// `|α⟩|β⟩ + |−α⟩|−β⟩` with equal decay rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeDecomposition {
    pub alpha_t: ComplexAmplitude,
    pub beta_t: ComplexAmplitude,
    pub coherence_factor: f64,
    pub p_even: f64,
    pub p_odd: f64,
}

/// The correlated cat behaves as a single-mode cat of mean photon number
/// `|α|² + |β|²`: both the coherence factor and the overlaps only see the sum.
pub fn two_cavity_weights(
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    gamma: f64,
    t: f64,
) -> Result<TwoModeDecomposition> {
    check_rate_and_time(gamma, t)?;
    let x = alpha.norm_sqr() + beta.norm_sqr();
    let n_sqr = normalization_from_norm_sqr(x, Parity::Even)?.powi(2);
    let coherence_factor = (-2.0 * x * decayed_fraction(gamma, t)).exp();
    let overlap_t = overlap(x * (-gamma * t).exp());
    let p_odd = n_sqr * (1.0 - coherence_factor) * (1.0 - overlap_t);
    Ok(TwoModeDecomposition {
        alpha_t: alpha.decayed(gamma, t),
        beta_t: beta.decayed(gamma, t),
        coherence_factor,
        p_even: 1.0 - p_odd,
        p_odd,
    })
}

pub fn reconstruct_two_mode_density(
    dec: &TwoModeDecomposition,
    dim_a: usize,
    dim_b: usize,
) -> Result<FockMatrix> {
    let mut rho = FockMatrix::zeros(dim_a * dim_b);
    for (parity, weight) in [(Parity::Even, dec.p_even), (Parity::Odd, dec.p_odd)] {
        if weight == 0.0 {
            continue;
        }
        let psi = two_mode_cat_state(dec.alpha_t, dec.beta_t, parity, dim_a, dim_b)?;
        rho = rho.add(&psi.projector().scale(Complex64::new(weight, 0.0)))?;
    }
    Ok(rho)
}
