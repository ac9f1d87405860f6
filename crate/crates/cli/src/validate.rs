//! Cross-module oracle suite behind `catguard validate`.
//!
//! Each check reduces to one measured number compared with a tolerance; a
//! check fails iff the measurement exceeds the tolerance (or is NaN).

use std::f64::consts::{PI, TAU};
use std::fmt;

use catguard::analytic::{
    closed_form_miss_weights, damped_cat, detection_probabilities, missed_atom_update,
    reconstruct_density, two_cavity_weights, CatDecomposition,
};
use catguard::fock::{
    cat_state, coherent_state, pi_projectors, poisson_tail, trace_distance, truncation_dim, ComplexAmplitude,
    FockMatrix, Parity, DEFAULT_TRUNCATION_EPS, TRUNCATION_WARN,
};
use catguard::lindblad::{default_rk4_steps, kraus_evolve, mean_photon, rk4_evolve};
use catguard::protocol::{
    dispersive_step, run_ensemble, Protocol, ProtocolSettings, Scheme, TrajectoryRng,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    /// Coarse grids and small ensembles, a few seconds.
    Fast,
    /// Full grids and 10⁵-trajectory Monte Carlo.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
    /// Which relation the check exercises.
    pub anchor: &'static str,
}

impl CheckRow {
    fn new(name: &'static str, measured: f64, tolerance: f64, anchor: &'static str) -> Self {
        let status = if measured <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name,
            status,
            measured,
            tolerance,
            anchor,
        }
    }
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
        };
        write!(
            f,
            "{status:4}  {:34} measured {:<10.3e} tolerance {:<8.1e} [{}]",
            self.name, self.measured, self.tolerance, self.anchor
        )
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<CheckRow>,
}

impl ValidationReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

pub type DampedCatFn = fn(ComplexAmplitude, f64, f64) -> catguard::Result<CatDecomposition>;

/// The suite, with the closed-form damped cat swappable so that a
/// deliberately broken formula can be shown to be caught.
#[derive(Clone, Copy)]
pub struct Suite {
    level: Level,
    damped_cat: DampedCatFn,
}

const FULL_AMPLITUDES: [f64; 5] = [0.5, 1.0, std::f64::consts::SQRT_2, 2.0, 2.5];
const FULL_TIMES: [f64; 6] = [0.01, 0.1, 0.25, 0.5, 1.0, 2.0];

fn c(x: f64) -> ComplexAmplitude {
    ComplexAmplitude::real(x)
}

fn even_cat(alpha: ComplexAmplitude) -> catguard::Result<FockMatrix> {
    let dim = truncation_dim(alpha, DEFAULT_TRUNCATION_EPS)?;
    Ok(cat_state(alpha, Parity::Even, dim)?.projector())
}

/// Largest value, NaN-propagating so a NaN measurement fails its check.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

impl Suite {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            damped_cat,
        }
    }

    pub fn with_damped_cat(mut self, f: DampedCatFn) -> Self {
        self.damped_cat = f;
        self
    }

    fn grid(&self) -> Vec<(f64, f64)> {
        let (amps, times): (&[f64], &[f64]) = match self.level {
            Level::Fast => (&[0.5, std::f64::consts::SQRT_2, 2.5], &[0.01, 0.5, 2.0]),
            Level::Full => (&FULL_AMPLITUDES, &FULL_TIMES),
        };
        amps.iter().flat_map(|&a| times.iter().map(move |&t| (a, t))).collect()
    }

    pub fn run(&self) -> Result<ValidationReport> {
        let mut rows = Vec::new();
        rows.push(self.damped_cat_vs_kraus()?);
        rows.extend(self.probability_identity()?);
        rows.push(self.branch_traces()?);
        rows.push(self.projector_relations());
        rows.extend(self.damping_integrators()?);
        rows.extend(self.two_cavity()?);
        rows.extend(self.schemes()?);
        rows.push(self.missed_atom()?);
        rows.push(self.monte_carlo()?);
        Ok(ValidationReport { rows })
    }

    fn damped_cat_vs_kraus(&self) -> Result<CheckRow> {
        let mut dists = Vec::new();
        for (a, gt) in self.grid() {
            let rho0 = even_cat(c(a))?;
            let numeric = kraus_evolve(&rho0, 1.0, gt)?;
            let closed = reconstruct_density(&(self.damped_cat)(c(a), 1.0, gt)?, rho0.dim())?;
            dists.push(trace_distance(&numeric, &closed)?);
        }
        Ok(CheckRow::new(
            "damped_cat_vs_kraus",
            worst(dists),
            1e-6,
            "damped even cat as a mixture of even and odd cats at α_t with coherence factor F",
        ))
    }

    fn probability_identity(&self) -> Result<[CheckRow; 2]> {
        let draws = match self.level {
            Level::Fast => 200,
            Level::Full => 1000,
        };
        let mut rng = TrajectoryRng::for_trial(0x5eed, 0);
        let mut sum_err: f64 = 0.0;
        let mut inversion: f64 = 0.0;
        for _ in 0..draws {
            let r = 3.0 * rng.uniform();
            let theta = TAU * rng.uniform();
            let alpha = ComplexAmplitude::new(r * theta.cos(), r * theta.sin())?;
            let gamma = 5.0 * rng.uniform();
            let t = 5.0 * rng.uniform();
            let p = detection_probabilities(alpha, gamma, t)?;
            sum_err = worst([sum_err, (p.p_e + p.p_g - 1.0).abs()]);
            inversion = worst([inversion, p.p_g - p.p_e]);
        }
        for (a, gt) in self.grid() {
            let p = detection_probabilities(c(a), 1.0, gt)?;
            inversion = worst([inversion, p.p_g - p.p_e]);
        }
        Ok([
            CheckRow::new("probe_probabilities_sum_to_one", sum_err, 1e-12, "P_e + P_g = 1"),
            CheckRow::new("upper_never_below_lower", inversion, 0.0, "P_e > P_g at all times"),
        ])
    }

    fn branch_traces(&self) -> Result<CheckRow> {
        let mut errs = Vec::new();
        for (a, gt) in self.grid() {
            let rho = kraus_evolve(&even_cat(c(a))?, 1.0, gt)?;
            let (plus, _) = pi_projectors(PI, rho.dim());
            let trace = plus.sandwich(&rho)?.trace().re;
            errs.push((trace - detection_probabilities(c(a), 1.0, gt)?.p_e).abs());
        }
        Ok(CheckRow::new(
            "branch_trace_vs_probe_probability",
            worst(errs),
            1e-10,
            "Tr(Π₊ρ_tΠ₊†) equals the closed-form P_e",
        ))
    }

    fn projector_relations(&self) -> CheckRow {
        let dims: &[usize] = match self.level {
            Level::Fast => &[2, 17, 64],
            Level::Full => &[2, 17, 64, 128],
        };
        CheckRow::new(
            "projector_relations",
            worst(dims.iter().map(|&d| projector_relation_error(d))),
            1e-12,
            "Π₊|α⟩ = ½|+⟩, Π₋|α⟩ = −½|−⟩, Π±|±⟩ = ±|±⟩, Π±|∓⟩ = 0 at φ = π",
        )
    }

    fn damping_integrators(&self) -> Result<[CheckRow; 4]> {
        let (amps, times): (&[f64], &[f64]) = match self.level {
            Level::Fast => (&[0.5, 2.5], &[0.1, 1.0]),
            Level::Full => (&[0.5, 1.5, 2.5], &[0.1, 1.0, 3.0]),
        };
        let mut rk4 = Vec::new();
        let mut physical = Vec::new();
        let mut semigroup = Vec::new();
        let mut energy = Vec::new();
        for &a in amps {
            let rho0 = even_cat(c(a))?;
            for &gt in times {
                let exact = kraus_evolve(&rho0, 1.0, gt)?;
                let rk = rk4_evolve(&rho0, 1.0, gt, default_rk4_steps(1.0, gt, rho0.dim()))?;
                rk4.push(trace_distance(&exact, &rk)?);
                for out in [&exact, &rk] {
                    physical.push((out.trace().re - 1.0).abs());
                    physical.push(-out.min_eigenvalue());
                }
                let half = kraus_evolve(&rho0, 1.0, gt / 2.0)?;
                semigroup.push(trace_distance(&exact, &kraus_evolve(&half, 1.0, gt / 2.0)?)?);
                energy.push((mean_photon(&exact) - (-gt).exp() * mean_photon(&rho0)).abs());
            }
        }
        Ok([
            CheckRow::new("rk4_vs_kraus", worst(rk4), 1e-7, "damping master equation, two integrators"),
            CheckRow::new(
                "damping_trace_and_positivity",
                worst(physical),
                1e-9,
                "damping master equation keeps ρ a density matrix",
            ),
            CheckRow::new("damping_semigroup", worst(semigroup), 1e-8, "damping master equation is Markovian"),
            CheckRow::new("mean_photon_decay", worst(energy), 1e-8, "⟨n⟩ decays as e^{−γt}"),
        ])
    }

    fn two_cavity(&self) -> Result<[CheckRow; 2]> {
        let mut errs = Vec::new();
        for (a, b) in [(1.0, 1.0), (1.0, 0.5)] {
            let mut s = ProtocolSettings::new(c(a), 1.0, 4);
            s.beta = Some(c(b));
            let cfg = s.resolve()?;
            let proto = Protocol::new(&cfg)?;
            let field = proto.decay(proto.initial_field())?;
            let trace = dispersive_step(&field, proto.probes())?.trace_upper;
            errs.push((trace - two_cavity_weights(cfg.alpha, c(b), 1.0, cfg.delta_t)?.p_even).abs());
        }
        let mut single = ProtocolSettings::new(c(1.3), 1.0, 5);
        single.delta_t = Some(0.05);
        let mut pair = single.clone();
        pair.beta = Some(c(0.0));
        let s = Protocol::new(&single.resolve()?)?.expected_upper_frequencies()?;
        let p = Protocol::new(&pair.resolve()?)?.expected_upper_frequencies()?;
        let reduction = worst(s.iter().zip(&p).map(|(x, y)| (x - y).abs()));
        Ok([
            CheckRow::new(
                "two_cavity_first_probe",
                worst(errs),
                1e-8,
                "correlated two-cavity cat, joint parity weights",
            ),
            CheckRow::new(
                "two_cavity_vacuum_reduction",
                reduction,
                1e-10,
                "β = 0 reduces to one cavity",
            ),
        ])
    }

    fn schemes(&self) -> Result<[CheckRow; 2]> {
        let mut s = ProtocolSettings::new(c(1.6), 1.0, 8);
        s.detector_efficiency = Some(0.8);
        s.seed = Some(99);
        let cascade = Protocol::new(&s.resolve()?)?;
        s.scheme = Some(Scheme::Lambda);
        let lambda = Protocol::new(&s.resolve()?)?;
        let op_err = worst([
            cascade.probes().upper_matrix().max_abs_diff(&lambda.probes().upper_matrix())?,
            cascade.probes().lower_matrix().max_abs_diff(&lambda.probes().lower_matrix())?,
        ]);
        let mut differing = 0usize;
        for trial in 0..200 {
            if cascade.trajectory(trial)?.outcomes() != lambda.trajectory(trial)?.outcomes() {
                differing += 1;
            }
        }
        Ok([
            CheckRow::new("scheme_operators_agree", op_err, 1e-12, "cascade and lambda measurement operators"),
            CheckRow::new(
                "scheme_outcomes_identical",
                differing as f64,
                0.0,
                "cascade and lambda give the same records",
            ),
        ])
    }

    fn missed_atom(&self) -> Result<CheckRow> {
        let mut errs = Vec::new();
        for (a, dt) in [(std::f64::consts::SQRT_2, 0.025), (2.0, 0.05), (0.8, 0.2)] {
            let alpha_n = c(a);
            let at_miss = damped_cat(alpha_n, 1.0, dt)?;
            let (operational, _) = missed_atom_update(&at_miss, alpha_n, 1.0, dt)?;
            let closed = closed_form_miss_weights(alpha_n, 1.0, dt)?;
            errs.push((operational.p_even - closed.p_even).abs());
            errs.push((operational.coherence_factor - closed.coherence_factor).abs());
        }
        Ok(CheckRow::new(
            "missed_atom_two_interval_weights",
            worst(errs),
            1e-8,
            "undetected atom: coherence e^{−2|α_n|²(1−e^{−2γΔt})} on cats at α_{n+2}",
        ))
    }

    fn monte_carlo(&self) -> Result<CheckRow> {
        let trials = match self.level {
            Level::Fast => 2_000,
            Level::Full => 100_000,
        };
        let mut s = ProtocolSettings::new(c(std::f64::consts::SQRT_2), 1.0, 10);
        s.seed = Some(7);
        let cfg = s.resolve()?;
        let stats = run_ensemble(&cfg, trials)?;
        let expected = crate::predict::upper_per_step(&cfg)?;
        let all = crate::predict::all_upper(&cfg)?;
        let z = |obs: f64, exp: f64, se: f64| {
            if se > 0.0 {
                (obs - exp).abs() / se
            } else if obs == exp {
                0.0
            } else {
                f64::INFINITY
            }
        };
        let mut zs: Vec<f64> = (0..cfg.n_atoms)
            .map(|k| z(stats.per_step_upper_frequency[k], expected[k], stats.per_step_upper_se[k]))
            .collect();
        zs.push(z(stats.all_upper_frequency, all, stats.all_upper_se));
        Ok(CheckRow::new(
            "monte_carlo_vs_closed_form",
            worst(zs),
            3.0,
            "sampled upper frequencies against the chained sequence probability (in SE)",
        ))
    }
}

/// Worst entrywise violation at dimension `dim` of `Π₊|α⟩ = ½|+⟩`,
/// `Π₋|α⟩ = −½|−⟩`, `Π±|±⟩ = ±|±⟩` and `Π±|∓⟩ = 0`, with the unnormalized
/// `|±⟩ = |α⟩ ± |−α⟩`, plus the operator identities behind them.
pub fn projector_relation_error(dim: usize) -> f64 {
    let (plus_op, minus_op) = pi_projectors(PI, dim);
    let mut errs = Vec::new();
    let diff = |a: &[Complex64], b: &[Complex64]| worst(a.iter().zip(b).map(|(x, y)| (x - y).norm()));
    // amplitudes the dimension can hold, so truncation warnings stay quiet
    let fits = |a: f64| poisson_tail(a * a, dim) <= TRUNCATION_WARN;
    for a in [1e-3, 0.3, 1.0, 1.7, 2.5].into_iter().filter(|&a| fits(a)) {
        let (Ok(fwd), Ok(back)) = (coherent_state(c(a), dim), coherent_state(c(-a), dim)) else {
            return f64::NAN;
        };
        let even: Vec<Complex64> = fwd.amps().iter().zip(back.amps()).map(|(x, y)| x + y).collect();
        let odd: Vec<Complex64> = fwd.amps().iter().zip(back.amps()).map(|(x, y)| x - y).collect();
        let apply = |op: &FockMatrix, v: &[Complex64]| -> Vec<Complex64> {
            (0..dim).map(|i| op.get(i, i) * v[i]).collect()
        };
        let scaled = |v: &[Complex64], k: f64| -> Vec<Complex64> { v.iter().map(|x| x * k).collect() };
        let zero = vec![Complex64::new(0.0, 0.0); dim];
        errs.push(diff(&apply(&plus_op, fwd.amps()), &scaled(&even, 0.5)));
        errs.push(diff(&apply(&minus_op, fwd.amps()), &scaled(&odd, -0.5)));
        errs.push(diff(&apply(&plus_op, &even), &even));
        errs.push(diff(&apply(&minus_op, &odd), &scaled(&odd, -1.0)));
        errs.push(diff(&apply(&plus_op, &odd), &zero));
        errs.push(diff(&apply(&minus_op, &even), &zero));
    }
    // the projectors are diagonal, so `apply` above only reads the diagonal
    let off_diagonal = worst((0..dim).flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j))).map(
        |(i, j)| plus_op.get(i, j).norm().max(minus_op.get(i, j).norm()),
    ));
    errs.push(off_diagonal);
    let neg = Complex64::new(-1.0, 0.0);
    let op_diff = |a: catguard::Result<FockMatrix>, b: &FockMatrix| {
        a.and_then(|a| a.max_abs_diff(b)).unwrap_or(f64::NAN)
    };
    errs.push(op_diff(plus_op.mul(&plus_op), &plus_op));
    errs.push(op_diff(minus_op.mul(&minus_op), &minus_op.scale(neg)));
    errs.push(op_diff(plus_op.mul(&minus_op), &FockMatrix::zeros(dim)));
    errs.push(op_diff(plus_op.sub(&minus_op), &FockMatrix::identity(dim)));
    worst(errs)
}

/// Runs the suite and prints one row per check.
pub fn cmd_validate(suite: &Suite) -> Result<ValidationReport> {
    let report = suite.run()?;
    for row in &report.rows {
        println!("{row}");
    }
    println!(
        "{} checks, {} failed",
        report.rows.len(),
        report.failures()
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails() {
        assert_eq!(CheckRow::new("x", f64::NAN, 1.0, "").status, Status::Fail);
        assert_eq!(CheckRow::new("x", 1.0, 1.0, "").status, Status::Pass);
        assert!(worst([0.1, f64::NAN, 0.2]).is_nan());
    }

    #[test]
    fn projector_relations_hold() {
        assert!(projector_relation_error(40) <= 1e-12);
    }
}
