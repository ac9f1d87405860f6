use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::config::Scheme;
use super::rng::TrajectoryRng;
use crate::error::{Error, Result};
use crate::fock::{phase_diagonal, FockMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Internal state of a probe atom over its two readout levels, ordered
/// (upper, lower): `(e, g)` for the cascade atom, `(b, c)` for the lambda atom.
pub type AtomState = [Complex64; 2];

pub fn prepare_atom(scheme: Scheme) -> AtomState {
    match scheme {
        Scheme::Cascade => {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            [h, h]
        }
        Scheme::Lambda => [ONE, ZERO],
    }
}

/// Mode structure of the field: one cavity or a row-major product of cavities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldLayout {
    dims: Vec<usize>,
}

impl FieldLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::invalid(format!("bad mode dimensions {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn single(dim: usize) -> Self {
        Self { dims: vec![dim] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Total photon number of every basis state.
    pub fn photons(&self) -> Vec<usize> {
        let mut counts = vec![0usize];
        for &d in &self.dims {
            counts = counts.iter().flat_map(|&c| (0..d).map(move |n| c + n)).collect();
        }
        counts
    }
}

type Block = [[Complex64; 2]; 2];

fn block_apply(m: &Block, v: &AtomState) -> AtomState {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// The two field operators `M_upper = ⟨upper|U|atom₀⟩` and
/// `M_lower = ⟨lower|U|atom₀⟩`, both diagonal in the photon-number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOperators {
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
}

impl ProbeOperators {
    /// Builds the operators by propagating the prepared atom through the
    /// scheme's atom-field unitary, one photon-number sector at a time.
    pub fn new(scheme: Scheme, phi: f64, photons: &[usize]) -> Self {
        let atom = prepare_atom(scheme);
        let phases = phase_diagonal(phi, photons);
        let (upper, lower) = phases
            .iter()
            .map(|&phase| {
                let out = match scheme {
                    Scheme::Cascade => {
                        // dispersive shift on |e⟩ only, then the second Ramsey zone
                        let dispersive: Block = [[phase, ZERO], [ZERO, ONE]];
                        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                        let ramsey: Block = [[h, h], [h, -h]];
                        block_apply(&ramsey, &block_apply(&dispersive, &atom))
                    }
                    Scheme::Lambda => {
                        let plus = (phase + ONE) * 0.5;
                        let minus = (phase - ONE) * 0.5;
                        let evolution: Block = [[plus, minus], [minus, plus]];
                        block_apply(&evolution, &atom)
                    }
                };
                (out[0], out[1])
            })
            .unzip();
        Self { upper, lower }
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn upper_matrix(&self) -> FockMatrix {
        FockMatrix::from_diagonal(&self.upper)
    }

    pub fn lower_matrix(&self) -> FockMatrix {
        FockMatrix::from_diagonal(&self.lower)
    }
}

/// Unnormalized post-measurement fields `MρM†` for the two readouts.
#[derive(Clone, Debug)]
pub struct Branches {
    pub upper: FockMatrix,
    pub lower: FockMatrix,
    pub trace_upper: f64,
    pub trace_lower: f64,
}

impl Branches {
    pub fn total(&self) -> f64 {
        self.trace_upper + self.trace_lower
    }
}

fn diagonal_sandwich(diag: &[Complex64], rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(diag.len(), diag.len(), |i, j| diag[i] * rho[(i, j)] * diag[j].conj())
}

/// Entangles the field with one probe atom and returns both readout branches.
pub fn dispersive_step(field: &FockMatrix, probes: &ProbeOperators) -> Result<Branches> {
    if field.dim() != probes.dim() {
        return Err(Error::ShapeMismatch {
            left: field.dim(),
            right: probes.dim(),
        });
    }
    let upper = FockMatrix::from_matrix(diagonal_sandwich(&probes.upper, field.as_matrix()))?;
    let lower = FockMatrix::from_matrix(diagonal_sandwich(&probes.lower, field.as_matrix()))?;
    Ok(Branches {
        trace_upper: upper.trace().re,
        trace_lower: lower.trace().re,
        upper,
        lower,
    })
}

/// Readout of one probe atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// `e` (cascade) or `b` (lambda): the field was projected on even parity.
    Upper,
    /// `g` (cascade) or `c` (lambda).
    Lower,
    /// The atom went undetected.
    Miss,
}

/// Samples the readout. Two uniforms are always drawn (detection, then
/// outcome) so streams stay aligned across efficiencies and forced misses.
pub fn measure_atom(
    branches: &Branches,
    efficiency: f64,
    forced_miss: bool,
    rng: &mut TrajectoryRng,
) -> Result<(Outcome, FockMatrix)> {
    let (upper, lower) = (branches.trace_upper, branches.trace_lower);
    if upper < 1e-14 && lower < 1e-14 {
        return Err(Error::NumericalDegeneracy { upper, lower });
    }
    let detect_draw = rng.uniform();
    let outcome_draw = rng.uniform();
    if forced_miss || detect_draw >= efficiency {
        return Ok((Outcome::Miss, branches.upper.add(&branches.lower)?));
    }
    if outcome_draw * (upper + lower) < upper {
        Ok((Outcome::Upper, branches.upper.scale(Complex64::new(1.0 / upper, 0.0))))
    } else {
        Ok((Outcome::Lower, branches.lower.scale(Complex64::new(1.0 / lower, 0.0))))
    }
}
