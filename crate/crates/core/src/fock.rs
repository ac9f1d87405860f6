//! Dense linear algebra on a truncated photon-number basis.
//!
//! Every state lives on `|0⟩ … |dim−1⟩`. Coherent states are renormalized
//! after truncation; the discarded Poisson mass is reported separately so
//! callers can decide whether the truncation was adequate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on a single-mode truncation.
pub const SINGLE_MODE_CAP: usize = 512;
/// Hard cap on the dimension of a tensor-product space.
pub const PRODUCT_DIM_CAP: usize = 4096;
/// Default Poisson-tail tolerance used to pick a truncation.
pub const DEFAULT_TRUNCATION_EPS: f64 = 1e-12;
/// Smallest truncation ever returned by [`truncation_dim`].
pub const MIN_DIM: usize = 4;
/// Norm deficits above this are logged as inadequate truncations.
pub const TRUNCATION_WARN: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A coherent amplitude; `|α|²` is the mean photon number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AmplitudeRepr", into = "AmplitudeRepr")]
pub struct ComplexAmplitude {
    re: f64,
    im: f64,
}

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::invalid(format!("non-finite amplitude ({re}, {im})")));
        }
        Ok(Self { re, im })
    }

    /// Real amplitude. Panics on a non-finite value.
    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0).expect("finite amplitude")
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            re: self.re * factor,
            im: self.im * factor,
        }
    }

    /// Amplitude after free decay for a time `t`: `α e^{−γt/2}`.
    pub fn decayed(self, gamma: f64, t: f64) -> Self {
        self.scale((-0.5 * gamma * t).exp())
    }
}

impl From<f64> for ComplexAmplitude {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AmplitudeRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl TryFrom<AmplitudeRepr> for ComplexAmplitude {
    type Error = Error;

    fn try_from(repr: AmplitudeRepr) -> Result<Self> {
        match repr {
            AmplitudeRepr::Real(re) => Self::new(re, 0.0),
            AmplitudeRepr::Pair([re, im]) => Self::new(re, im),
        }
    }
}

impl From<ComplexAmplitude> for AmplitudeRepr {
    fn from(a: ComplexAmplitude) -> Self {
        AmplitudeRepr::Pair([a.re, a.im])
    }
}

/// Photon-number parity of a cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// State vector on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: DVector<Complex64>,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("a Fock vector needs dim >= 1"));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::invalid("non-finite amplitude in Fock vector"));
        }
        Ok(Self {
            amps: DVector::from_vec(amps),
        })
    }

    /// Number state `|n⟩`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::invalid(format!("|{n}> is outside dim {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[n] = ONE;
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::DegenerateState("cannot normalize the zero vector"));
        }
        Ok(Self {
            amps: &self.amps / Complex64::new(n, 0.0),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> FockMatrix {
        FockMatrix {
            entries: &self.amps * self.amps.adjoint(),
        }
    }

    /// `⟨self|op|self⟩`.
    pub fn expectation(&self, op: &FockMatrix) -> Result<Complex64> {
        same_dim(self.dim(), op.dim())?;
        Ok(self.amps.dotc(&(&op.entries * &self.amps)))
    }

    /// Mass on levels whose parity differs from `parity`.
    pub fn parity_leak(&self, parity: Parity) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(n, _)| Parity::of(*n) != parity)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn tensor(&self, other: &FockVector) -> Result<FockVector> {
        let dim = product_dim(self.dim(), other.dim())?;
        let mut amps = Vec::with_capacity(dim);
        for a in self.amps.iter() {
            for b in other.amps.iter() {
                amps.push(a * b);
            }
        }
        Ok(FockVector {
            amps: DVector::from_vec(amps),
        })
    }

    pub(crate) fn from_dvector(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }
}

/// Square operator or density matrix on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockMatrix {
    entries: DMatrix<Complex64>,
}

impl FockMatrix {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::ShapeMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::invalid("a Fock matrix needs dim >= 1"));
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self {
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> FockMatrix {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn mul(&self, rhs: &FockMatrix) -> Result<FockMatrix> {
        same_dim(self.dim(), rhs.dim())?;
        Ok(Self {
            entries: &self.entries * &rhs.entries,
        })
    }

    pub fn add(&self, rhs: &FockMatrix) -> Result<FockMatrix> {
        same_dim(self.dim(), rhs.dim())?;
        Ok(Self {
            entries: &self.entries + &rhs.entries,
        })
    }

    pub fn sub(&self, rhs: &FockMatrix) -> Result<FockMatrix> {
        same_dim(self.dim(), rhs.dim())?;
        Ok(Self {
            entries: &self.entries - &rhs.entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> FockMatrix {
        Self {
            entries: &self.entries * factor,
        }
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        same_dim(self.dim(), v.dim())?;
        Ok(FockVector::from_dvector(&self.entries * v.as_vector()))
    }

    /// `self · ρ · self†`.
    pub fn sandwich(&self, rho: &FockMatrix) -> Result<FockMatrix> {
        same_dim(self.dim(), rho.dim())?;
        Ok(Self {
            entries: &self.entries * &rho.entries * self.entries.adjoint(),
        })
    }

    /// Largest entrywise modulus of `self − rhs`.
    pub fn max_abs_diff(&self, rhs: &FockMatrix) -> Result<f64> {
        same_dim(self.dim(), rhs.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.hermitian_part())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }

    /// Checks the density-matrix invariants: Hermitian to 1e−12, unit trace
    /// to 1e−10, and no eigenvalue below −1e−10.
    pub fn check_density(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::invalid(format!("not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::invalid(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::invalid(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Rescales to unit trace.
    pub fn normalized_trace(&self) -> Result<FockMatrix> {
        let tr = self.trace().re;
        if tr <= 0.0 {
            return Err(Error::DegenerateState("matrix has non-positive trace"));
        }
        Ok(self.scale(Complex64::new(1.0 / tr, 0.0)))
    }

    pub fn tensor(&self, other: &FockMatrix) -> Result<FockMatrix> {
        product_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: self.entries.kronecker(&other.entries),
        })
    }

    fn hermitian_part(&self) -> DMatrix<Complex64> {
        (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

/// Kronecker product of two states or two operators.
pub trait Tensor: Sized {
    fn tensor_with(&self, other: &Self) -> Result<Self>;
}

impl Tensor for FockVector {
    fn tensor_with(&self, other: &Self) -> Result<Self> {
        self.tensor(other)
    }
}

impl Tensor for FockMatrix {
    fn tensor_with(&self, other: &Self) -> Result<Self> {
        self.tensor(other)
    }
}

pub fn tensor<T: Tensor>(x: &T, y: &T) -> Result<T> {
    x.tensor_with(y)
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { left, right })
    }
}

fn product_dim(a: usize, b: usize) -> Result<usize> {
    let requested = a.saturating_mul(b);
    if requested > PRODUCT_DIM_CAP {
        return Err(Error::DimensionOverflow {
            requested,
            cap: PRODUCT_DIM_CAP,
        });
    }
    Ok(requested)
}

/// Poisson probabilities `e^{−m} mᵏ/k!` for `k < len`, evaluated in log space.
fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    if mean == 0.0 {
        let mut p = vec![0.0; len];
        if len > 0 {
            p[0] = 1.0;
        }
        return p;
    }
    let ln_mean = mean.ln();
    let mut ln_fact = 0.0;
    (0..len)
        .map(|k| {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            (k as f64 * ln_mean - mean - ln_fact).exp()
        })
        .collect()
}

/// Probability mass a coherent state of mean photon number `mean` puts on
/// levels `n ≥ dim`.
pub fn poisson_tail(mean: f64, dim: usize) -> f64 {
    let horizon = dim.max((mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize);
    poisson_pmf(mean, horizon + 1)[dim..].iter().rev().sum()
}

/// Smallest truncation (at least [`MIN_DIM`]) whose discarded Poisson mass is
/// at most `eps`, with the default cap of [`SINGLE_MODE_CAP`].
pub fn truncation_dim(alpha: ComplexAmplitude, eps: f64) -> Result<usize> {
    truncation_dim_capped(alpha, eps, SINGLE_MODE_CAP)
}

pub fn truncation_dim_capped(alpha: ComplexAmplitude, eps: f64, cap: usize) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps {eps} must lie in (0, 1)")));
    }
    let mean = alpha.norm_sqr();
    let horizon = cap.max((mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize) + 1;
    let pmf = poisson_pmf(mean, horizon);
    // tail[d] = Σ_{n ≥ d} p_n, summed from the small end
    let mut tail = vec![0.0; horizon + 1];
    for d in (0..horizon).rev() {
        tail[d] = tail[d + 1] + pmf[d];
    }
    let found = (MIN_DIM..=cap.min(horizon)).find(|&d| tail[d] <= eps);
    match found {
        Some(d) => Ok(d),
        None => Err(Error::DimensionOverflow {
            requested: (cap + 1..horizon).find(|&d| tail[d] <= eps).unwrap_or(horizon),
            cap,
        }),
    }
}

/// A truncated state together with the norm it lost to the truncation.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub state: FockVector,
    /// `1 − ‖ψ_truncated‖²` before renormalization.
    pub norm_deficit: f64,
}

fn raw_coherent_amps(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(dim);
    let mut a = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            a = a * alpha / (n as f64).sqrt();
        }
        amps.push(a);
    }
    amps
}

/// Coherent state `|α⟩` truncated to `dim` levels and renormalized.
pub fn coherent_state(alpha: ComplexAmplitude, dim: usize) -> Result<FockVector> {
    coherent_state_prepared(alpha, dim).map(|p| p.state)
}

pub fn coherent_state_prepared(alpha: ComplexAmplitude, dim: usize) -> Result<Prepared> {
    let raw = FockVector::new(raw_coherent_amps(alpha.to_complex(), dim))?;
    let norm_deficit = poisson_tail(alpha.norm_sqr(), dim);
    if norm_deficit > TRUNCATION_WARN {
        log::warn!("coherent state |{alpha:?}> truncated at dim {dim} loses {norm_deficit:e}");
    }
    Ok(Prepared {
        state: raw.normalized()?,
        norm_deficit,
    })
}

/// Normalized cat `(|α⟩ ± |−α⟩)/√(2(1 ± e^{−2|α|²}))`.
pub fn cat_state(alpha: ComplexAmplitude, parity: Parity, dim: usize) -> Result<FockVector> {
    cat_state_prepared(alpha, parity, dim).map(|p| p.state)
}

pub fn cat_state_prepared(alpha: ComplexAmplitude, parity: Parity, dim: usize) -> Result<Prepared> {
    if parity == Parity::Odd && alpha.is_zero() {
        return Err(Error::DegenerateState("odd cat is undefined at alpha = 0"));
    }
    // |α⟩ ± |−α⟩ keeps 2·c_n on the matching parity and cancels the rest.
    let amps: Vec<Complex64> = raw_coherent_amps(alpha.to_complex(), dim)
        .into_iter()
        .enumerate()
        .map(|(n, a)| if Parity::of(n) == parity { a * 2.0 } else { ZERO })
        .collect();
    let raw = FockVector::new(amps)?;
    let overlap = (-2.0 * alpha.norm_sqr()).exp();
    let ideal_norm_sqr = 2.0 * (1.0 + parity.sign() * overlap);
    let norm_deficit = (1.0 - raw.norm_sqr() / ideal_norm_sqr).max(0.0);
    if norm_deficit > TRUNCATION_WARN {
        log::warn!("{parity:?} cat at {alpha:?} truncated at dim {dim} loses {norm_deficit:e}");
    }
    Ok(Prepared {
        state: raw.normalized()?,
        norm_deficit,
    })
}

/// Two-mode cat `|α⟩|β⟩ ± |−α⟩|−β⟩`, normalized on the product space.
pub fn two_mode_cat_state(
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    parity: Parity,
    dim_a: usize,
    dim_b: usize,
) -> Result<FockVector> {
    let plus = coherent_state(alpha, dim_a)?.tensor(&coherent_state(beta, dim_b)?)?;
    let minus =
        coherent_state(alpha.scale(-1.0), dim_a)?.tensor(&coherent_state(beta.scale(-1.0), dim_b)?)?;
    let sign = Complex64::new(parity.sign(), 0.0);
    let sum = plus.as_vector() + minus.as_vector() * sign;
    FockVector::from_dvector(sum).normalized().map_err(|_| {
        Error::DegenerateState("odd two-mode cat is undefined at alpha = beta = 0")
    })
}

/// `e^{iφ n̂}`.
pub fn phase_operator(phi: f64, dim: usize) -> FockMatrix {
    FockMatrix::from_diagonal(&phase_diagonal(phi, &(0..dim).collect::<Vec<_>>()))
}

/// Diagonal of `e^{iφ N}` for the given photon counts.
pub fn phase_diagonal(phi: f64, photons: &[usize]) -> Vec<Complex64> {
    photons
        .iter()
        .map(|&n| Complex64::from_polar(1.0, phi * n as f64))
        .collect()
}

/// `Π± = (e^{iφ n̂} ± 1)/2`.
pub fn pi_projectors(phi: f64, dim: usize) -> (FockMatrix, FockMatrix) {
    let diag = phase_diagonal(phi, &(0..dim).collect::<Vec<_>>());
    let plus: Vec<Complex64> = diag.iter().map(|p| (p + 1.0) * 0.5).collect();
    let minus: Vec<Complex64> = diag.iter().map(|p| (p - 1.0) * 0.5).collect();
    (FockMatrix::from_diagonal(&plus), FockMatrix::from_diagonal(&minus))
}

/// Annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(dim: usize) -> Result<FockMatrix> {
    if dim < 2 {
        return Err(Error::invalid("annihilation operator needs dim >= 2"));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(FockMatrix { entries: m })
}

pub fn number_operator(dim: usize) -> Result<FockMatrix> {
    if dim < 2 {
        return Err(Error::invalid("number operator needs dim >= 2"));
    }
    let diag: Vec<Complex64> = (0..dim).map(|n| Complex64::new(n as f64, 0.0)).collect();
    Ok(FockMatrix::from_diagonal(&diag))
}

fn matrix_sqrt_psd(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * roots * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &FockMatrix, sigma: &FockMatrix) -> Result<f64> {
    same_dim(rho.dim(), sigma.dim())?;
    let root = matrix_sqrt_psd(&rho.entries);
    let inner = &root * &sigma.entries * &root;
    let herm = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let sum: f64 = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok((sum * sum).clamp(0.0, 1.0))
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity against a pure state.
pub fn fidelity_pure(rho: &FockMatrix, psi: &FockVector) -> Result<f64> {
    Ok(psi.expectation(rho)?.re.clamp(0.0, 1.0))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &FockMatrix, sigma: &FockMatrix) -> Result<f64> {
    let diff = rho.sub(sigma)?;
    let sum: f64 = diff.hermitian_eigenvalues().iter().map(|l| l.abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// `Tr(ρ²)`.
pub fn purity(rho: &FockMatrix) -> f64 {
    (&rho.entries * &rho.entries).trace().re
}
