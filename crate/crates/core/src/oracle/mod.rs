//! Exact quantum-mechanical reference for 2×2 and 3×3 observables.
//!
//! Everything the hidden-variable models are checked against lives here:
//! operator bases, eigendecomposition, Born probabilities, expectations,
//! variances and the ε-vector `εᵢ = Tr ρTᵢ`.

mod basis;
mod eigen;
mod matrix;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

pub use basis::{build_basis, BasisKind, OperatorBasis, StructureConstants};
pub use matrix::{inner, norm_sqr, ComplexMatrix};

use crate::{Error, Result};

/// Entrywise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are one Born outcome.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// A validated Hermitian 2×2 or 3×3 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !(2..=3).contains(&m.dim()) {
            return Err(Error::InvalidParameter(format!(
                "operators must be 2x2 or 3x3, got {0}x{0}",
                m.dim()
            )));
        }
        let deviation = m.hermiticity_defect();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `H²`, Hermitian up to rounding.
    pub fn square(&self) -> HermitianOperator {
        let sq = &self.0 * &self.0;
        HermitianOperator((&sq + &sq.adjoint()).scale(0.5))
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        HermitianOperator(self.0.scale(s))
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        check_dim(self.dim(), other.dim())?;
        Ok(HermitianOperator(&self.0 + &other.0))
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Pure state vector or density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(Vec<Complex64>),
    Mixed(ComplexMatrix),
}

impl QuantumState {
    /// A unit vector; the norm must be 1 within 1e-12.
    pub fn pure(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("squared norm is {n}, expected 1")));
        }
        Ok(QuantumState::Pure(amplitudes))
    }

    /// Normalises any nonzero vector.
    pub fn pure_normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Ok(QuantumState::Pure(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::pure_normalized(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Hermitian, unit trace, eigenvalues ≥ −1e-12.
    pub fn mixed(rho: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(rho)
            .map_err(|e| Error::InvalidState(format!("density matrix: {e}")))?;
        let tr = h.matrix().trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = eigen::hermitian_eigen(h.matrix())
            .last()
            .map(|p| p.0)
            .unwrap_or(0.0);
        if min < -1e-12 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(QuantumState::Mixed(h.0))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        QuantumState::Mixed(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// Qubit state `½(I + ε·σ)`; needs `|ε| ≤ 1`.
    pub fn from_bloch(epsilon: [f64; 3]) -> Result<Self> {
        let pauli = build_basis(BasisKind::Pauli);
        let mut rho = ComplexMatrix::identity(2).scale(0.5);
        for (e, op) in epsilon.iter().zip(&pauli.operators) {
            rho = &rho + &op.matrix().scale(0.5 * e);
        }
        Self::mixed(rho)
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.len(),
            QuantumState::Mixed(m) => m.dim(),
        }
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        match self {
            QuantumState::Pure(v) => ComplexMatrix::outer(v, v),
            QuantumState::Mixed(m) => m.clone(),
        }
    }

    /// `⟨ψ|A|ψ⟩` or `Tr ρA`.
    fn expect(&self, a: &ComplexMatrix) -> Complex64 {
        match self {
            QuantumState::Pure(v) => a.sandwich(v, v),
            QuantumState::Mixed(rho) => (rho * a).trace(),
        }
    }

    /// Weight `⟨v|ρ|v⟩` of a normalised vector.
    pub fn weight(&self, v: &[Complex64]) -> f64 {
        match self {
            QuantumState::Pure(psi) => inner(v, psi).norm_sqr(),
            QuantumState::Mixed(rho) => rho.sandwich(v, v).re,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<Complex64>,
}

/// Born outcomes (descending, degenerate eigenvalues merged) with
/// probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BornDistribution {
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl BornDistribution {
    pub fn mean(&self) -> f64 {
        self.outcomes.iter().zip(&self.probabilities).map(|(l, p)| l * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(l, p)| l * l * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean().powi(2)
    }

    pub fn probability_of(&self, outcome: f64) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .filter(|(l, _)| (*l - outcome).abs() < DEGENERACY_TOL)
            .map(|(_, p)| *p)
            .sum()
    }
}

/// Expectation values `Tr ρTᵢ` of the basis operators.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonVector(pub Vec<f64>);

impl EpsilonVector {
    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, beta: &[f64]) -> f64 {
        self.0.iter().zip(beta).map(|(e, b)| e * b).sum()
    }
}

/// `Σᵢ βᵢ Tᵢ`. For the angular-momentum basis a 3-vector selects `β·Σ`.
pub fn linear_observable(coeffs: &[f64], basis: &OperatorBasis) -> Result<HermitianOperator> {
    let three_component = basis.kind == BasisKind::AngularMomentum && coeffs.len() == 3;
    if coeffs.len() != basis.len() && !three_component {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            actual: coeffs.len(),
        });
    }
    let mut m = ComplexMatrix::zeros(basis.dim());
    for (b, op) in coeffs.iter().zip(&basis.operators) {
        m = &m + &op.matrix().scale(*b);
    }
    HermitianOperator::new(m)
}

/// Eigenvalues descending with orthonormal eigenvectors.
pub fn spectral_decompose(h: &HermitianOperator) -> Vec<Eigenpair> {
    eigen::hermitian_eigen(h.matrix())
        .into_iter()
        .map(|(value, vector)| Eigenpair { value, vector })
        .collect()
}

/// Checks Hermiticity first.
pub fn spectral_decompose_matrix(m: &ComplexMatrix) -> Result<Vec<Eigenpair>> {
    Ok(spectral_decompose(&HermitianOperator::new(m.clone())?))
}

pub fn born_distribution(h: &HermitianOperator, state: &QuantumState) -> Result<BornDistribution> {
    check_dim(h.dim(), state.dim())?;
    let mut outcomes: Vec<f64> = Vec::new();
    let mut probabilities: Vec<f64> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    let mut anchor = f64::NAN;
    let flush = |cluster: &mut Vec<f64>, outcomes: &mut Vec<f64>| {
        if !cluster.is_empty() {
            outcomes.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
            cluster.clear();
        }
    };
    for pair in spectral_decompose(h) {
        if cluster.is_empty() || (anchor - pair.value).abs() >= DEGENERACY_TOL {
            flush(&mut cluster, &mut outcomes);
            anchor = pair.value;
            probabilities.push(0.0);
        }
        cluster.push(pair.value);
        *probabilities.last_mut().unwrap() += state.weight(&pair.vector);
    }
    flush(&mut cluster, &mut outcomes);
    for p in &mut probabilities {
        *p = p.clamp(0.0, 1.0);
    }
    Ok(BornDistribution {
        outcomes,
        probabilities,
    })
}

/// `Tr ρH`.
pub fn expectation(h: &HermitianOperator, state: &QuantumState) -> Result<f64> {
    check_dim(h.dim(), state.dim())?;
    Ok(state.expect(h.matrix()).re)
}

/// `Tr ρH² − (Tr ρH)²`.
pub fn variance(h: &HermitianOperator, state: &QuantumState) -> Result<f64> {
    let mean = expectation(h, state)?;
    Ok(state.expect(h.square().matrix()).re - mean * mean)
}

pub fn epsilon_vector(state: &QuantumState, basis: &OperatorBasis) -> Result<EpsilonVector> {
    check_dim(basis.dim(), state.dim())?;
    Ok(EpsilonVector(
        basis
            .operators
            .iter()
            .map(|t| state.expect(t.matrix()).re)
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsIdentityReport {
    pub holds: bool,
    /// `‖T₁² + T₂² + T₃² − 2I‖_F`.
    pub residual: f64,
}

/// Tests `T₁² + T₂² + T₃² = 2I` on the first three basis operators.
pub fn verify_ks_identity(basis: &OperatorBasis) -> KsIdentityReport {
    let mut sum = ComplexMatrix::zeros(basis.dim());
    for op in basis.operators.iter().take(3) {
        sum = &sum + op.square().matrix();
    }
    let residual = (&sum - &ComplexMatrix::identity(basis.dim()).scale(2.0)).frobenius_norm();
    KsIdentityReport {
        holds: residual < 1e-12,
        residual,
    }
}

/// `Σ_x², Σ_y², Σ_z²` as HermitianOperators.
pub fn sigma_squares() -> [HermitianOperator; 3] {
    let am = build_basis(BasisKind::AngularMomentum);
    [
        am.operators[0].square(),
        am.operators[1].square(),
        am.operators[2].square(),
    ]
}

/// Which KS probability a simultaneous eigenvector carries. `P1` is the
/// probability that `Sx² = 0`, `P2` that `Sy² = 0`, `P3` that `Sz² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbabilitySlot {
    P1,
    P2,
    P3,
}

impl ProbabilitySlot {
    pub fn index(self) -> usize {
        match self {
            ProbabilitySlot::P1 => 0,
            ProbabilitySlot::P2 => 1,
            ProbabilitySlot::P3 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousEigenvector {
    /// Eigenvalues of `(Σ_x², Σ_y², Σ_z²)`.
    pub squares: [f64; 3],
    pub vector: [Complex64; 3],
    pub slot: ProbabilitySlot,
}

/// The common eigenbasis of `Σ_x², Σ_y², Σ_z²`, rows in table order.
pub fn simultaneous_eigenbasis() -> [SimultaneousEigenvector; 3] {
    let r = |x: f64| Complex64::new(x, 0.0);
    [
        SimultaneousEigenvector {
            squares: [1.0, 0.0, 1.0],
            vector: [r(FRAC_1_SQRT_2), r(0.0), r(FRAC_1_SQRT_2)],
            slot: ProbabilitySlot::P2,
        },
        SimultaneousEigenvector {
            squares: [0.0, 1.0, 1.0],
            vector: [r(FRAC_1_SQRT_2), r(0.0), r(-FRAC_1_SQRT_2)],
            slot: ProbabilitySlot::P1,
        },
        SimultaneousEigenvector {
            squares: [1.0, 1.0, 0.0],
            vector: [r(0.0), r(1.0), r(0.0)],
            slot: ProbabilitySlot::P3,
        },
    ]
}

/// `(p₁, p₂, p₃)`: the probability that `Sx²`, `Sy²`, `Sz²` respectively
/// read 0 in the given spin-1 state.
pub fn ks_probabilities(state: &QuantumState) -> Result<[f64; 3]> {
    check_dim(3, state.dim())?;
    let mut p = [0.0; 3];
    for row in simultaneous_eigenbasis() {
        p[row.slot.index()] = state.weight(&row.vector);
    }
    Ok(p)
}
